#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "octwalk/countkernel.hpp"
#include "octwalk/stepset.hpp"
#include "support.hpp"

using namespace octwalk;
using octwalk::testing::kSStar;
using octwalk::testing::random_models;

TEST_CASE("step table order and index")
{
    const auto& t = step_table();
    CHECK(t[0] == Step{-1, -1, -1});
    CHECK(t[8] == Step{1, 1, -1});
    CHECK(t[9] == Step{-1, -1, 0});
    CHECK(t[12] == Step{-1, 0, 0});
    CHECK(t[13] == Step{1, 0, 0});
    CHECK(t[25] == Step{1, 1, 1});
    for (int i = 0; i < kStepCount; ++i) CHECK(step_index(t[i]) == i);
    CHECK(step_index({0, 0, 0}) == -1);
    CHECK(step_index({2, 0, 0}) == -1);
}

TEST_CASE("diagram decoding")
{
    const auto steps = decode(kSStar.mask());
    const std::set<Step> got(steps.begin(), steps.end());
    const std::set<Step> want{{-1, -1, -1}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    CHECK(got == want);
    CHECK(kSStar.diagram() == "100000000 00001010 000010000");
    CHECK(StepSet::from_hex(kSStar.hex()) == kSStar);
    CHECK_THROWS(StepSet(kMaskLimit));
    CHECK_THROWS(StepSet::from_hex("4000000"));
    CHECK_THROWS(StepSet::from_diagram("1010"));
}

TEST_CASE("encode and decode are inverse")
{
    for (StepSet s : random_models(500, 11)) {
        const auto steps = decode(s.mask());
        CHECK(encode(steps) == s.mask());
        CHECK(StepSet::from_diagram(s.diagram()) == s);
        CHECK(StepSet::from_hex(s.hex()) == s);
    }
}

TEST_CASE("usable closure")
{
    CHECK(usable_closure(StepSet::from_steps(std::vector<Step>{{1, -1, 0}, {-1, 1, 0}})).empty());
    CHECK(usable_closure(kSStar) == kSStar);
    CHECK(usable_closure(StepSet::full()) == StepSet::full());

    for (StepSet s : random_models(200, 12)) {
        const StepSet c = usable_closure(s);
        CHECK((c.mask() & ~s.mask()) == 0);
        CHECK(usable_closure(c) == c);
        // Adding steps never removes usable ones.
        const StepSet bigger(s.mask() | (1u << (s.mask() % kStepCount)));
        CHECK((c.mask() & ~usable_closure(bigger).mask()) == 0);
    }
}

TEST_CASE("closure preserves walk counts")
{
    for (StepSet s : random_models(60, 13, 1, 12)) {
        const StepSet c = usable_closure(s);
        for (Target t : {Target::Excursions, Target::AllEndpoints})
            CHECK(brute_force_walks(s, 7, t) == brute_force_walks(c, 7, t));
    }
}

TEST_CASE("permutation invariance")
{
    for (StepSet s : random_models(300, 14)) {
        const StepSet canon = canonical_form(s);
        const int ess = essential_constraints(s);
        for (const auto& sigma : coordinate_permutations()) {
            const StepSet t = apply_permutation(s, sigma);
            CHECK(t.size() == s.size());
            CHECK(canonical_form(t) == canon);
            CHECK(essential_constraints(t) == ess);
            CHECK(usable_closure(t) == apply_permutation(usable_closure(s), sigma));
        }
        CHECK(canon <= s);
    }
}

TEST_CASE("essential constraints")
{
    CHECK(essential_constraints(kSStar) == 3);
    CHECK(essential_constraints(StepSet::full()) == 3);
    // No step lowers z.
    const StepSet flat = StepSet::from_steps(std::vector<Step>{{1, 0, 0}, {-1, 0, 0}, {0, 1, 1}, {0, -1, 0}});
    CHECK(essential_constraints(flat) == 2);
}

TEST_CASE("class counts for small sizes")
{
    const auto records = enumerate_classes({3, 4}, 2);
    std::array<int, 27> by_size{};
    for (const auto& r : records) ++by_size[r.size];
    CHECK(by_size[3] == 73);
    CHECK(by_size[4] == 979);
    CHECK(std::is_sorted(records.begin(), records.end(),
                         [](const ModelRecord& a, const ModelRecord& b) { return a.id < b.id; }));
}

TEST_CASE("enumeration is independent of the mask partition")
{
    const SizeRange range{3, 5};
    const auto whole = enumerate_classes_in(0, kMaskLimit, range);
    std::vector<StepSet> parts;
    const std::uint32_t cuts[] = {0, 1, 77, 4096, 300000, 1u << 20, 9999999, 40000000, kMaskLimit};
    for (std::size_t i = 0; i + 1 < std::size(cuts); ++i) {
        auto chunk = enumerate_classes_in(cuts[i], cuts[i + 1], range);
        parts.insert(parts.end(), chunk.begin(), chunk.end());
    }
    CHECK(parts == whole);
    std::vector<StepSet> threaded;
    for (const auto& r : enumerate_classes(range, 3)) threaded.push_back(r.id);
    CHECK(threaded == whole);
}

TEST_CASE("model lines")
{
    ModelRecord r{kSStar, 4, FilterStatus::FiniteGroupZeroOS, std::nullopt, {}};
    const auto line = format_model_line(r);
    CHECK(line == kSStar.hex() + ",4,FiniteGroupZeroOS");
    const auto back = parse_model_line(line);
    CHECK(back.id == kSStar);
    CHECK(back.filter_status == FilterStatus::FiniteGroupZeroOS);
    CHECK_THROWS(parse_model_line(kSStar.hex() + ",5,Projectible"));
    CHECK_THROWS(parse_model_line("zz"));
    for (int k = 0; k <= static_cast<int>(FilterStatus::Error); ++k) {
        const auto st = static_cast<FilterStatus>(k);
        CHECK(parse_filter_status(to_string(st)) == st);
    }
}
