#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "octwalk/exactify.hpp"
#include "octwalk/guess.hpp"
#include "octwalk/modarith.hpp"

using namespace octwalk;

namespace {

ModSeries catalan(std::uint32_t p, std::size_t count)
{
    ModSeries s;
    s.prime = p;
    BigInt c = 1;
    for (std::size_t n = 0; n < count; ++n) {
        s.terms.push_back(static_cast<std::uint16_t>(BigInt(c % p)));
        c = c * (4 * n + 2) / (n + 2);
    }
    return s;
}

}  // namespace

TEST_CASE("Catalan recurrence")
{
    const auto s = catalan(16381, 200);
    GuessStats stats;
    const auto rec = guess_recurrence(s, 20, 30, {}, &stats);
    REQUIRE(rec);
    CHECK(rec->order == 1);
    CHECK(rec->degree == 1);
    CHECK(annihilates(*rec, s.terms));
    CHECK(annihilates(*rec, catalan(16381, 500).terms));
    // Proportional to -(4n + 2) a_n + (n + 2) a_{n+1}.
    const PrimeField f(16381);
    const auto& c = rec->coeffs;
    const std::uint64_t scale = f.mul(c(1, 1), f.inv(1));
    CHECK(c(1, 0) == f.mul(scale, 2));
    CHECK(c(0, 1) == f.mul(scale, f.from_int(-4)));
    CHECK(c(0, 0) == f.mul(scale, f.from_int(-2)));
    CHECK(stats.scanned > 0);
}

TEST_CASE("Catalan differential equation")
{
    const auto s = catalan(16381, 200);
    const auto ode = guess_ode(s, 20, 30);
    REQUIRE(ode);
    CHECK(ode->order <= 2);
    CHECK(annihilates(*ode, s.terms));
}

TEST_CASE("random sequences have no recurrence")
{
    std::mt19937 rng(71);
    int found = 0;
    for (int i = 0; i < 100; ++i) {
        ModSeries s;
        s.prime = 16381;
        for (int n = 0; n < 200; ++n) s.terms.push_back(static_cast<std::uint16_t>(rng() % 16381));
        found += guess_recurrence(s, 20, 30).has_value();
        found += guess_ode(s, 20, 30).has_value();
    }
    CHECK(found == 0);
}

TEST_CASE("budget that does not fit")
{
    const auto s = catalan(16381, 60);
    GuessOptions strict;
    strict.require_full_budget = true;
    try {
        guess_recurrence(s, 20, 30, strict);
        FAIL("budget accepted");
    } catch (const SeriesTooShort& e) {
        CHECK(e.required_length == required_length(20, 30, 0.2));
        CHECK(e.required_length > 60);
    }
    GuessStats stats;
    CHECK(guess_recurrence(s, 20, 30, {}, &stats));
    CHECK(stats.skipped == 0);
    GuessStats none;
    ModSeries tiny;
    tiny.prime = 16381;
    std::mt19937 rng(72);
    for (int n = 0; n < 12; ++n) tiny.terms.push_back(static_cast<std::uint16_t>(rng() % 16381));
    CHECK_FALSE(guess_recurrence(tiny, 20, 30, {}, &none));
    CHECK(none.skipped > 0);
    CHECK(none.scanned > 0);
}

TEST_CASE("kernel vectors")
{
    const std::uint64_t p = 101;
    ModMatrix m(2, 3);
    m << 1, 2, 3, 2, 4, 6;
    const auto v = kernel_vector(m, p);
    REQUIRE(v);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::uint64_t acc = 0;
        for (Eigen::Index c = 0; c < m.cols(); ++c) acc = (acc + m(r, c) * (*v)(c)) % p;
        CHECK(acc == 0);
    }
    ModMatrix full = ModMatrix::Identity(3, 3);
    CHECK_FALSE(kernel_vector(full, p));
}

TEST_CASE("report lines")
{
    auto s = catalan(16381, 200);
    GuessStats stats;
    const auto rec = guess_recurrence(s, 20, 30, {}, &stats);
    const auto json = guess_json(s, 20, 30, stats, rec, std::nullopt, true);
    CHECK(json.find("\"budget\":{\"r\":20,\"d\":30,\"N\":199}") != std::string::npos);
    CHECK(json.find("\"found\":true") != std::string::npos);
    CHECK(json.find("\"double_prime\":true") != std::string::npos);
    const auto none = guess_json(s, 20, 30, stats, std::nullopt, std::nullopt);
    CHECK(none.find("\"found\":false") != std::string::npos);
}
