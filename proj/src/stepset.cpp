#include "octwalk/stepset.hpp"

#include <algorithm>
#include <bitset>
#include <cstdio>
#include <atomic>
#include <memory>
#include <sstream>
#include <thread>

#include <Eigen/Core>

#include "octwalk/cone_lp.hpp"

namespace octwalk {

namespace {

std::array<Step, kStepCount> build_table()
{
    std::array<Step, kStepCount> t{};
    int i = 0;
    for (int z = -1; z <= 1; ++z)
        for (int y = -1; y <= 1; ++y)
            for (int x = -1; x <= 1; ++x)
                if (x || y || z) t[i++] = {x, y, z};
    return t;
}

// Byte-sliced lookup tables: image of each mask byte under each permutation.
struct PermTables {
    std::array<std::array<std::array<std::uint32_t, 256>, 4>, 6> t{};
    PermTables()
    {
        const auto& perms = coordinate_permutations();
        const auto& steps = step_table();
        for (int p = 0; p < 6; ++p) {
            std::array<int, kStepCount> img{};
            for (int i = 0; i < kStepCount; ++i) {
                const Step& s = steps[i];
                img[i] = step_index({s[perms[p][0]], s[perms[p][1]], s[perms[p][2]]});
            }
            for (int b = 0; b < 4; ++b)
                for (int v = 0; v < 256; ++v) {
                    std::uint32_t r = 0;
                    for (int k = 0; k < 8; ++k) {
                        int bit = 8 * b + k;
                        if (bit < kStepCount && ((v >> k) & 1)) r |= 1u << img[bit];
                    }
                    t[p][b][v] = r;
                }
        }
    }
    std::uint32_t apply(int p, std::uint32_t m) const
    {
        return t[p][0][m & 0xff] | t[p][1][(m >> 8) & 0xff] | t[p][2][(m >> 16) & 0xff] |
               t[p][3][m >> 24];
    }
};

const PermTables& perm_tables()
{
    static const PermTables tables;
    return tables;
}

// Reachability inside the box [0, N]^3 on a padded grid of side G, stored as
// a bitset with x fastest. Requires N + 1 < G - 1 so wrap-around never lands
// inside the masks.
template <int G>
std::uint32_t usable_in_box(std::uint32_t mask, int n)
{
    using Grid = std::bitset<G * G * G>;
    auto region = [](int lim) {
        Grid g;
        for (int z = 0; z <= lim; ++z)
            for (int y = 0; y <= lim; ++y)
                for (int x = 0; x <= lim; ++x) g.set(x + G * (y + G * z));
        return g;
    };
    static thread_local std::array<std::unique_ptr<std::pair<Grid, Grid>>, G> cache{};
    if (!cache[n]) cache[n] = std::make_unique<std::pair<Grid, Grid>>(region(n), region(n + 1));
    const Grid& box = cache[n]->first;
    const Grid& ext = cache[n]->second;

    const auto& steps = step_table();
    auto shift = [](const Grid& g, int off) { return off >= 0 ? g << off : g >> -off; };
    std::array<int, kStepCount> off{};
    for (int i = 0; i < kStepCount; ++i)
        off[i] = steps[i][0] + G * (steps[i][1] + G * steps[i][2]);

    Grid reach, frontier;
    reach.set(0);
    frontier.set(0);
    while (frontier.any()) {
        Grid next;
        for (std::uint32_t m = mask; m; m &= m - 1) next |= shift(frontier, off[__builtin_ctz(m)]);
        next &= box;
        frontier = next & ~reach;
        reach |= frontier;
    }
    std::uint32_t used = 0;
    for (std::uint32_t m = mask; m; m &= m - 1) {
        int i = __builtin_ctz(m);
        if ((shift(reach, off[i]) & ext).any()) used |= 1u << i;
    }
    return used;
}

std::uint32_t usable_in_box(std::uint32_t mask, int n)
{
    if (n <= 13) return usable_in_box<16>(mask, n);
    if (n <= 29) return usable_in_box<32>(mask, n);
    if (n <= 61) return usable_in_box<64>(mask, n);
    throw std::logic_error("usable closure did not stabilise");
}

}  // namespace

const std::array<Step, kStepCount>& step_table()
{
    static const auto table = build_table();
    return table;
}

int step_index(const Step& s)
{
    for (int c : s)
        if (c < -1 || c > 1) return -1;
    int raw = (s[0] + 1) + 3 * (s[1] + 1) + 9 * (s[2] + 1);
    if (raw == 13) return -1;
    return raw < 13 ? raw : raw - 1;
}

StepSet::StepSet(std::uint32_t mask) : mask_(mask)
{
    if (mask >= kMaskLimit) throw std::out_of_range("step mask exceeds 26 bits");
}

StepSet StepSet::from_steps(std::span<const Step> steps) { return StepSet(encode(steps)); }

StepSet StepSet::from_diagram(std::string_view diagram)
{
    std::uint32_t mask = 0;
    int i = 0;
    for (char c : diagram) {
        if (c == ' ' || c == '\t' || c == '\n') continue;
        if (c != '0' && c != '1') throw std::invalid_argument("diagram must contain only 0 and 1");
        if (i >= kStepCount) throw std::invalid_argument("diagram has more than 26 digits");
        if (c == '1') mask |= 1u << i;
        ++i;
    }
    if (i != kStepCount) throw std::invalid_argument("diagram must have 26 digits");
    return StepSet(mask);
}

StepSet StepSet::from_hex(std::string_view hex)
{
    if (hex.empty() || hex.size() > 7) throw std::invalid_argument("hex mask must have 1 to 7 digits");
    std::uint32_t mask = 0;
    for (char c : hex) {
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else throw std::invalid_argument("bad hex digit in mask");
        mask = (mask << 4) | static_cast<std::uint32_t>(v);
    }
    return StepSet(mask);
}

bool StepSet::contains(const Step& s) const
{
    int i = step_index(s);
    return i >= 0 && ((mask_ >> i) & 1u);
}

std::vector<Step> StepSet::steps() const { return decode(mask_); }

std::string StepSet::hex() const
{
    char buf[8];
    std::snprintf(buf, sizeof buf, "%07x", mask_);
    return buf;
}

std::string StepSet::diagram() const
{
    std::string out;
    for (int i = 0; i < kStepCount; ++i) {
        if (i == 9 || i == 17) out += ' ';
        out += ((mask_ >> i) & 1u) ? '1' : '0';
    }
    return out;
}

std::vector<Step> decode(std::uint32_t mask)
{
    if (mask >= kMaskLimit) throw std::out_of_range("step mask exceeds 26 bits");
    std::vector<Step> out;
    for (int i = 0; i < kStepCount; ++i)
        if ((mask >> i) & 1u) out.push_back(step_table()[i]);
    return out;
}

std::uint32_t encode(std::span<const Step> steps)
{
    std::uint32_t mask = 0;
    for (const Step& s : steps) {
        int i = step_index(s);
        if (i < 0) throw std::invalid_argument("not a unit step: " + to_string(s));
        mask |= 1u << i;
    }
    return mask;
}

std::string to_string(const Step& s)
{
    std::ostringstream os;
    os << '(' << s[0] << ',' << s[1] << ',' << s[2] << ')';
    return os.str();
}

const std::array<Permutation, 6>& coordinate_permutations()
{
    static const std::array<Permutation, 6> perms{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    return perms;
}

StepSet apply_permutation(StepSet s, const Permutation& sigma)
{
    const auto& perms = coordinate_permutations();
    auto it = std::find(perms.begin(), perms.end(), sigma);
    if (it == perms.end()) throw std::invalid_argument("not a coordinate permutation");
    return StepSet(perm_tables().apply(static_cast<int>(it - perms.begin()), s.mask()));
}

StepSet usable_closure(StepSet s)
{
    if (s.empty()) return s;
    std::uint32_t prev = usable_in_box(s.mask(), 4);
    for (int n = 8;; n *= 2) {
        std::uint32_t cur = usable_in_box(s.mask(), n);
        if (cur == prev) return StepSet(cur);
        prev = cur;
    }
}

StepSet canonical_form(StepSet s)
{
    std::uint32_t c = usable_closure(s).mask();
    std::uint32_t best = c;
    for (int p = 1; p < 6; ++p) best = std::min(best, perm_tables().apply(p, c));
    return StepSet(best);
}

int essential_constraints(StepSet s)
{
    const auto steps = s.steps();
    const auto n = static_cast<Eigen::Index>(steps.size());
    Eigen::Matrix<int, Eigen::Dynamic, 3> M(n, 3);
    for (Eigen::Index r = 0; r < n; ++r)
        for (int c = 0; c < 3; ++c) M(r, c) = steps[r][c];

    std::vector<int> kept;
    for (int c = 0; c < 3; ++c) {
        if (M.col(c).isZero()) continue;
        bool dup = std::any_of(kept.begin(), kept.end(), [&](int j) { return M.col(c) == M.col(j); });
        if (!dup) kept.push_back(c);
    }
    int essential = 0;
    for (int i : kept) {
        Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> A(n, static_cast<Eigen::Index>(kept.size()) - 1);
        int col = 0;
        for (int j : kept)
            if (j != i) A.col(col++) = M.col(j);
        if (!nonneg_feasible_point(A, M.col(i))) ++essential;
    }
    return essential;
}

bool is_class_representative(StepSet s)
{
    const std::uint32_t m = s.mask();
    if (m == 0) return false;
    for (int p = 1; p < 6; ++p)
        if (perm_tables().apply(p, m) < m) return false;
    if (usable_closure(s).mask() != m) return false;
    return essential_constraints(s) >= 2;
}

std::string_view to_string(FilterStatus status)
{
    switch (status) {
    case FilterStatus::EliminatedUnusedDuplicate: return "EliminatedUnusedDuplicate";
    case FilterStatus::Projectible: return "Projectible";
    case FilterStatus::Hadamard: return "Hadamard";
    case FilterStatus::GroupLarge: return "GroupLarge";
    case FilterStatus::FiniteGroupNonzeroOS: return "FiniteGroupNonzeroOS";
    case FilterStatus::FiniteGroupZeroOS: return "FiniteGroupZeroOS";
    case FilterStatus::Unprocessed: return "Unprocessed";
    case FilterStatus::Error: return "Error";
    }
    return "Error";
}

FilterStatus parse_filter_status(std::string_view text)
{
    for (int v = 0; v <= static_cast<int>(FilterStatus::Error); ++v) {
        auto st = static_cast<FilterStatus>(v);
        if (to_string(st) == text) return st;
    }
    throw std::invalid_argument("unknown filter status: " + std::string(text));
}

int pipeline_rank(FilterStatus status)
{
    switch (status) {
    case FilterStatus::Unprocessed: return 0;
    case FilterStatus::EliminatedUnusedDuplicate:
    case FilterStatus::Projectible:
    case FilterStatus::Hadamard: return 1;
    case FilterStatus::GroupLarge:
    case FilterStatus::FiniteGroupNonzeroOS:
    case FilterStatus::FiniteGroupZeroOS:
    case FilterStatus::Error: return 2;
    }
    return 2;
}

namespace {

// Next mask with the same popcount (Gosper's hack).
std::uint64_t next_combination(std::uint64_t v)
{
    std::uint64_t t = v | (v - 1);
    return (t + 1) | (((~t & -~t) - 1) >> (__builtin_ctzll(v) + 1));
}

// Smallest mask >= lo with exactly k bits set.
std::uint64_t first_combination(std::uint64_t lo, int k)
{
    std::uint64_t m = lo;
    for (;;) {
        const int pc = __builtin_popcountll(m);
        if (pc == k) return m;
        if (pc < k) {
            for (int missing = k - pc; missing > 0; --missing) m |= ~m & (m + 1);
            return m;
        }
        m += m & -m;
    }
}

}  // namespace

std::vector<StepSet> enumerate_classes_in(std::uint32_t lo, std::uint32_t hi, SizeRange range)
{
    std::vector<StepSet> out;
    hi = std::min(hi, kMaskLimit);
    if (lo >= hi) return out;
    auto consider = [&](std::uint32_t m) {
        if (is_class_representative(StepSet(m))) out.emplace_back(m);
    };
    const int lo_k = std::max(range.min, 1), hi_k = std::min(range.max, kStepCount);
    if (lo_k > hi_k) return out;
    if (lo_k == 1 && hi_k == kStepCount) {
        for (std::uint32_t m = std::max(lo, 1u); m < hi; ++m) consider(m);
    } else {
        for (int k = lo_k; k <= hi_k; ++k)
            for (std::uint64_t m = first_combination(std::max<std::uint64_t>(lo, 1), k); m < kMaskLimit;
                 m = next_combination(m)) {
                if (m >= hi) break;
                consider(static_cast<std::uint32_t>(m));
            }
        std::sort(out.begin(), out.end());
    }
    return out;
}

std::vector<ModelRecord> enumerate_classes(SizeRange range, unsigned threads)
{
    threads = std::max(1u, threads);
    // Interleaved chunks balance the work, which is heavier for large masks.
    const std::uint32_t chunks = threads == 1 ? 1 : threads * 16;
    const std::uint32_t width = (kMaskLimit + chunks - 1) / chunks;
    std::vector<std::vector<StepSet>> results(chunks);
    std::vector<std::thread> pool;
    std::atomic<std::uint32_t> next{0};
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::uint32_t c; (c = next++) < chunks;)
                results[c] = enumerate_classes_in(c * width, (c + 1) * width, range);
        });
    for (auto& th : pool) th.join();

    std::vector<ModelRecord> records;
    for (const auto& part : results)
        for (StepSet s : part) records.push_back({s, s.size(), FilterStatus::Unprocessed, std::nullopt, {}});
    return records;
}

std::string format_model_line(const ModelRecord& r)
{
    return r.id.hex() + ',' + std::to_string(r.size) + ',' + std::string(to_string(r.filter_status));
}

ModelRecord parse_model_line(std::string_view line)
{
    auto c1 = line.find(',');
    auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) throw std::invalid_argument("model line needs hex,size,status");
    ModelRecord r;
    r.id = StepSet::from_hex(line.substr(0, c1));
    r.size = std::stoi(std::string(line.substr(c1 + 1, c2 - c1 - 1)));
    auto status = line.substr(c2 + 1);
    while (!status.empty() && (status.back() == '\r' || status.back() == ' ')) status.remove_suffix(1);
    r.filter_status = parse_filter_status(status);
    if (r.size != r.id.size()) throw std::invalid_argument("model line size does not match mask");
    return r;
}

}  // namespace octwalk
