#include "octwalk/countkernel.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "octwalk/modarith.hpp"

namespace octwalk {

namespace {

constexpr std::array<std::array<int, 3>, 7> kFunctionals{
    {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}}};

// One x-row of a layer: cells i = first + stride * t, t < count.
struct Row {
    long long first = 0;
    long long count = 0;
    std::size_t offset = 0;
};

struct LayerShape {
    long long n = 0;
    long long ymax = -1, zmax = -1;
    long long stride = 1;
    std::vector<Row> rows;  // index k * (ymax + 1) + j
    std::size_t cells = 0;

    const Row* row(long long j, long long k) const
    {
        if (j < 0 || k < 0 || j > ymax || k > zmax) return nullptr;
        const Row& r = rows[static_cast<std::size_t>(k * (ymax + 1) + j)];
        return r.count > 0 ? &r : nullptr;
    }
};

LayerShape make_shape(const ReachabilityPredicate& pred, long long n)
{
    LayerShape L;
    L.n = n;
    L.ymax = pred.max_y(n);
    L.zmax = pred.max_z(n);
    const long long stride = pred.pruned() ? pred.lattice().x_stride() : 1;
    L.stride = stride == 0 ? 1 : stride;
    if (L.ymax < 0 || L.zmax < 0) {
        L.ymax = L.zmax = -1;
        return L;
    }
    L.rows.resize(static_cast<std::size_t>((L.ymax + 1) * (L.zmax + 1)));
    for (long long k = 0; k <= L.zmax; ++k)
        for (long long j = 0; j <= L.ymax; ++j) {
            Row& r = L.rows[static_cast<std::size_t>(k * (L.ymax + 1) + j)];
            r.offset = L.cells;
            const long long mx = pred.max_x(j, k, n);
            if (mx < 0) continue;
            long long fx = 0;
            if (pred.pruned()) {
                auto f = pred.lattice().first_x(j, k, n);
                if (!f) continue;
                fx = *f;
            }
            if (fx > mx) continue;
            r.first = fx;
            r.count = stride == 0 ? 1 : (mx - fx) / L.stride + 1;
            L.cells += static_cast<std::size_t>(r.count);
        }
    return L;
}

void check_prime(std::uint32_t p)
{
    if (p < 2 || p > (1u << 15)) throw std::invalid_argument("prime must lie in [2, 2^15]");
    if (!is_prime_u64(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
}

// Rows [lo, hi) of the next layer from the previous one.
void update_rows(const LayerShape& prev, const std::vector<std::uint16_t>& src, const LayerShape& next,
                 std::vector<std::uint16_t>& dst, const std::vector<Step>& steps, std::uint16_t p,
                 std::size_t lo, std::size_t hi)
{
    const long long width = next.ymax + 1;
    for (std::size_t idx = lo; idx < hi; ++idx) {
        const Row& r = next.rows[idx];
        if (r.count == 0) continue;
        const long long j = static_cast<long long>(idx) % width, k = static_cast<long long>(idx) / width;
        std::uint16_t* out = dst.data() + r.offset;
        std::fill(out, out + r.count, std::uint16_t{0});
        for (const Step& s : steps) {
            const Row* q = prev.row(j - s[1], k - s[2]);
            if (!q) continue;
            const long long diff = r.first - s[0] - q->first;
            if (diff % next.stride != 0) continue;
            const long long delta = diff / next.stride;
            const long long t0 = std::max(0LL, -delta);
            const long long t1 = std::min(r.count, q->count - delta);
            const std::uint16_t* in = src.data() + q->offset;
            for (long long t = t0; t < t1; ++t) out[t] = add_mod_min(out[t], in[t + delta], p);
        }
    }
}

std::uint16_t extract(const LayerShape& L, const std::vector<std::uint16_t>& data, Target target, std::uint32_t p)
{
    if (target == Target::Excursions) {
        const Row* r = L.row(0, 0);
        return (r && r->first == 0) ? data[r->offset] : 0;
    }
    std::uint64_t sum = 0;
    for (std::size_t c = 0; c < L.cells; ++c) sum += data[c];
    return static_cast<std::uint16_t>(sum % p);
}

}  // namespace

std::string_view to_string(Target t) { return t == Target::Excursions ? "excursions" : "all"; }

Target parse_target(std::string_view text)
{
    if (text == "excursions") return Target::Excursions;
    if (text == "all") return Target::AllEndpoints;
    throw std::invalid_argument("target must be excursions or all");
}

ReachabilityPredicate::ReachabilityPredicate(StepSet s, int horizon, Target target, bool prune)
    : lattice_(s), horizon_(horizon), target_(target), prune_(prune)
{
    const auto steps = s.steps();
    for (const auto& a : kFunctionals) {
        if (!prune && a[0] + a[1] + a[2] != 1) continue;
        int up = -3, down = -3;
        for (const Step& st : steps) {
            int v = a[0] * st[0] + a[1] * st[1] + a[2] * st[2];
            up = std::max(up, v);
            down = std::max(down, -v);
        }
        functionals_.push_back(a);
        up_.push_back(prune ? up : 1);
        down_.push_back(down);
    }
}

long long ReachabilityPredicate::bound(std::size_t f, long long n) const
{
    long long b = n * up_[f];
    if (prune_ && target_ == Target::Excursions) b = std::min(b, (horizon_ - n) * std::max(down_[f], 0));
    return b;
}

long long ReachabilityPredicate::max_x(long long j, long long k, long long n) const
{
    if (j < 0 || k < 0) return -1;
    long long mx = n;
    for (std::size_t f = 0; f < functionals_.size(); ++f) {
        const auto& a = functionals_[f];
        const long long rest = a[1] * j + a[2] * k;
        if (a[0]) mx = std::min(mx, bound(f, n) - rest);
        else if (rest > bound(f, n)) return -1;
    }
    return mx;
}

long long ReachabilityPredicate::max_y(long long n) const
{
    long long m = n;
    for (std::size_t f = 0; f < functionals_.size(); ++f)
        if (functionals_[f][1]) m = std::min(m, bound(f, n));
    return m;
}

long long ReachabilityPredicate::max_z(long long n) const
{
    long long m = n;
    for (std::size_t f = 0; f < functionals_.size(); ++f)
        if (functionals_[f][2]) m = std::min(m, bound(f, n));
    return m;
}

bool ReachabilityPredicate::operator()(long long i, long long j, long long k, long long n) const
{
    if (i < 0 || n < 0 || i > max_x(j, k, n)) return false;
    return !prune_ || lattice_.contains(i, j, k, n);
}

std::size_t layer_memory(StepSet s, int horizon, Target target, bool prune)
{
    ReachabilityPredicate pred(s, horizon, target, prune);
    std::size_t best = 0, prev = 0;
    for (long long n = 0; n <= horizon; ++n) {
        LayerShape L = make_shape(pred, n);
        std::size_t cur = L.cells * sizeof(std::uint16_t) + L.rows.size() * sizeof(Row);
        best = std::max(best, cur + prev);
        prev = cur;
    }
    return best;
}

ModSeries count_layers(StepSet s, int horizon, std::uint32_t p, Target target, const CountOptions& opt)
{
    check_prime(p);
    if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
    if (s.empty()) throw std::invalid_argument("empty step set");
    const std::size_t need = layer_memory(s, horizon, target, opt.prune);
    if (need > opt.memory_budget)
        throw BudgetExceeded("layers need " + std::to_string(need) + " bytes, budget is " +
                             std::to_string(opt.memory_budget));

    ReachabilityPredicate pred(s, horizon, target, opt.prune);
    const auto steps = s.steps();
    const auto p16 = static_cast<std::uint16_t>(p);
    ModSeries out{s, target, p, {}};
    out.terms.reserve(static_cast<std::size_t>(horizon) + 1);

    LayerShape cur = make_shape(pred, 0);
    std::vector<std::uint16_t> a(cur.cells, 0), b;
    if (const Row* r = cur.row(0, 0); r && r->first == 0) a[r->offset] = static_cast<std::uint16_t>(1 % p);
    out.terms.push_back(extract(cur, a, target, p));

    const unsigned threads = std::max(1u, opt.threads);
    for (long long n = 1; n <= horizon; ++n) {
        LayerShape next = make_shape(pred, n);
        b.assign(next.cells, 0);
        // Contiguous row blocks with roughly equal cell counts.
        std::vector<std::size_t> cuts{0};
        std::size_t acc = 0, target_cells = next.cells / threads + 1;
        for (std::size_t idx = 0; idx < next.rows.size() && cuts.size() < threads; ++idx) {
            acc += static_cast<std::size_t>(next.rows[idx].count);
            if (acc >= target_cells * cuts.size()) cuts.push_back(idx + 1);
        }
        cuts.push_back(next.rows.size());
        if (threads == 1) {
            update_rows(cur, a, next, b, steps, p16, 0, next.rows.size());
        } else {
            std::vector<std::thread> pool;
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
                pool.emplace_back(update_rows, std::cref(cur), std::cref(a), std::cref(next), std::ref(b),
                                  std::cref(steps), p16, cuts[c], cuts[c + 1]);
            for (auto& t : pool) t.join();
        }
        out.terms.push_back(extract(next, b, target, p));
        cur = std::move(next);
        std::swap(a, b);
    }
    return out;
}

std::vector<std::uint64_t> brute_force_walks(StepSet s, int n_max, Target target)
{
    if (n_max < 0 || n_max > 12) throw std::invalid_argument("brute force supports 0 <= n <= 12");
    const auto steps = s.steps();
    // Walks of length rem from v; coordinates never exceed 12.
    std::unordered_map<std::uint32_t, std::uint64_t> memo;
    auto key = [](int x, int y, int z, int rem) {
        return static_cast<std::uint32_t>(((rem * 16 + z) * 16 + y) * 16 + x);
    };
    auto rec = [&](auto&& self, int x, int y, int z, int rem) -> std::uint64_t {
        if (rem == 0) return target == Target::AllEndpoints || (x == 0 && y == 0 && z == 0);
        if (target == Target::Excursions && x + y + z > 3 * rem) return 0;
        auto it = memo.find(key(x, y, z, rem));
        if (it != memo.end()) return it->second;
        std::uint64_t total = 0;
        for (const Step& st : steps) {
            int a = x + st[0], b = y + st[1], c = z + st[2];
            if (a < 0 || b < 0 || c < 0) continue;
            total += self(self, a, b, c, rem - 1);
        }
        memo.emplace(key(x, y, z, rem), total);
        return total;
    };
    std::vector<std::uint64_t> out;
    for (int n = 0; n <= n_max; ++n) out.push_back(rec(rec, 0, 0, 0, n));
    return out;
}

std::vector<std::vector<std::pair<std::array<int, 3>, std::uint64_t>>> brute_force_endpoints(StepSet s, int n_max)
{
    if (n_max < 0 || n_max > 12) throw std::invalid_argument("brute force supports 0 <= n <= 12");
    const auto steps = s.steps();
    std::map<std::array<int, 3>, std::uint64_t> cur{{{0, 0, 0}, 1}};
    std::vector<std::vector<std::pair<std::array<int, 3>, std::uint64_t>>> out;
    for (int n = 0;; ++n) {
        out.emplace_back(cur.begin(), cur.end());
        if (n == n_max) break;
        std::map<std::array<int, 3>, std::uint64_t> next;
        for (const auto& [v, c] : cur)
            for (const Step& st : steps) {
                std::array<int, 3> w{v[0] + st[0], v[1] + st[1], v[2] + st[2]};
                if (w[0] >= 0 && w[1] >= 0 && w[2] >= 0) next[w] += c;
            }
        cur = std::move(next);
    }
    return out;
}

namespace {

template <typename T>
void put(std::ostream& os, T v)
{
    for (std::size_t b = 0; b < sizeof(T); ++b) os.put(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * b)) & 0xff));
}

template <typename T>
T get(std::istream& is)
{
    std::uint64_t v = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        int c = is.get();
        if (c == EOF) throw std::runtime_error("truncated series file");
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * b);
    }
    return static_cast<T>(v);
}

}  // namespace

void write_series(const std::filesystem::path& file, const ModSeries& s)
{
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    os.write("OW3S", 4);
    put<std::uint16_t>(os, 1);
    put<std::uint32_t>(os, s.model.mask());
    put<std::uint8_t>(os, static_cast<std::uint8_t>(s.target));
    put<std::uint16_t>(os, static_cast<std::uint16_t>(s.prime));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(s.terms.size() - 1));
    for (auto t : s.terms) put<std::uint16_t>(os, t);
    if (!os) throw std::runtime_error("write failed for " + file.string());
}

ModSeries read_series(const std::filesystem::path& file)
{
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + file.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string_view(magic, 4) != "OW3S") throw std::runtime_error("not a series file: " + file.string());
    if (get<std::uint16_t>(is) != 1) throw std::runtime_error("unsupported series version");
    ModSeries s;
    s.model = StepSet(get<std::uint32_t>(is));
    const auto t = get<std::uint8_t>(is);
    if (t > 1) throw std::runtime_error("bad target in series file");
    s.target = static_cast<Target>(t);
    s.prime = get<std::uint16_t>(is);
    const auto n = get<std::uint32_t>(is);
    s.terms.resize(static_cast<std::size_t>(n) + 1);
    for (auto& v : s.terms) v = get<std::uint16_t>(is);
    return s;
}

}  // namespace octwalk
