#include "octwalk/guess.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "octwalk/modarith.hpp"

namespace octwalk {

namespace {

struct Pair {
    int r, d;
};

std::vector<Pair> scan_order(int r_max, int d_max)
{
    std::vector<Pair> pairs;
    for (int r = 1; r <= r_max; ++r)
        for (int d = 0; d <= d_max; ++d) pairs.push_back({r, d});
    std::stable_sort(pairs.begin(), pairs.end(), [](Pair a, Pair b) {
        const int ua = (a.r + 1) * (a.d + 1), ub = (b.r + 1) * (b.d + 1);
        return ua != ub ? ua < ub : a.r < b.r;
    });
    return pairs;
}

std::size_t holdout_count(std::size_t equations, double h)
{
    return static_cast<std::size_t>(std::ceil(h * static_cast<double>(equations)));
}

// Row for equation n of the recurrence system: column i * (d+1) + j holds n^j a_{n+i}.
void recurrence_row(ModMatrix& M, Eigen::Index row, long n, int r, int d, const std::vector<std::uint16_t>& a,
                    const PrimeField& f)
{
    for (int i = 0; i <= r; ++i) {
        std::uint64_t v = a[static_cast<std::size_t>(n + i)] % f.modulus();
        for (int j = 0; j <= d; ++j) {
            M(row, i * (d + 1) + j) = v;
            v = f.mul(v, f.reduce(static_cast<std::uint64_t>(n)));
        }
    }
}

// Row for the coefficient of t^k: column i * (d+1) + j holds the t^k
// coefficient of t^j F^{(i)}, i.e. a_{k-j+i} (k-j+i)(k-j+i-1)...(k-j+1).
void ode_row(ModMatrix& M, Eigen::Index row, long k, int r, int d, const std::vector<std::uint16_t>& a,
             const PrimeField& f)
{
    for (int i = 0; i <= r; ++i)
        for (int j = 0; j <= d; ++j) {
            const long m = k - j + i;
            std::uint64_t v = 0;
            if (k >= j) {
                v = a[static_cast<std::size_t>(m)] % f.modulus();
                for (long q = 0; q < i; ++q) v = f.mul(v, f.reduce(static_cast<std::uint64_t>(m - q)));
            }
            M(row, i * (d + 1) + j) = v;
        }
}

template <typename RowFn>
std::optional<ModMatrix> fit(long equations, int r, int d, double h, std::uint64_t p, RowFn row_fn, int& holdout_out)
{
    const auto unknowns = static_cast<long>((r + 1) * (d + 1));
    const long holdout = static_cast<long>(holdout_count(static_cast<std::size_t>(equations), h));
    const long fitted = equations - holdout;
    if (fitted < unknowns) return std::nullopt;
    ModMatrix M(fitted, unknowns);
    for (long e = 0; e < fitted; ++e) row_fn(M, e, e);
    auto v = kernel_vector(M, p);
    if (!v) return std::nullopt;
    ModMatrix c(r + 1, d + 1);
    for (int i = 0; i <= r; ++i)
        for (int j = 0; j <= d; ++j) c(i, j) = (*v)(i * (d + 1) + j);
    holdout_out = static_cast<int>(holdout);
    return c;
}

}  // namespace

std::size_t required_length(int r, int d, double h)
{
    // equations = L - r, fitted = equations - ceil(h * equations) >= unknowns.
    const std::size_t unknowns = static_cast<std::size_t>((r + 1) * (d + 1));
    for (std::size_t L = static_cast<std::size_t>(r) + 1;; ++L) {
        const std::size_t eq = L - static_cast<std::size_t>(r);
        if (eq - holdout_count(eq, h) >= unknowns) return L;
    }
}

namespace {

// Forward elimination for p < 2^16 with delayed reduction: row updates are
// plain multiply-adds; a row is reduced only when it becomes a pivot row.
// Entries stay below 2^16 + k 2^32 after k updates.
std::optional<Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1>> kernel_vector_small(const ModMatrix& A, std::uint64_t p)
{
    const PrimeField f(p);
    const Eigen::Index rows = A.rows(), cols = A.cols();
    std::vector<std::uint64_t> m(static_cast<std::size_t>(rows * cols));
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m[static_cast<std::size_t>(i * cols + j)] = A(i, j) % p;
    auto at = [&](Eigen::Index i, Eigen::Index j) -> std::uint64_t& { return m[static_cast<std::size_t>(i * cols + j)]; };

    std::vector<Eigen::Index> pivot_col;
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
        Eigen::Index piv = -1;
        for (Eigen::Index t = r; t < rows; ++t) {
            at(t, c) %= p;
            if (piv < 0 && at(t, c) != 0) piv = t;
        }
        if (piv < 0) continue;
        if (piv != r)
            std::swap_ranges(m.begin() + r * cols, m.begin() + (r + 1) * cols, m.begin() + piv * cols);
        const std::uint64_t inv = f.inv(at(r, c));
        std::uint64_t* prow = &at(r, 0);
        for (Eigen::Index k = c; k < cols; ++k) prow[k] = prow[k] % p * inv % p;
        for (Eigen::Index t = r + 1; t < rows; ++t) {
            const std::uint64_t fac = at(t, c);
            if (fac == 0) continue;
            const std::uint64_t neg = p - fac;
            std::uint64_t* row = &at(t, 0);
            for (Eigen::Index k = c; k < cols; ++k) row[k] += neg * prow[k];
        }
        pivot_col.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
    for (auto c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = true;
    Eigen::Index free_col = -1;
    for (Eigen::Index c = 0; c < cols; ++c)
        if (!is_pivot[static_cast<std::size_t>(c)]) { free_col = c; break; }
    if (free_col < 0) return std::nullopt;

    Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1> v = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1>::Zero(cols);
    v(free_col) = 1;
    for (auto t = static_cast<Eigen::Index>(pivot_col.size()) - 1; t >= 0; --t) {
        const Eigen::Index c = pivot_col[static_cast<std::size_t>(t)];
        std::uint64_t s = 0;
        for (Eigen::Index k = c + 1; k < cols; ++k)
            if (v(k)) s = (s + at(t, k) % p * v(k)) % p;
        v(c) = f.neg(s);
    }
    return v;
}

}  // namespace

std::optional<Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1>> kernel_vector(ModMatrix M, std::uint64_t p)
{
    if (p < (1u << 16)) return kernel_vector_small(M, p);
    const PrimeField f(p);
    const Eigen::Index rows = M.rows(), cols = M.cols();
    std::vector<Eigen::Index> pivot_of_row;
    std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
        Eigen::Index piv = -1;
        for (Eigen::Index t = r; t < rows; ++t)
            if (M(t, c) != 0) { piv = t; break; }
        if (piv < 0) continue;
        M.row(r).swap(M.row(piv));
        const std::uint64_t inv = f.inv(M(r, c));
        for (Eigen::Index k = c; k < cols; ++k) M(r, k) = f.mul(M(r, k), inv);
        for (Eigen::Index t = 0; t < rows; ++t) {
            if (t == r || M(t, c) == 0) continue;
            const std::uint64_t fac = M(t, c);
            for (Eigen::Index k = c; k < cols; ++k) M(t, k) = f.sub(M(t, k), f.mul(fac, M(r, k)));
        }
        pivot_of_row.push_back(c);
        is_pivot[static_cast<std::size_t>(c)] = true;
        ++r;
    }
    Eigen::Index free_col = -1;
    for (Eigen::Index c = 0; c < cols; ++c)
        if (!is_pivot[static_cast<std::size_t>(c)]) { free_col = c; break; }
    if (free_col < 0) return std::nullopt;
    Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1> v = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1>::Zero(cols);
    v(free_col) = 1;
    for (std::size_t t = 0; t < pivot_of_row.size(); ++t)
        v(pivot_of_row[t]) = f.neg(M(static_cast<Eigen::Index>(t), free_col));
    return v;
}

bool annihilates(const RecurrenceCandidate& c, const std::vector<std::uint16_t>& terms)
{
    const PrimeField f(c.prime);
    const long L = static_cast<long>(terms.size());
    for (long n = 0; n + c.order < L; ++n) {
        std::uint64_t s = 0;
        for (int i = 0; i <= c.order; ++i) {
            std::uint64_t poly = 0;
            for (int j = c.degree; j >= 0; --j) poly = f.add(f.mul(poly, f.reduce(static_cast<std::uint64_t>(n))), c.coeffs(i, j));
            s = f.add(s, f.mul(poly, terms[static_cast<std::size_t>(n + i)] % c.prime));
        }
        if (s != 0) return false;
    }
    return true;
}

bool annihilates(const OdeCandidate& c, const std::vector<std::uint16_t>& terms)
{
    const PrimeField f(c.prime);
    const long L = static_cast<long>(terms.size());
    ModMatrix row(1, (c.order + 1) * (c.degree + 1));
    for (long k = 0; k + c.order < L; ++k) {
        ode_row(row, 0, k, c.order, c.degree, terms, f);
        std::uint64_t s = 0;
        for (int i = 0; i <= c.order; ++i)
            for (int j = 0; j <= c.degree; ++j) s = f.add(s, f.mul(row(0, i * (c.degree + 1) + j), c.coeffs(i, j)));
        if (s != 0) return false;
    }
    return true;
}

namespace {

template <typename Candidate, typename RowMaker>
std::optional<Candidate> scan(const ModSeries& a, int r_max, int d_max, const GuessOptions& opt, GuessStats* stats,
                              RowMaker make_row)
{
    const std::size_t L = a.terms.size();
    const std::size_t need = required_length(r_max, d_max, opt.holdout_fraction);
    if (opt.require_full_budget && L < need)
        throw SeriesTooShort("series has " + std::to_string(L) + " terms, budget r=" + std::to_string(r_max) +
                                 " d=" + std::to_string(d_max) + " needs " + std::to_string(need),
                             need);
    GuessStats local;
    GuessStats& st = stats ? *stats : local;
    const PrimeField f(a.prime);
    for (const auto [r, d] : scan_order(r_max, d_max)) {
        if (L < required_length(r, d, opt.holdout_fraction)) {
            ++st.skipped;
            continue;
        }
        ++st.scanned;
        const long equations = static_cast<long>(L) - r;
        int holdout = 0;
        auto c = fit(equations, r, d, opt.holdout_fraction, a.prime,
                     [&](ModMatrix& M, Eigen::Index row, long e) { make_row(M, row, e, r, d, a.terms, f); }, holdout);
        if (!c) continue;
        Candidate cand;
        cand.order = r;
        cand.degree = d;
        cand.prime = a.prime;
        cand.coeffs = *c;
        cand.holdout = holdout;
        if constexpr (std::is_same_v<Candidate, OdeCandidate>) cand.truncation = static_cast<int>(L) - 1 - r;
        if (annihilates(cand, a.terms)) return cand;
    }
    return std::nullopt;
}

}  // namespace

std::optional<RecurrenceCandidate> guess_recurrence(const ModSeries& a, int r_max, int d_max, const GuessOptions& opt,
                                                    GuessStats* stats)
{
    return scan<RecurrenceCandidate>(a, r_max, d_max, opt, stats, recurrence_row);
}

std::optional<OdeCandidate> guess_ode(const ModSeries& a, int r_max, int d_max, const GuessOptions& opt,
                                      GuessStats* stats)
{
    return scan<OdeCandidate>(a, r_max, d_max, opt, stats, ode_row);
}

std::string guess_json(const ModSeries& a, int r_max, int d_max, const GuessStats& stats,
                       const std::optional<RecurrenceCandidate>& rec, const std::optional<OdeCandidate>& ode,
                       bool double_prime)
{
    std::ostringstream os;
    auto table = [&](const ModMatrix& c) {
        os << '[';
        for (Eigen::Index i = 0; i < c.rows(); ++i) {
            os << (i ? "," : "") << '[';
            for (Eigen::Index j = 0; j < c.cols(); ++j) os << (j ? "," : "") << c(i, j);
            os << ']';
        }
        os << ']';
    };
    os << "{\"model\":\"" << a.model.hex() << "\",\"target\":\"" << to_string(a.target) << "\",\"prime\":" << a.prime
       << ",\"budget\":{\"r\":" << r_max << ",\"d\":" << d_max << ",\"N\":" << a.terms.size() - 1
       << "},\"scanned\":" << stats.scanned << ",\"skipped\":" << stats.skipped
       << ",\"found\":" << ((rec || ode) ? "true" : "false");
    if (rec) {
        os << ",\"recurrence\":{\"order\":" << rec->order << ",\"degree\":" << rec->degree << ",\"coeffs\":";
        table(rec->coeffs);
        os << '}';
    }
    if (ode) {
        os << ",\"ode\":{\"order\":" << ode->order << ",\"degree\":" << ode->degree << ",\"coeffs\":";
        table(ode->coeffs);
        os << '}';
    }
    if (double_prime) os << ",\"double_prime\":true";
    os << '}';
    return os.str();
}

}  // namespace octwalk
