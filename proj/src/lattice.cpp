#include "octwalk/lattice.hpp"

#include <cstdlib>
#include <stdexcept>

namespace octwalk {

namespace {

constexpr std::array<int, 4> kOrder{3, 2, 1, 0};  // n, k, j, i

long long floor_mod(long long a, long long m)
{
    long long r = a % m;
    return r < 0 ? r + m : r;
}

long long floor_div(long long a, long long m) { return (a - floor_mod(a, m)) / m; }

}  // namespace

IntMatrix hermite_normal_form(IntMatrix M, const std::array<int, 4>& order)
{
    Eigen::Index r = 0;
    for (int c : order) {
        if (r == M.rows()) break;
        for (;;) {
            Eigen::Index best = -1;
            for (Eigen::Index t = r; t < M.rows(); ++t)
                if (M(t, c) != 0 && (best < 0 || std::llabs(M(t, c)) < std::llabs(M(best, c)))) best = t;
            if (best < 0) break;
            M.row(r).swap(M.row(best));
            bool done = true;
            for (Eigen::Index t = r + 1; t < M.rows(); ++t) {
                if (M(t, c) == 0) continue;
                M.row(t) -= (M(t, c) / M(r, c)) * M.row(r);
                if (M(t, c) != 0) done = false;
            }
            if (done) break;
        }
        if (M(r, c) == 0) continue;
        if (M(r, c) < 0) M.row(r) *= -1;
        for (Eigen::Index t = 0; t < r; ++t) M.row(t) -= floor_div(M(t, c), M(r, c)) * M.row(r);
        ++r;
    }
    return M.topRows(r);
}

SupportLattice::SupportLattice(StepSet s)
{
    const auto steps = s.steps();
    if (steps.empty()) throw std::invalid_argument("support lattice of an empty step set");
    IntMatrix gens(static_cast<Eigen::Index>(steps.size()), 4);
    for (std::size_t t = 0; t < steps.size(); ++t)
        gens.row(static_cast<Eigen::Index>(t)) << steps[t][0], steps[t][1], steps[t][2], 1;
    basis_ = hermite_normal_form(gens, kOrder);
    for (Eigen::Index t = 0; t < basis_.rows(); ++t)
        for (int c : kOrder)
            if (basis_(t, c) != 0) {
                pivot_col_[t] = c;
                break;
            }
    for (Eigen::Index t = 0; t < basis_.rows(); ++t)
        if (pivot_col_[t] == 0) x_stride_ = basis_(t, 0);
}

bool SupportLattice::reduce(Vec4& v, int upto) const
{
    for (Eigen::Index t = 0; t < basis_.rows(); ++t) {
        const int c = pivot_col_[t];
        int pos = 0;
        while (kOrder[pos] != c) ++pos;
        if (pos >= upto) continue;
        if (v(c) % basis_(t, c) != 0) return false;
        v -= (v(c) / basis_(t, c)) * basis_.row(t).transpose();
    }
    for (int pos = 0; pos < upto; ++pos)
        if (v(kOrder[pos]) != 0) return false;
    return true;
}

bool SupportLattice::contains(long long i, long long j, long long k, long long n) const
{
    Vec4 v(i, j, k, n);
    return reduce(v, 4);
}

std::optional<long long> SupportLattice::first_x(long long j, long long k, long long n) const
{
    Vec4 v(0, j, k, n);
    if (!reduce(v, 3)) return std::nullopt;
    // (i, j, k, n) is a member iff i + v(0) is a multiple of the stride.
    if (x_stride_ == 0) {
        if (-v(0) < 0) return std::nullopt;
        return -v(0);
    }
    return floor_mod(-v(0), x_stride_);
}

long long SupportLattice::return_period() const
{
    for (long long g = 1; g <= 4096; ++g)
        if (contains(0, 0, 0, g)) return g;
    return 0;
}

}  // namespace octwalk
