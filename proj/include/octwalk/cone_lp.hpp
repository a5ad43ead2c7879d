#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>

namespace octwalk {

/// Rational point (num[0] / den, num[1] / den) with den > 0.
struct RationalPoint {
    std::array<long long, 2> num{0, 0};
    long long den = 1;
};

namespace detail {

template <typename DerivedA, typename DerivedB>
bool satisfies(const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& b,
               const RationalPoint& p)
{
    if (p.num[0] < 0 || p.num[1] < 0) return false;
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        long long lhs = 0;
        for (Eigen::Index c = 0; c < A.cols(); ++c) lhs += static_cast<long long>(A(r, c)) * p.num[c];
        if (lhs > static_cast<long long>(b(r)) * p.den) return false;
    }
    return true;
}

}  // namespace detail

/// Exact feasibility of { lambda >= 0 : A lambda <= b } for at most two
/// unknowns (A has 0, 1 or 2 columns). The region is pointed, so when it is
/// nonempty one of its vertices is an intersection of two tight constraints
/// among the rows of A and the axes; all such candidates are tried.
/// Returns the first feasible candidate in a fixed order, origin first.
template <typename DerivedA, typename DerivedB>
std::optional<RationalPoint> nonneg_feasible_point(const Eigen::MatrixBase<DerivedA>& A,
                                                   const Eigen::MatrixBase<DerivedB>& b)
{
    const Eigen::Index m = A.cols();
    const Eigen::Index rows = A.rows();
    RationalPoint origin;
    if (detail::satisfies(A, b, origin)) return origin;
    if (m == 0) return std::nullopt;

    if (m == 1) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            long long a = A(r, 0), c = b(r);
            if (a == 0) continue;
            if (a < 0) { a = -a; c = -c; }
            RationalPoint p{{c, 0}, a};
            if (detail::satisfies(A, b, p)) return p;
        }
        return std::nullopt;
    }

    // Lines a1 l1 + a2 l2 = c, including the two axes l1 = 0 and l2 = 0.
    const Eigen::Index lines = rows + 2;
    auto line = [&](Eigen::Index i) -> std::array<long long, 3> {
        if (i < rows) return {static_cast<long long>(A(i, 0)), static_cast<long long>(A(i, 1)),
                              static_cast<long long>(b(i))};
        if (i == rows) return {1, 0, 0};
        return {0, 1, 0};
    };
    for (Eigen::Index i = 0; i < lines; ++i) {
        const auto li = line(i);
        for (Eigen::Index j = i + 1; j < lines; ++j) {
            const auto lj = line(j);
            long long det = li[0] * lj[1] - lj[0] * li[1];
            if (det == 0) continue;
            long long n1 = li[2] * lj[1] - lj[2] * li[1];
            long long n2 = li[0] * lj[2] - lj[0] * li[2];
            if (det < 0) { det = -det; n1 = -n1; n2 = -n2; }
            RationalPoint p{{n1, n2}, det};
            if (detail::satisfies(A, b, p)) return p;
        }
    }
    return std::nullopt;
}

}  // namespace octwalk
