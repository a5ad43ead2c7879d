#pragma once

#include <optional>

#include <Eigen/Core>

#include "octwalk/stepset.hpp"

namespace octwalk {

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
using Vec4 = Eigen::Matrix<long long, 4, 1>;

/// Row-style Hermite normal form of the row span of M, pivots searched in
/// column order `order`. Zero rows are dropped; pivots are positive and the
/// entries above each pivot are reduced into [0, pivot).
IntMatrix hermite_normal_form(IntMatrix M, const std::array<int, 4>& order);

/// Sublattice of Z^4 spanned by (s_x, s_y, s_z, 1) for s in S, coordinates
/// ordered (i, j, k, n).
class SupportLattice {
public:
    explicit SupportLattice(StepSet s);

    /// Basis rows, echelon with respect to the column order (n, k, j, i).
    const IntMatrix& basis() const { return basis_; }
    int rank() const { return static_cast<int>(basis_.rows()); }

    bool contains(long long i, long long j, long long k, long long n) const;

    /// Spacing of lattice points along x; 0 when i is determined by (j, k, n).
    long long x_stride() const { return x_stride_; }

    /// Smallest i >= 0 with (i, j, k, n) in the lattice, if any.
    std::optional<long long> first_x(long long j, long long k, long long n) const;

    /// Least g > 0 with (0, 0, 0, g) in the lattice, 0 if none.
    long long return_period() const;

private:
    // Reduces v by the rows whose pivots lie among the first `upto` columns of
    // the order; returns false if some pivot does not divide.
    bool reduce(Vec4& v, int upto) const;

    IntMatrix basis_;
    std::array<int, 4> pivot_col_{-1, -1, -1, -1};  // pivot column of each row
    long long x_stride_ = 0;
};

}  // namespace octwalk
