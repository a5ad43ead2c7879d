#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "octwalk/stepset.hpp"

namespace octwalk {

/// Nonnegative rational p / q with q > 0.
struct Rational {
    long long num = 0;
    long long den = 1;
    std::string str() const;
};

/// Witness that the octant constraint on `dropped` follows from the other two:
/// s[dropped] >= l1 * s[a] + l2 * s[b] for every step, (a, b) the remaining
/// coordinates in increasing order.
struct ProjectionCertificate {
    int dropped = 2;
    std::array<Rational, 2> lambda{};

    bool holds_for(StepSet s) const;
    std::string to_json() const;
};

std::optional<ProjectionCertificate> projectible(StepSet s);

enum class HadamardKind { OnePlusTwo, TwoPlusOne };

/// P_S = U + V * W with 0/1 coefficients. Monomials are exponent triples.
/// OnePlusTwo: U, V involve only the distinguished variable, W only the other
/// two. TwoPlusOne: U, V avoid the distinguished variable, W uses only it.
struct HadamardDecomposition {
    HadamardKind kind = HadamardKind::OnePlusTwo;
    int coordinate = 0;
    std::vector<Step> U, V, W;

    /// Support of U + V * W as a step set; throws if a coefficient exceeds 1.
    StepSet reassemble() const;
};

/// All decompositions: OnePlusTwo over x, y, z, then TwoPlusOne over z, y, x.
std::vector<HadamardDecomposition> hadamard_decompositions(StepSet s);

/// First entry of hadamard_decompositions, if any.
std::optional<HadamardDecomposition> hadamard_decompose(StepSet s);

/// Coordinate name "x", "y" or "z".
char axis_name(int c);

}  // namespace octwalk
