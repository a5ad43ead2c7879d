#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "octwalk/modarith.hpp"
#include "octwalk/stepset.hpp"

namespace octwalk {

/// Exponent pair in the two variables other than the axis, in increasing
/// coordinate order.
using Exp2 = std::array<int, 2>;

/// Steps sliced along each axis: slice(axis, v) holds the remaining exponent
/// pairs of the steps whose axis component equals v.
class CharPoly {
public:
    explicit CharPoly(StepSet s);

    const std::vector<Exp2>& slice(int axis, int value) const { return slices_[axis][value + 1]; }
    StepSet reconstruct() const;

private:
    std::array<std::array<std::vector<Exp2>, 3>, 3> slices_;
};

/// x_axis -> x_axis^{-1} * numerator / denominator, other coordinates fixed.
struct RationalMap {
    int axis = 0;
    std::vector<Exp2> numerator;
    std::vector<Exp2> denominator;
};

class MapUndefined : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// phi_x, phi_y, phi_z. Throws MapUndefined if a slice at -1 or +1 is empty.
std::array<RationalMap, 3> generator_maps(StepSet s);

/// Point of the torus over F_p carrying the inverses of its coordinates.
struct TorusPoint {
    std::array<std::uint64_t, 3> v{};
    std::array<std::uint64_t, 3> inv{};
    bool operator==(const TorusPoint& o) const { return v == o.v; }
};

TorusPoint make_point(const PrimeField& f, std::uint64_t x, std::uint64_t y, std::uint64_t z);

/// Image of pt under the map, or nullopt when the numerator or denominator
/// vanishes there.
std::optional<TorusPoint> apply_map(const RationalMap& m, const TorusPoint& pt, const PrimeField& f);

/// P_S(pt) = sum of x^i y^j z^k over the steps.
std::uint64_t eval_char_poly(StepSet s, const TorusPoint& pt, const PrimeField& f);

/// Word over {0 = phi_x, 1 = phi_y, 2 = phi_z}; word[0] is applied last.
using Word = std::vector<std::uint8_t>;

/// Free and cyclic reduction, then the least rotation of the word or its
/// reverse. Empty for trivial relators.
Word normalize_relator(Word w);

enum class GroupStatus { Finite, PresumedInfinite, Failed };

struct GroupResult {
    GroupStatus status = GroupStatus::Failed;
    std::size_t order = 0;
    std::vector<Word> elements;
    std::vector<Word> relators;  ///< normalized, sorted by length then lexicographically
    /// Images of the evaluation points, one row per element.
    std::vector<std::vector<TorusPoint>> fingerprints;
    std::vector<TorusPoint> points;
    std::map<int, std::size_t> element_orders;  ///< order -> count, finite groups only
    bool abelian = false;
    std::uint64_t seed = 0;
    std::string message;

    bool finite() const { return status == GroupStatus::Finite; }
    bool has_odd_relator() const;
    std::size_t shortest_relator() const;
};

struct GroupOptions {
    std::size_t cap = 400;
    int points = 3;
    std::uint64_t seed = 1;
    int retries = 8;
};

GroupResult explore_group(StepSet s, const GroupOptions& opt = {});

/// One of Z2xZ2xZ2, D12, Z2xD8, S4, Z2xS4, or Other(order).
std::string identify_group(const GroupResult& g);

/// Invariants used by identify_group.
struct GroupSignature {
    std::string name;
    std::size_t order;
    bool abelian;
    std::map<int, std::size_t> element_orders;
};
const std::vector<GroupSignature>& known_group_signatures();

struct OrbitEvidence {
    std::uint64_t prime = 0;
    TorusPoint point;
    std::uint64_t value = 0;
};

struct OrbitSumVerdict {
    bool is_zero = false;
    std::vector<OrbitEvidence> evidence;
    /// Set when every generator is a monomial map and the sum was expanded
    /// exactly as a Laurent polynomial.
    std::optional<bool> exact_zero;
    /// Nonzero terms of the exact expansion: exponent triple -> coefficient.
    std::map<Step, long long> exact_terms;
};

/// Throws std::logic_error when the group is not finite or a relator has odd
/// length.
OrbitSumVerdict orbit_sum_zero(StepSet s, const GroupResult& g, std::uint64_t seed = 1);

std::string word_to_string(const Word& w);
std::string group_json(const GroupResult& g, const std::optional<OrbitSumVerdict>& os);

}  // namespace octwalk
