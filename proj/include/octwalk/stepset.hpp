#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace octwalk {

/// A unit step (x, y, z) with components in {-1, 0, 1}, never (0, 0, 0).
using Step = std::array<int, 3>;

inline constexpr int kStepCount = 26;
inline constexpr std::uint32_t kMaskLimit = 1u << kStepCount;

/// Steps in bit order: block z = -1 (nine steps), block z = 0 (eight),
/// block z = +1 (nine); inside a block y is the major key, x the minor.
const std::array<Step, kStepCount>& step_table();

/// Bit index of a step, or -1 for (0, 0, 0) and out-of-range components.
int step_index(const Step& s);

/// Set of allowed steps, stored as a 26-bit mask (bit i <-> step_table()[i]).
class StepSet {
public:
    constexpr StepSet() = default;
    explicit StepSet(std::uint32_t mask);

    static StepSet from_steps(std::span<const Step> steps);
    /// Diagram string "zzzzzzzzz zzzzzzzz zzzzzzzzz" of 26 binary digits,
    /// whitespace ignored. Character i is bit i.
    static StepSet from_diagram(std::string_view diagram);
    static StepSet from_hex(std::string_view hex);
    static StepSet full() { return StepSet(kMaskLimit - 1); }

    std::uint32_t mask() const { return mask_; }
    int size() const { return __builtin_popcount(mask_); }
    bool empty() const { return mask_ == 0; }
    bool contains(const Step& s) const;
    std::vector<Step> steps() const;

    /// Seven lowercase hex digits.
    std::string hex() const;
    std::string diagram() const;

    friend constexpr auto operator<=>(StepSet, StepSet) = default;

private:
    std::uint32_t mask_ = 0;
};

std::vector<Step> decode(std::uint32_t mask);
std::uint32_t encode(std::span<const Step> steps);

std::string to_string(const Step& s);

/// Coordinate permutation: the image of a step s has component i equal to
/// s[perm[i]].
using Permutation = std::array<int, 3>;

const std::array<Permutation, 6>& coordinate_permutations();

StepSet apply_permutation(StepSet s, const Permutation& sigma);

/// Steps that occur in at least one walk confined to the octant.
StepSet usable_closure(StepSet s);

/// Smallest mask over the six coordinate permutations of usable_closure(s).
StepSet canonical_form(StepSet s);

/// Number of octant constraints that are not implied by the others on the
/// span of the steps (coordinate constraints that coincide on that span are
/// merged, constraints vanishing on it are dropped). Between 0 and 3.
int essential_constraints(StepSet s);

/// True when s equals its own canonical form and has at least two essential
/// constraints. These are the models that survive the first filter.
bool is_class_representative(StepSet s);

enum class FilterStatus : std::uint8_t {
    EliminatedUnusedDuplicate,
    Projectible,
    Hadamard,
    GroupLarge,
    FiniteGroupNonzeroOS,
    FiniteGroupZeroOS,
    Unprocessed,
    Error,
};

std::string_view to_string(FilterStatus status);
FilterStatus parse_filter_status(std::string_view text);

/// Position of a status along the pipeline; transitions never decrease it.
int pipeline_rank(FilterStatus status);

struct ModelRecord {
    StepSet id;
    int size = 0;
    FilterStatus filter_status = FilterStatus::Unprocessed;
    std::optional<std::size_t> group_info;
    std::string notes;
};

struct SizeRange {
    int min = 1;
    int max = kStepCount;
    bool contains(int k) const { return k >= min && k <= max; }
};

/// Every class representative with size in range, sorted by mask.
/// Work is split over disjoint mask ranges when threads > 1.
std::vector<ModelRecord> enumerate_classes(SizeRange range = {}, unsigned threads = 1);

/// Representatives inside one mask interval [lo, hi).
std::vector<StepSet> enumerate_classes_in(std::uint32_t lo, std::uint32_t hi, SizeRange range);

/// Model list line: "hex,size,status".
std::string format_model_line(const ModelRecord& r);
ModelRecord parse_model_line(std::string_view line);

}  // namespace octwalk
