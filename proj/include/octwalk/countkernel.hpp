#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "octwalk/lattice.hpp"
#include "octwalk/stepset.hpp"

namespace octwalk {

enum class Target : std::uint8_t { Excursions = 0, AllEndpoints = 1 };

std::string_view to_string(Target t);
Target parse_target(std::string_view text);

/// Residues a_0..a_N of Q(0,0,0,t) or Q(1,1,1,t) modulo a prime.
struct ModSeries {
    StepSet model;
    Target target = Target::Excursions;
    std::uint32_t prime = 0;
    std::vector<std::uint16_t> terms;
    bool operator==(const ModSeries&) const = default;
};

/// Branch-free a + b mod p for a, b < p <= 2^15.
inline std::uint16_t add_mod_min(std::uint16_t a, std::uint16_t b, std::uint16_t p)
{
    const std::uint16_t s = static_cast<std::uint16_t>(a + b);
    const std::uint16_t t = static_cast<std::uint16_t>(s - p);
    return s < t ? s : t;
}

/// Conservative test for "q_{i,j,k,n} may be nonzero" (and, for excursions,
/// "the walk may still return to the origin by step N"), built from linear
/// bounds a.v <= n up(a) and a.v <= (N - n) down(a) over a fixed family of
/// nonnegative functionals, plus membership in the support lattice.
class ReachabilityPredicate {
public:
    ReachabilityPredicate(StepSet s, int horizon, Target target, bool prune = true);

    bool operator()(long long i, long long j, long long k, long long n) const;

    /// Largest admissible i for (j, k, n) from the linear bounds alone, or -1.
    long long max_x(long long j, long long k, long long n) const;
    long long max_y(long long n) const;
    long long max_z(long long n) const;

    const SupportLattice& lattice() const { return lattice_; }
    bool pruned() const { return prune_; }

private:
    long long bound(std::size_t f, long long n) const;

    SupportLattice lattice_;
    int horizon_;
    Target target_;
    bool prune_;
    std::vector<std::array<int, 3>> functionals_;
    std::vector<int> up_, down_;
};

struct CountOptions {
    unsigned threads = 1;
    bool prune = true;
    std::size_t memory_budget = std::size_t{4} << 30;
};

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bytes needed for the two live layers at this horizon.
std::size_t layer_memory(StepSet s, int horizon, Target target, bool prune = true);

ModSeries count_layers(StepSet s, int horizon, std::uint32_t p, Target target, const CountOptions& opt = {});

/// Exact counts by memoized enumeration, n_max <= 12.
std::vector<std::uint64_t> brute_force_walks(StepSet s, int n_max, Target target);

/// Exact number of walks of length n ending at each reachable point, n_max <= 12.
std::vector<std::vector<std::pair<std::array<int, 3>, std::uint64_t>>> brute_force_endpoints(StepSet s, int n_max);

void write_series(const std::filesystem::path& file, const ModSeries& s);
ModSeries read_series(const std::filesystem::path& file);

}  // namespace octwalk
