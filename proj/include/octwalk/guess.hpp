#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "octwalk/countkernel.hpp"

namespace octwalk {

using ModMatrix = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// sum_{i<=r} (sum_{j<=d} c(i, j) n^j) a_{n+i} = 0 mod p.
struct RecurrenceCandidate {
    int order = 0;
    int degree = 0;
    std::uint32_t prime = 0;
    ModMatrix coeffs;  ///< (r+1) x (d+1)
    int holdout = 0;   ///< equations withheld from the fit
};

/// sum_{i<=r} p_i(t) F^{(i)}(t) = 0 mod (p, t^{truncation+1}), p_i = sum_j c(i, j) t^j.
struct OdeCandidate {
    int order = 0;
    int degree = 0;
    std::uint32_t prime = 0;
    ModMatrix coeffs;
    int holdout = 0;
    int truncation = 0;
};

class SeriesTooShort : public std::runtime_error {
public:
    SeriesTooShort(const std::string& what, std::size_t required)
        : std::runtime_error(what), required_length(required) {}
    std::size_t required_length;
};

struct GuessOptions {
    double holdout_fraction = 0.2;
    /// Refuse when the largest (r, d) pair does not fit the series; otherwise
    /// pairs that do not fit are skipped and counted.
    bool require_full_budget = false;
};

struct GuessStats {
    int scanned = 0;
    int skipped = 0;
};

/// Smallest length that fits (r, d) with the holdout fraction h.
std::size_t required_length(int r, int d, double h);

std::optional<RecurrenceCandidate> guess_recurrence(const ModSeries& a, int r_max, int d_max,
                                                    const GuessOptions& opt = {}, GuessStats* stats = nullptr);
std::optional<OdeCandidate> guess_ode(const ModSeries& a, int r_max, int d_max, const GuessOptions& opt = {},
                                      GuessStats* stats = nullptr);

/// Checks every available equation.
bool annihilates(const RecurrenceCandidate& c, const std::vector<std::uint16_t>& terms);
bool annihilates(const OdeCandidate& c, const std::vector<std::uint16_t>& terms);

/// Some nonzero vector of the right kernel of M over F_p, if any.
std::optional<Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1>> kernel_vector(ModMatrix M, std::uint64_t p);

std::string guess_json(const ModSeries& a, int r_max, int d_max, const GuessStats& stats,
                       const std::optional<RecurrenceCandidate>& rec, const std::optional<OdeCandidate>& ode,
                       bool double_prime = false);

}  // namespace octwalk
