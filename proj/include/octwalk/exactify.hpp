#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "octwalk/countkernel.hpp"

namespace octwalk {

using BigInt = boost::multiprecision::mpz_int;

struct PrimePlan {
    std::vector<std::uint32_t> primes;
    BigInt capacity;
};

/// All primes in (2^14, 2^15), decreasing.
const std::vector<std::uint32_t>& prime_table();

/// ceil(N log|S| / (14 log 2)), at least 1, evaluated exactly.
std::size_t prime_count(int step_count, int horizon);

PrimePlan select_primes(int step_count, int horizon);

struct ExactSeries {
    StepSet model;
    Target target = Target::Excursions;
    std::vector<std::uint32_t> primes;
    std::vector<BigInt> terms;
};

class InsufficientCapacity : public std::runtime_error {
public:
    InsufficientCapacity(const std::string& what, std::size_t required)
        : std::runtime_error(what), required_primes(required) {}
    std::size_t required_primes;
};

class InconsistentResidues : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unique x in [0, prod moduli) with x = r_i mod m_i (Garner).
BigInt crt(std::span<const std::uint64_t> residues, std::span<const std::uint64_t> moduli);

/// Incremental Garner reconstruction; primes may be streamed in one at a time.
class CrtAccumulator {
public:
    void add(const ModSeries& image);
    const std::vector<BigInt>& values() const { return values_; }
    const BigInt& modulus() const { return modulus_; }
    const std::vector<std::uint32_t>& primes() const { return primes_; }

private:
    std::vector<BigInt> values_;
    BigInt modulus_ = 1;
    std::vector<std::uint32_t> primes_;
    std::optional<ModSeries> header_;
};

/// Refuses unless the product of the primes exceeds |S|^N, and re-checks
/// every term against every image.
ExactSeries crt_reconstruct(const std::vector<ModSeries>& images, unsigned threads = 1);

/// Independent exact DP over arbitrary-precision integers.
std::vector<BigInt> exact_walks_dp(StepSet s, int horizon, Target target);

void write_exact(const std::filesystem::path& file, const ExactSeries& e);
ExactSeries read_exact(const std::filesystem::path& file);

}  // namespace octwalk
