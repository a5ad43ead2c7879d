#pragma once

#include <cstdint>
#include <stdexcept>

namespace octwalk {

/// Arithmetic modulo a prime below 2^63.
class PrimeField {
public:
    constexpr explicit PrimeField(std::uint64_t p) : p_(p) {}

    constexpr std::uint64_t modulus() const { return p_; }
    constexpr std::uint64_t reduce(std::uint64_t a) const { return a % p_; }
    constexpr std::uint64_t add(std::uint64_t a, std::uint64_t b) const
    {
        std::uint64_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    constexpr std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + p_ - b; }
    constexpr std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }
    constexpr std::uint64_t mul(std::uint64_t a, std::uint64_t b) const
    {
        return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p_);
    }
    constexpr std::uint64_t pow(std::uint64_t a, std::uint64_t e) const
    {
        std::uint64_t r = 1 % p_;
        for (; e; e >>= 1, a = mul(a, a))
            if (e & 1) r = mul(r, a);
        return r;
    }
    std::uint64_t inv(std::uint64_t a) const
    {
        if (a % p_ == 0) throw std::domain_error("inverse of zero");
        return pow(a, p_ - 2);
    }
    /// Signed integer mapped into the field.
    constexpr std::uint64_t from_int(long long v) const
    {
        long long r = v % static_cast<long long>(p_);
        return static_cast<std::uint64_t>(r < 0 ? r + static_cast<long long>(p_) : r);
    }

private:
    std::uint64_t p_;
};

inline constexpr std::uint64_t kMersenne61 = (1ull << 61) - 1;
inline constexpr std::uint64_t kPrime62 = (1ull << 62) - 57;

/// Deterministic primality test for 64-bit integers.
bool is_prime_u64(std::uint64_t n);

}  // namespace octwalk
