#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "octwalk/exactify.hpp"

namespace octwalk {

using Real = boost::multiprecision::mpfr_float;

/// Sets the default precision of Real for the current scope.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned digits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

/// Decimal digits carried for order-j acceleration aimed at `target` digits.
unsigned working_digits(int j, unsigned target);

/// u_n = a_n / a_{n-m}; defined where a_{n-m} != 0.
struct RatioSequence {
    int period = 1;
    unsigned digits = 0;
    std::vector<Real> values;
    std::vector<bool> defined;

    bool has(long n) const { return n >= 0 && n < static_cast<long>(defined.size()) && defined[n]; }
    const Real& operator[](long n) const { return values.at(static_cast<std::size_t>(n)); }
};

class DegenerateSeries : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

RatioSequence ratio_sequence(const std::vector<BigInt>& a, int m, unsigned digits);

struct Accelerated {
    Real value;
    double digits_lost = 0;  ///< log10 of (sum of |terms|) / |value|
    bool reliable = true;    ///< enough digits survive the cancellation
};

/// (1/j!) sum_k (-1)^k C(j,k) (t-k)^j w_k with w_k = v_{n - k m}, t = n/m.
/// Cancels the first j terms of an expansion in 1/n. `need` is the number of
/// correct digits the caller wants to keep.
Accelerated richardson(const std::vector<Real>& v, const std::vector<bool>& defined, long n, int j, int m = 1,
                       unsigned need = 15);
Accelerated richardson(const RatioSequence& u, long n, int j, unsigned need = 15);

/// Repeated doubling on u_n, u_{2n}, ..., u_{2^i n}; i = 1 gives 2 u_{2n} - u_n.
Accelerated richardson_doubling(const RatioSequence& u, long n, int i, unsigned need = 15);

class NoPowerLawFit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GrowthOptions {
    int order = 6;                 ///< Richardson order j
    long window_end = -1;          ///< last index used; -1 for the end of the series
    int window_shift = 10;         ///< second window ends this much earlier
    unsigned target_digits = 20;
    long lattice_period = 0;       ///< hint: nonzero terms only at multiples of this
};

/// Growth c(n) phi^n n^alpha.
struct AsymptoticEstimate {
    Real phi;
    Real alpha;
    int period = 1;
    Real accuracy;        ///< |phi(window) - phi(shifted window)|
    Real alpha_accuracy;
    long window_end = 0;
    long shifted_end = 0;
    std::vector<std::string> flags;
};

AsymptoticEstimate estimate_growth(const std::vector<BigInt>& a, const GrowthOptions& opt = {});

/// Integer polynomial c_0 + c_1 x + ... + c_d x^d, coefficients low to high.
struct MinPolyCandidate {
    std::vector<BigInt> coeffs;
    Real root;
    Real residual;  ///< |P(x)| at the input estimate
    BigInt height_bound;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    std::string to_string() const;
};

/// Integer relation search on (1, x, ..., x^d) for d = 1..d_max by LLL. A
/// candidate is accepted when its height stays below both H and the size a
/// random relation would have at this precision, and its refined root lies
/// within the precision of x.
std::optional<MinPolyCandidate> recognize_constant(const Real& x, unsigned digits, int d_max, const BigInt& H);

/// LLL reduction (delta = 3/4) of the rows of an integer matrix, exact.
using BigMatrix = Eigen::Matrix<BigInt, Eigen::Dynamic, Eigen::Dynamic>;
BigMatrix lll_reduce(BigMatrix basis);

/// Real root of P closest to x, by Newton iteration from x.
Real refine_root(const std::vector<BigInt>& coeffs, const Real& x);

std::string format_real(const Real& x, int digits);

/// CSV header and row for an estimate.
std::string estimate_csv_header();
std::string estimate_csv_row(const std::string& model, Target target, const AsymptoticEstimate& e,
                             const std::optional<MinPolyCandidate>& minpoly);

}  // namespace octwalk
