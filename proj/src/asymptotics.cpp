#include "octwalk/asymptotics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <boost/multiprecision/eigen.hpp>

namespace octwalk {

namespace mp = boost::multiprecision;
using Rational = mp::mpq_rational;

PrecisionScope::PrecisionScope(unsigned digits) : saved_(Real::default_precision())
{
    Real::default_precision(digits);
}

PrecisionScope::~PrecisionScope() { Real::default_precision(saved_); }

unsigned working_digits(int j, unsigned target) { return 10 + 2 * static_cast<unsigned>(j) + target; }

RatioSequence ratio_sequence(const std::vector<BigInt>& a, int m, unsigned digits)
{
    if (m < 1) throw std::invalid_argument("period must be positive");
    PrecisionScope scope(digits);
    RatioSequence u;
    u.period = m;
    u.digits = digits;
    u.values.resize(a.size());
    u.defined.assign(a.size(), false);
    bool late_nonzero = false;
    for (std::size_t n = static_cast<std::size_t>(m); n < a.size(); ++n) {
        if (a[n - m] == 0) continue;
        u.values[n] = Real(a[n]) / Real(a[n - m]);
        u.defined[n] = true;
        if (n + a.size() / 4 >= a.size() && a[n] != 0) late_nonzero = true;
    }
    if (!late_nonzero) throw DegenerateSeries("degenerate series: all late terms vanish");
    return u;
}

Accelerated richardson(const std::vector<Real>& v, const std::vector<bool>& defined, long n, int j, int m,
                       unsigned need)
{
    if (j < 0 || m < 1) throw std::invalid_argument("richardson needs j >= 0 and m >= 1");
    for (int k = 0; k <= j; ++k) {
        const long idx = n - static_cast<long>(k) * m;
        if (idx < 0 || idx >= static_cast<long>(defined.size()) || !defined[idx])
            throw DegenerateSeries("richardson window reaches an undefined term at index " + std::to_string(idx));
    }
    const unsigned prec = v[n].precision();
    PrecisionScope scope(prec);
    const Real t = Real(n) / m;
    Real sum = 0, mag = 0, binom = 1, fact = 1;
    for (int k = 1; k <= j; ++k) fact *= k;
    for (int k = 0; k <= j; ++k) {
        if (k > 0) binom = binom * (j - k + 1) / k;
        Real term = binom * pow(t - k, j) * v[n - static_cast<long>(k) * m];
        if (k % 2) term = -term;
        sum += term;
        mag += abs(term);
    }
    Accelerated out;
    out.value = sum / fact;
    out.digits_lost = sum == 0 ? double(prec) : static_cast<double>(log10(mag / abs(sum)));
    out.reliable = double(prec) - out.digits_lost >= double(need);
    return out;
}

Accelerated richardson(const RatioSequence& u, long n, int j, unsigned need)
{
    return richardson(u.values, u.defined, n, j, u.period, need);
}

Accelerated richardson_doubling(const RatioSequence& u, long n, int i, unsigned need)
{
    if (i < 0 || n < 1) throw std::invalid_argument("doubling needs i >= 0 and n >= 1");
    std::vector<Real> base;
    for (int k = 0; k <= i; ++k) {
        const long idx = n << k;
        if (!u.has(idx)) throw DegenerateSeries("doubling window reaches an undefined term at index " + std::to_string(idx));
        base.push_back(u[idx]);
    }
    const unsigned prec = base.front().precision();
    PrecisionScope scope(prec);
    // Track the combination coefficients to measure cancellation.
    std::vector<std::vector<Real>> coef(static_cast<std::size_t>(i) + 1, std::vector<Real>(static_cast<std::size_t>(i) + 1, Real(0)));
    for (int k = 0; k <= i; ++k) coef[k][k] = 1;
    for (int l = 1; l <= i; ++l) {
        const Real w = pow(Real(2), l);
        for (int k = i; k >= l; --k)
            for (int c = 0; c <= i; ++c) coef[k][c] = (w * coef[k][c] - coef[k - 1][c]) / (w - 1);
    }
    Accelerated out;
    Real sum = 0, mag = 0;
    for (int c = 0; c <= i; ++c) {
        Real term = coef[i][c] * base[c];
        sum += term;
        mag += abs(term);
    }
    out.value = sum;
    out.digits_lost = sum == 0 ? double(prec) : static_cast<double>(log10(mag / abs(sum)));
    out.reliable = double(prec) - out.digits_lost >= double(need);
    return out;
}

namespace {

long last_nonzero_at_or_below(const std::vector<BigInt>& a, long n, int m)
{
    for (long k = n; k >= 0; --k)
        if (a[k] != 0 && (k - n) % m == 0) return k;
    return -1;
}

}  // namespace

AsymptoticEstimate estimate_growth(const std::vector<BigInt>& a, const GrowthOptions& opt)
{
    const long N = static_cast<long>(a.size()) - 1;
    const long usable = std::count_if(a.begin(), a.end(), [](const BigInt& v) { return v != 0; });
    if (usable < 64) throw NoPowerLawFit("need at least 64 nonzero terms, have " + std::to_string(usable));
    long end = opt.window_end < 0 ? N : std::min(opt.window_end, N);
    while (end >= 0 && a[end] == 0) --end;
    const int j = opt.order;

    long g = opt.lattice_period;
    if (g <= 0) {
        g = 0;
        long prev = -1;
        for (long n = std::max(0L, end - 128); n <= end; ++n)
            if (a[n] != 0) {
                if (prev >= 0) g = std::gcd(g, n - prev);
                prev = n;
            }
        if (g == 0) g = 1;
    }
    std::vector<int> candidates;
    for (int m : {1, 2, 3, 4, 6})
        if (m % g == 0) candidates.push_back(m);
    if (candidates.empty()) candidates.push_back(static_cast<int>(g));

    const unsigned digits = working_digits(j, opt.target_digits);
    PrecisionScope scope(digits);
    AsymptoticEstimate est;

    // Smallest period whose ratio tail is positive and monotone.
    constexpr int kTail = 24;
    int chosen = -1;
    RatioSequence u;
    for (int m : candidates) {
        RatioSequence cand = ratio_sequence(a, m, digits);
        bool ok = true;
        int sign = 0;
        for (int t = 0; t < kTail && ok; ++t) {
            const long n = end - static_cast<long>(t) * m;
            if (!cand.has(n) || !cand.has(n - m) || cand[n] <= 0) { ok = false; break; }
            const Real d = cand[n] - cand[n - m];
            const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
            if (s != 0 && sign != 0 && s != sign) ok = false;
            if (s != 0) sign = s;
        }
        if (ok) {
            chosen = m;
            u = std::move(cand);
            break;
        }
    }
    if (chosen < 0) {
        chosen = candidates.front();
        u = ratio_sequence(a, chosen, digits);
        est.flags.push_back("oscillating");
    }
    const int m = chosen;
    est.period = m;

    // Geometric growth keeps the ratios bounded: their log-log slope tends to 0.
    {
        long half = end / 2;
        half -= (end - half) % m;
        while (half > 0 && !u.has(half)) half -= m;
        if (half > 0 && u.has(end) && u[end] > 0 && u[half] > 0) {
            const Real slope = log(u[end] / u[half]) / log(Real(end) / Real(half));
            if (slope > Real("0.5")) throw NoPowerLawFit("ratios diverge");
            if (slope < Real("-0.5")) throw NoPowerLawFit("ratios vanish");
        }
    }
    if (m > 1) {
        est.flags.push_back("period=" + std::to_string(m));
        bool dense = std::all_of(a.end() - 32, a.end(), [](const BigInt& v) { return v != 0; });
        if (dense) est.flags.push_back("parity-dependent");
    }

    est.window_end = end;
    est.shifted_end = last_nonzero_at_or_below(a, end - opt.window_shift, m);
    if (est.shifted_end < 0) throw NoPowerLawFit("series too short for the shifted window");

    bool reliable = true;
    auto phi_at = [&](long n) {
        Accelerated r = richardson(u, n, j, opt.target_digits);
        reliable = reliable && r.reliable;
        if (!(r.value > 0)) throw NoPowerLawFit("accelerated ratio is not positive");
        return r.value;
    };
    const Real R = phi_at(end);
    const Real R2 = phi_at(est.shifted_end);
    est.phi = m == 1 ? R : Real(pow(R, Real(1) / m));
    const Real phi2 = m == 1 ? R2 : Real(pow(R2, Real(1) / m));
    est.accuracy = abs(est.phi - phi2);

    // v_n = n (a_{n+m} - R a_n) / (R a_n m) with R = phi^m held fixed.
    std::vector<Real> v(a.size());
    std::vector<bool> vdef(a.size(), false);
    for (long n = 1; n + m <= N; ++n) {
        if (a[n] == 0) continue;
        const Real an(a[n]);
        v[n] = Real(n) * (Real(a[n + m]) - R * an) / (R * an * m);
        vdef[n] = true;
    }
    auto alpha_at = [&](long n) {
        Accelerated r = richardson(v, vdef, n, j, m, opt.target_digits / 2);
        reliable = reliable && r.reliable;
        return r.value;
    };
    est.alpha = alpha_at(end - m);
    est.alpha_accuracy = abs(est.alpha - alpha_at(est.shifted_end - m));
    if (!reliable) est.flags.push_back("precision-loss");
    return est;
}

namespace {

void gram_schmidt(const BigMatrix& b, std::vector<std::vector<Rational>>& mu, std::vector<Rational>& B)
{
    const auto n = b.rows(), dim = b.cols();
    std::vector<std::vector<Rational>> star(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(dim)));
    mu.assign(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n), Rational(0)));
    B.assign(static_cast<std::size_t>(n), Rational(0));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < dim; ++c) star[i][c] = Rational(b(i, c));
        for (Eigen::Index k = 0; k < i; ++k) {
            Rational dot = 0;
            for (Eigen::Index c = 0; c < dim; ++c) dot += Rational(b(i, c)) * star[k][c];
            mu[i][k] = B[k] == 0 ? Rational(0) : Rational(dot / B[k]);
            for (Eigen::Index c = 0; c < dim; ++c) star[i][c] -= mu[i][k] * star[k][c];
        }
        for (Eigen::Index c = 0; c < dim; ++c) B[i] += star[i][c] * star[i][c];
    }
}

BigInt round_rational(const Rational& q)
{
    // floor(q + 1/2)
    Rational h = q + Rational(1, 2);
    BigInt num = mp::numerator(h), den = mp::denominator(h);
    BigInt r;
    mpz_fdiv_q(r.backend().data(), num.backend().data(), den.backend().data());
    return r;
}

}  // namespace

BigMatrix lll_reduce(BigMatrix b)
{
    const auto n = b.rows();
    if (n < 2) return b;
    std::vector<std::vector<Rational>> mu;
    std::vector<Rational> B;
    gram_schmidt(b, mu, B);
    const Rational delta(3, 4);
    auto size_reduce = [&](Eigen::Index k, Eigen::Index l) {
        if (abs(mu[k][l]) * 2 <= 1) return;
        const BigInt q = round_rational(mu[k][l]);
        b.row(k) -= q * b.row(l);
        for (Eigen::Index i = 0; i < l; ++i) mu[k][i] -= Rational(q) * mu[l][i];
        mu[k][l] -= Rational(q);
    };
    Eigen::Index k = 1;
    while (k < n) {
        size_reduce(k, k - 1);
        if (B[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
            b.row(k).swap(b.row(k - 1));
            gram_schmidt(b, mu, B);
            k = std::max<Eigen::Index>(1, k - 1);
        } else {
            for (Eigen::Index l = k - 2; l >= 0; --l) size_reduce(k, l);
            ++k;
        }
    }
    return b;
}

Real refine_root(const std::vector<BigInt>& coeffs, const Real& x)
{
    Real r = x;
    for (int it = 0; it < 200; ++it) {
        Real p = 0, dp = 0;
        for (auto c = coeffs.rbegin(); c != coeffs.rend(); ++c) {
            dp = dp * r + p;
            p = p * r + Real(*c);
        }
        if (dp == 0) break;
        const Real step = p / dp;
        r -= step;
        if (abs(step) <= abs(r) * pow(Real(10), -static_cast<int>(r.precision()) + 2)) break;
    }
    return r;
}

std::optional<MinPolyCandidate> recognize_constant(const Real& x, unsigned digits, int d_max, const BigInt& H)
{
    if (digits < 15) throw std::invalid_argument("recognize_constant needs at least 15 digits");
    if (d_max < 1) throw std::invalid_argument("d_max must be at least 1");
    constexpr int kGuard = 2;
    const int D = static_cast<int>(digits) - kGuard;
    PrecisionScope scope(digits + 20);
    const Real xs = x;
    const Real scale = pow(Real(10), D);
    const Real tol = pow(Real(10), -D) * std::max(Real(1), Real(abs(xs)));

    for (int d = 1; d <= d_max; ++d) {
        BigMatrix basis = BigMatrix::Zero(d + 1, d + 2);
        Real power = 1;
        for (int i = 0; i <= d; ++i) {
            basis(i, i) = 1;
            basis(i, d + 1) = BigInt(round(power * scale));
            power *= xs;
        }
        const BigMatrix red = lll_reduce(basis);
        // A chance relation at this precision has height near 10^(D/(d+1)).
        BigInt bound = BigInt(floor(pow(Real(10), Real(D) / (d + 1) - 1)));
        if (H < bound) bound = H;
        for (Eigen::Index r = 0; r < red.rows(); ++r) {
            std::vector<BigInt> c(static_cast<std::size_t>(d) + 1);
            for (int i = 0; i <= d; ++i) c[i] = red(r, i);
            if (c[d] == 0) continue;
            BigInt g = 0;
            for (const auto& v : c) g = mp::gcd(g, v);
            for (auto& v : c) v /= g;
            if (c[d] < 0)
                for (auto& v : c) v = -v;
            BigInt height = 0;
            for (const auto& v : c) height = std::max(height, BigInt(abs(v)));
            if (height > bound) continue;
            const Real root = refine_root(c, xs);
            if (abs(root - xs) > tol) continue;
            MinPolyCandidate out;
            out.coeffs = c;
            out.root = root;
            Real p = 0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) p = p * xs + Real(*it);
            out.residual = abs(p);
            out.height_bound = bound;
            return out;
        }
    }
    return std::nullopt;
}

std::string MinPolyCandidate::to_string() const
{
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        const BigInt& c = coeffs[static_cast<std::size_t>(i)];
        if (c == 0) continue;
        const BigInt a = abs(c);
        if (first) os << (c < 0 ? "-" : "");
        else os << (c < 0 ? " - " : " + ");
        first = false;
        if (a != 1 || i == 0) os << a << (i > 0 ? "*" : "");
        if (i > 0) os << 'x';
        if (i > 1) os << '^' << i;
    }
    return first ? "0" : os.str();
}

std::string format_real(const Real& x, int digits) { return x.str(digits, std::ios_base::fmtflags(0)); }

std::string estimate_csv_header()
{
    return "model,target,m,phi_estimate,phi_minpoly,alpha_estimate,accuracy,window,flags";
}

std::string estimate_csv_row(const std::string& model, Target target, const AsymptoticEstimate& e,
                             const std::optional<MinPolyCandidate>& minpoly)
{
    std::ostringstream os;
    std::string flags;
    for (const auto& f : e.flags) flags += (flags.empty() ? "" : ";") + f;
    os << model << ',' << to_string(target) << ',' << e.period << ',' << format_real(e.phi, 20) << ','
       << (minpoly ? minpoly->to_string() : "") << ',' << format_real(e.alpha, 12) << ','
       << format_real(e.accuracy, 3) << ',' << e.shifted_end << ".." << e.window_end << ',' << flags;
    return os.str();
}

}  // namespace octwalk
