#include "octwalk/exactify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "octwalk/modarith.hpp"

namespace octwalk {

namespace {

std::uint64_t mod_small(const BigInt& x, std::uint64_t p)
{
    return mpz_fdiv_ui(x.backend().data(), static_cast<unsigned long>(p));
}

BigInt power(long long base, unsigned e)
{
    BigInt r;
    mpz_ui_pow_ui(r.backend().data(), static_cast<unsigned long>(base), e);
    return r;
}

}  // namespace

const std::vector<std::uint32_t>& prime_table()
{
    static const std::vector<std::uint32_t> table = [] {
        std::vector<std::uint32_t> t;
        for (std::uint32_t p = (1u << 15) - 1; p > (1u << 14); --p)
            if (is_prime_u64(p)) t.push_back(p);
        return t;
    }();
    return table;
}

std::size_t prime_count(int step_count, int horizon)
{
    if (step_count < 1 || horizon < 0) throw std::invalid_argument("need |S| >= 1 and N >= 0");
    if (step_count == 1 || horizon == 0) return 1;
    const BigInt bound = power(step_count, static_cast<unsigned>(horizon));
    auto m = static_cast<std::size_t>(std::ceil(horizon * std::log(double(step_count)) / (14 * std::log(2.0))));
    m = std::max<std::size_t>(m, 2) - 1;
    // Smallest m with 2^(14 m) >= |S|^N.
    while (power(2, static_cast<unsigned>(14 * m)) < bound) ++m;
    return std::max<std::size_t>(m, 1);
}

PrimePlan select_primes(int step_count, int horizon)
{
    const std::size_t m = prime_count(step_count, horizon);
    const auto& table = prime_table();
    if (m > table.size())
        throw std::invalid_argument("needs " + std::to_string(m) + " primes, only " + std::to_string(table.size()) +
                                    " lie in (2^14, 2^15)");
    PrimePlan plan;
    plan.primes.assign(table.begin(), table.begin() + static_cast<long>(m));
    plan.capacity = 1;
    for (auto p : plan.primes) plan.capacity *= p;
    return plan;
}

BigInt crt(std::span<const std::uint64_t> residues, std::span<const std::uint64_t> moduli)
{
    if (residues.size() != moduli.size() || moduli.empty()) throw std::invalid_argument("crt: size mismatch");
    BigInt x = residues[0] % moduli[0], M = moduli[0];
    for (std::size_t i = 1; i < moduli.size(); ++i) {
        const PrimeField f(moduli[i]);
        const std::uint64_t t = f.mul(f.sub(f.reduce(residues[i]), mod_small(x, moduli[i])), f.inv(mod_small(M, moduli[i])));
        x += M * t;
        M *= moduli[i];
    }
    return x;
}

void CrtAccumulator::add(const ModSeries& image)
{
    if (header_) {
        if (image.model != header_->model || image.target != header_->target ||
            image.terms.size() != header_->terms.size())
            throw std::invalid_argument("images disagree on model, target or length");
        if (std::find(primes_.begin(), primes_.end(), image.prime) != primes_.end())
            throw std::invalid_argument("prime " + std::to_string(image.prime) + " used twice");
    } else {
        header_ = ModSeries{image.model, image.target, image.prime, image.terms};
        values_.assign(image.terms.size(), BigInt(0));
    }
    const PrimeField f(image.prime);
    const std::uint64_t inv_m = f.inv(mod_small(modulus_, image.prime));
    for (std::size_t n = 0; n < values_.size(); ++n) {
        const std::uint64_t t = f.mul(f.sub(image.terms[n] % image.prime, mod_small(values_[n], image.prime)), inv_m);
        if (t) values_[n] += modulus_ * t;
    }
    modulus_ *= image.prime;
    primes_.push_back(image.prime);
}

ExactSeries crt_reconstruct(const std::vector<ModSeries>& images, unsigned threads)
{
    if (images.empty()) throw std::invalid_argument("no images to reconstruct from");
    const ModSeries& first = images.front();
    const int horizon = static_cast<int>(first.terms.size()) - 1;
    BigInt capacity = 1;
    for (const auto& im : images) capacity *= im.prime;
    const BigInt bound = power(first.model.size(), static_cast<unsigned>(horizon));
    if (capacity <= bound) {
        std::size_t need = prime_count(first.model.size(), horizon);
        throw InsufficientCapacity("product of " + std::to_string(images.size()) + " primes does not exceed |S|^N; " +
                                       std::to_string(need) + " primes from the table are required",
                                   need);
    }

    ExactSeries out;
    out.model = first.model;
    out.target = first.target;
    out.terms.assign(first.terms.size(), BigInt(0));
    for (const auto& im : images) {
        if (im.model != first.model || im.target != first.target || im.terms.size() != first.terms.size())
            throw std::invalid_argument("images disagree on model, target or length");
        out.primes.push_back(im.prime);
    }
    std::vector<std::uint64_t> moduli(out.primes.begin(), out.primes.end());
    for (std::size_t i = 0; i < moduli.size(); ++i)
        for (std::size_t j = i + 1; j < moduli.size(); ++j)
            if (moduli[i] == moduli[j]) throw std::invalid_argument("prime " + std::to_string(moduli[i]) + " used twice");

    auto work = [&](std::size_t lo, std::size_t hi) {
        std::vector<std::uint64_t> res(images.size());
        for (std::size_t n = lo; n < hi; ++n) {
            for (std::size_t i = 0; i < images.size(); ++i) res[i] = images[i].terms[n];
            out.terms[n] = crt(res, moduli);
        }
    };
    threads = std::max(1u, threads);
    const std::size_t len = out.terms.size(), chunk = (len + threads - 1) / threads;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t lo = t * chunk, hi = std::min(len, lo + chunk);
        if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& t : pool) t.join();

    for (std::size_t n = 0; n < len; ++n)
        for (const auto& im : images)
            if (mod_small(out.terms[n], im.prime) != im.terms[n] % im.prime)
                throw InconsistentResidues("congruence fails at n = " + std::to_string(n) + " for prime " +
                                           std::to_string(im.prime));

    // A corrupted residue sends a_n far above the trivial bound |S|^n.
    BigInt limit = 1;
    for (std::size_t n = 0; n < len; limit *= first.model.size(), ++n) {
        if (out.terms[n] <= limit) continue;
        std::string culprit = "unknown";
        for (std::size_t skip = 0; skip < images.size(); ++skip) {
            std::vector<std::uint64_t> res, mods;
            BigInt cap = 1;
            for (std::size_t i = 0; i < images.size(); ++i)
                if (i != skip) {
                    res.push_back(images[i].terms[n]);
                    mods.push_back(moduli[i]);
                    cap *= moduli[i];
                }
            if (cap > limit && crt(res, mods) <= limit) {
                culprit = std::to_string(moduli[skip]);
                break;
            }
        }
        throw InconsistentResidues("term n = " + std::to_string(n) + " exceeds |S|^n; inconsistent residue for prime " +
                                   culprit);
    }
    return out;
}

std::vector<BigInt> exact_walks_dp(StepSet s, int horizon, Target target)
{
    if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
    const auto steps = s.steps();
    const long long side = horizon + 2;
    auto at = [side](long long i, long long j, long long k) { return static_cast<std::size_t>((k * side + j) * side + i); };
    std::vector<BigInt> cur(static_cast<std::size_t>(side * side * side)), next(cur.size());
    cur[at(0, 0, 0)] = 1;
    std::vector<BigInt> out;
    for (int n = 0;; ++n) {
        // Excursions can only use points within N - n of the origin per axis.
        const long long lim = target == Target::Excursions ? std::min(n, horizon - n) : n;
        if (target == Target::Excursions) out.push_back(cur[at(0, 0, 0)]);
        else {
            BigInt total = 0;
            for (long long k = 0; k <= lim; ++k)
                for (long long j = 0; j <= lim; ++j)
                    for (long long i = 0; i <= lim; ++i) total += cur[at(i, j, k)];
            out.push_back(total);
        }
        if (n == horizon) break;
        const long long nlim = target == Target::Excursions ? std::min(n + 1, horizon - n - 1) : n + 1;
        for (long long k = 0; k <= nlim; ++k)
            for (long long j = 0; j <= nlim; ++j)
                for (long long i = 0; i <= nlim; ++i) {
                    BigInt& v = next[at(i, j, k)];
                    v = 0;
                    for (const Step& st : steps) {
                        long long a = i - st[0], b = j - st[1], c = k - st[2];
                        if (a < 0 || b < 0 || c < 0 || a > lim || b > lim || c > lim) continue;
                        v += cur[at(a, b, c)];
                    }
                }
        std::swap(cur, next);
    }
    return out;
}

void write_exact(const std::filesystem::path& file, const ExactSeries& e)
{
    std::ofstream os(file);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    os << "# model " << e.model.hex() << "\n# target " << to_string(e.target) << "\n# primes";
    for (auto p : e.primes) os << ' ' << p;
    os << '\n';
    for (std::size_t n = 0; n < e.terms.size(); ++n) os << n << '\t' << e.terms[n] << '\n';
}

ExactSeries read_exact(const std::filesystem::path& file)
{
    std::ifstream is(file);
    if (!is) throw std::runtime_error("cannot read " + file.string());
    ExactSeries e;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == '#') {
            std::string hash, key;
            ls >> hash >> key;
            if (key == "model") {
                std::string hex;
                ls >> hex;
                e.model = StepSet::from_hex(hex);
            } else if (key == "target") {
                std::string t;
                ls >> t;
                e.target = parse_target(t);
            } else if (key == "primes") {
                for (std::uint32_t p; ls >> p;) e.primes.push_back(p);
            }
            continue;
        }
        std::size_t n;
        std::string value;
        if (!(ls >> n >> value) || n != e.terms.size()) throw std::runtime_error("bad line in " + file.string());
        e.terms.emplace_back(value);
    }
    return e;
}

}  // namespace octwalk
