#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "octwalk/exactify.hpp"
#include "octwalk/modarith.hpp"
#include "support.hpp"

using namespace octwalk;
using octwalk::testing::kMDagger;
using octwalk::testing::kSStar;
using octwalk::testing::random_models;

namespace {

std::vector<ModSeries> images(StepSet s, int horizon, Target t, std::size_t count)
{
    std::vector<ModSeries> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(count_layers(s, horizon, prime_table()[i], t));
    return out;
}

}  // namespace

TEST_CASE("prime table")
{
    const auto& t = prime_table();
    CHECK(t.size() == 1612);
    CHECK(t.front() == 32749);
    CHECK(t.back() == 16411);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(is_prime_u64(t[i]));
        CHECK(t[i] > (1u << 14));
        CHECK(t[i] < (1u << 15));
        if (i) CHECK(t[i] < t[i - 1]);
    }
}

TEST_CASE("prime counts")
{
    CHECK(prime_count(17, 2000) == 584);
    CHECK(prime_count(15, 300) == 84);
    CHECK(prime_count(1, 50) == 1);
    CHECK(prime_count(4, 40) == 6);
    for (int k : {2, 4, 9, 26})
        for (int n : {1, 10, 100, 333}) {
            const auto plan = select_primes(k, n);
            BigInt bound = 1;
            for (int i = 0; i < n; ++i) bound *= k;
            CHECK(plan.capacity > bound);
            // Minimal count at 14 guaranteed bits per prime.
            const std::size_t m = prime_count(k, n);
            CHECK(plan.primes.size() == m);
            CHECK(bound <= BigInt(1) << (14 * m));
            if (m > 1) CHECK(bound > BigInt(1) << (14 * (m - 1)));
        }
}

TEST_CASE("CRT round trip")
{
    std::mt19937_64 rng(51);
    const auto& table = prime_table();
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 1 + rng() % 12;
        std::vector<std::uint64_t> moduli(table.begin(), table.begin() + static_cast<long>(m));
        BigInt product = 1;
        for (auto p : moduli) product *= p;
        BigInt x = 0;
        for (std::size_t i = 0; i < m; ++i) x = x * 65536 + rng() % 65536;
        x %= product;
        std::vector<std::uint64_t> residues;
        for (auto p : moduli) residues.push_back(static_cast<std::uint64_t>(BigInt(x % p)));
        CHECK(crt(residues, moduli) == x);
    }
}

TEST_CASE("exact DP agrees with brute force")
{
    for (StepSet s : random_models(40, 52, 1, 12))
        for (Target t : {Target::Excursions, Target::AllEndpoints}) {
            const auto brute = brute_force_walks(s, 9, t);
            const auto dp = exact_walks_dp(s, 9, t);
            for (int n = 0; n <= 9; ++n) CHECK(dp[n] == brute[n]);
        }
}

TEST_CASE("reconstruction of the worked example")
{
    const auto oracle = exact_walks_dp(kSStar, 40, Target::Excursions);
    CHECK(oracle[40] == BigInt("47020653859202576640"));
    const auto six = crt_reconstruct(images(kSStar, 40, Target::Excursions, 6));
    CHECK(six.terms == oracle);

    // Four primes cannot hold a_40 > 4.7e19.
    try {
        crt_reconstruct(images(kSStar, 40, Target::Excursions, 4));
        FAIL("four primes accepted");
    } catch (const InsufficientCapacity& e) {
        CHECK(e.required_primes == 6);
    }
}

TEST_CASE("incremental and batch reconstruction agree")
{
    const auto ims = images(kMDagger, 30, Target::AllEndpoints, prime_count(kMDagger.size(), 30));
    CrtAccumulator acc;
    for (const auto& im : ims) acc.add(im);
    const auto batch = crt_reconstruct(ims, 3);
    CHECK(acc.values() == batch.terms);
    CHECK(batch.terms == exact_walks_dp(kMDagger, 30, Target::AllEndpoints));
}

TEST_CASE("corrupted residues are reported")
{
    auto ims = images(kMDagger, 30, Target::AllEndpoints, prime_count(kMDagger.size(), 30) + 1);
    ims[2].terms[17] = static_cast<std::uint16_t>((ims[2].terms[17] + 1) % ims[2].prime);
    try {
        crt_reconstruct(ims);
        FAIL("corruption not detected");
    } catch (const InconsistentResidues& e) {
        const std::string what = e.what();
        CHECK(what.find("n = 17") != std::string::npos);
        CHECK(what.find(std::to_string(ims[2].prime)) != std::string::npos);
    }
}

TEST_CASE("mismatched images are rejected")
{
    auto ims = images(kSStar, 40, Target::Excursions, 6);
    ims[1] = ims[0];
    CHECK_THROWS(crt_reconstruct(ims));
}

TEST_CASE("exact files round-trip")
{
    const auto e = crt_reconstruct(images(kSStar, 40, Target::Excursions, 6));
    const auto file = std::filesystem::temp_directory_path() / "octwalk_exact_test.txt";
    write_exact(file, e);
    const auto back = read_exact(file);
    CHECK(back.model == e.model);
    CHECK(back.target == e.target);
    CHECK(back.primes == e.primes);
    CHECK(back.terms == e.terms);
    std::filesystem::remove(file);
}
