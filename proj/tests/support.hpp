#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "octwalk/stepset.hpp"

namespace octwalk::testing {

inline const StepSet kSStar = StepSet::from_diagram("100000000 00001010 000010000");
inline const StepSet kMDagger = StepSet::from_diagram("110111000 11100110 000110111");

inline std::vector<StepSet> random_models(std::size_t count, std::uint64_t seed, int min_size = 1, int max_size = 26)
{
    std::mt19937_64 rng(seed);
    std::vector<StepSet> out;
    while (out.size() < count) {
        StepSet s(static_cast<std::uint32_t>(rng() & (kMaskLimit - 1)));
        // Thin out dense masks so small models are represented.
        s = StepSet(s.mask() & static_cast<std::uint32_t>(rng() & (kMaskLimit - 1)));
        if (s.size() >= min_size && s.size() <= max_size) out.push_back(s);
    }
    return out;
}

/// Walks in the quarter plane with the given (possibly repeated) steps.
inline std::vector<std::uint64_t> quadrant_walks(const std::vector<std::array<int, 2>>& steps, int n_max)
{
    std::map<std::array<int, 2>, std::uint64_t> layer{{{0, 0}, 1}};
    std::vector<std::uint64_t> out{1};
    for (int n = 1; n <= n_max; ++n) {
        std::map<std::array<int, 2>, std::uint64_t> next;
        for (const auto& [p, c] : layer)
            for (const auto& s : steps) {
                const std::array<int, 2> q{p[0] + s[0], p[1] + s[1]};
                if (q[0] >= 0 && q[1] >= 0) next[q] += c;
            }
        layer = std::move(next);
        std::uint64_t total = 0;
        for (const auto& [p, c] : layer) total += c;
        out.push_back(total);
    }
    return out;
}

}  // namespace octwalk::testing
