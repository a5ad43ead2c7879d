#include "octwalk/reduce.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include <Eigen/Core>

#include "octwalk/cone_lp.hpp"

namespace octwalk {

namespace {

std::array<int, 2> others(int c)
{
    if (c == 0) return {1, 2};
    if (c == 1) return {0, 2};
    return {0, 1};
}

Rational make_rational(long long num, long long den)
{
    long long g = std::gcd(num, den);
    if (g == 0) g = 1;
    return {num / g, den / g};
}

}  // namespace

char axis_name(int c) { return "xyz"[c]; }

std::string Rational::str() const
{
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

bool ProjectionCertificate::holds_for(StepSet s) const
{
    const auto [a, b] = others(dropped);
    for (const Step& st : s.steps()) {
        // s_c >= l1 s_a + l2 s_b, cleared of denominators.
        long long lhs = static_cast<long long>(st[dropped]) * lambda[0].den * lambda[1].den;
        long long rhs = lambda[0].num * lambda[1].den * st[a] + lambda[1].num * lambda[0].den * st[b];
        if (lambda[0].num < 0 || lambda[1].num < 0 || lhs < rhs) return false;
    }
    return true;
}

std::string ProjectionCertificate::to_json() const
{
    return std::string("{\"drop\":\"") + axis_name(dropped) + "\",\"lambda\":[\"" + lambda[0].str() +
           "\",\"" + lambda[1].str() + "\"]}";
}

std::optional<ProjectionCertificate> projectible(StepSet s)
{
    const auto steps = s.steps();
    const auto n = static_cast<Eigen::Index>(steps.size());
    for (int c = 0; c < 3; ++c) {
        const auto [a, b] = others(c);
        Eigen::Matrix<long long, Eigen::Dynamic, 2> A(n, 2);
        Eigen::Matrix<long long, Eigen::Dynamic, 1> rhs(n);
        for (Eigen::Index r = 0; r < n; ++r) {
            A(r, 0) = steps[r][a];
            A(r, 1) = steps[r][b];
            rhs(r) = steps[r][c];
        }
        if (auto p = nonneg_feasible_point(A, rhs))
            return ProjectionCertificate{c, {make_rational(p->num[0], p->den), make_rational(p->num[1], p->den)}};
    }
    return std::nullopt;
}

StepSet HadamardDecomposition::reassemble() const
{
    std::set<Step> support;
    auto add = [&](const Step& m) {
        if (!support.insert(m).second) throw std::logic_error("Hadamard reassembly has a coefficient 2");
    };
    for (const Step& u : U) add(u);
    for (const Step& v : V)
        for (const Step& w : W) add({v[0] + w[0], v[1] + w[1], v[2] + w[2]});
    std::vector<Step> steps(support.begin(), support.end());
    return StepSet::from_steps(steps);
}

std::vector<HadamardDecomposition> hadamard_decompositions(StepSet s)
{
    const auto steps = s.steps();
    std::vector<HadamardDecomposition> out;
    auto lift1 = [](int c, int e) { Step m{0, 0, 0}; m[c] = e; return m; };
    auto lift2 = [](int c, int ea, int eb) {
        const auto [a, b] = others(c);
        Step m{0, 0, 0};
        m[a] = ea;
        m[b] = eb;
        return m;
    };
    // Fibres over the (a, b) projection must all carry the same set of
    // exponents of the distinguished variable.
    auto common_fibre = [](const std::map<std::array<int, 2>, std::set<int>>& fib) -> std::optional<std::set<int>> {
        if (fib.empty()) return std::nullopt;
        const auto& first = fib.begin()->second;
        for (const auto& [key, vals] : fib)
            if (vals != first) return std::nullopt;
        return first;
    };

    for (int c = 0; c < 3; ++c) {
        const auto [a, b] = others(c);
        std::map<std::array<int, 2>, std::set<int>> fib;
        HadamardDecomposition d{HadamardKind::OnePlusTwo, c, {}, {}, {}};
        for (const Step& st : steps) {
            if (st[a] == 0 && st[b] == 0) d.U.push_back(lift1(c, st[c]));
            else fib[{st[a], st[b]}].insert(st[c]);
        }
        if (auto common = common_fibre(fib)) {
            for (int e : *common) d.V.push_back(lift1(c, e));
            for (const auto& [key, vals] : fib) d.W.push_back(lift2(c, key[0], key[1]));
            out.push_back(std::move(d));
        }
    }
    for (int c = 2; c >= 0; --c) {
        const auto [a, b] = others(c);
        std::map<std::array<int, 2>, std::set<int>> fib;
        HadamardDecomposition d{HadamardKind::TwoPlusOne, c, {}, {}, {}};
        for (const Step& st : steps) {
            if (st[c] == 0) d.U.push_back(lift2(c, st[a], st[b]));
            else fib[{st[a], st[b]}].insert(st[c]);
        }
        if (auto common = common_fibre(fib)) {
            for (const auto& [key, vals] : fib) d.V.push_back(lift2(c, key[0], key[1]));
            for (int e : *common) d.W.push_back(lift1(c, e));
            out.push_back(std::move(d));
        }
    }
    return out;
}

std::optional<HadamardDecomposition> hadamard_decompose(StepSet s)
{
    auto all = hadamard_decompositions(s);
    if (all.empty()) return std::nullopt;
    return all.front();
}

}  // namespace octwalk
