#include "octwalk/walkgroup.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <Eigen/Core>

namespace octwalk {

namespace {

constexpr std::array<std::array<int, 2>, 3> kOthers{{{1, 2}, {0, 2}, {0, 1}}};

// Laurent monomial a^e0 b^e1 from stored values and inverses.
std::uint64_t monomial(const TorusPoint& pt, int axis, const Exp2& e, const PrimeField& f)
{
    std::uint64_t r = 1;
    for (int k = 0; k < 2; ++k) {
        int c = kOthers[axis][k];
        if (e[k] > 0) r = f.mul(r, pt.v[c]);
        else if (e[k] < 0) r = f.mul(r, pt.inv[c]);
    }
    return r;
}

std::uint64_t laurent_sum(const std::vector<Exp2>& terms, const TorusPoint& pt, int axis, const PrimeField& f)
{
    std::uint64_t r = 0;
    for (const Exp2& e : terms) r = f.add(r, monomial(pt, axis, e, f));
    return r;
}

std::uint64_t random_unit(std::mt19937_64& rng, const PrimeField& f)
{
    std::uniform_int_distribution<std::uint64_t> d(2, f.modulus() - 1);
    return d(rng);
}

std::vector<TorusPoint> random_points(std::mt19937_64& rng, const PrimeField& f, int k)
{
    std::vector<TorusPoint> pts;
    for (int i = 0; i < k; ++i)
        pts.push_back(make_point(f, random_unit(rng, f), random_unit(rng, f), random_unit(rng, f)));
    return pts;
}

struct ZeroDenominator {};

// Images of the points under the word, applied right to left.
std::vector<TorusPoint> apply_word(const std::array<RationalMap, 3>& maps, const Word& w,
                                   std::vector<TorusPoint> pts, const PrimeField& f)
{
    for (auto it = w.rbegin(); it != w.rend(); ++it)
        for (auto& p : pts) {
            auto q = apply_map(maps[*it], p, f);
            if (!q) throw ZeroDenominator{};
            p = *q;
        }
    return pts;
}

std::vector<TorusPoint> apply_gen(const RationalMap& m, const std::vector<TorusPoint>& pts, const PrimeField& f)
{
    std::vector<TorusPoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        auto q = apply_map(m, p, f);
        if (!q) throw ZeroDenominator{};
        out.push_back(*q);
    }
    return out;
}

std::vector<std::uint64_t> key_of(const std::vector<TorusPoint>& pts, std::size_t k)
{
    std::vector<std::uint64_t> key;
    for (std::size_t i = 0; i < k; ++i) key.insert(key.end(), pts[i].v.begin(), pts[i].v.end());
    return key;
}

// Order of the map given by `step` on the points, or 0 if it exceeds limit.
template <typename Step1>
std::size_t orbit_length(const std::vector<TorusPoint>& start, std::size_t limit, Step1 step)
{
    auto cur = start;
    for (std::size_t t = 1; t <= limit; ++t) {
        cur = step(cur);
        if (cur == start) return t;
    }
    return 0;
}

GroupResult explore_once(StepSet s, const GroupOptions& opt, const std::array<RationalMap, 3>& maps,
                         std::uint64_t seed)
{
    const PrimeField f(kMersenne61);
    std::mt19937_64 rng(seed);
    const std::size_t k = static_cast<std::size_t>(opt.points);
    const std::size_t extra = 3;
    GroupResult res;
    res.seed = seed;
    res.points = random_points(rng, f, static_cast<int>(k + extra));

    // A dihedral subgroup <phi_a, phi_b> of order 2 ord(phi_a phi_b) beyond
    // the cap settles the question early.
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            auto step = [&](const std::vector<TorusPoint>& p) {
                return apply_gen(maps[a], apply_gen(maps[b], p, f), f);
            };
            std::vector<TorusPoint> probe(res.points.begin(), res.points.begin() + 1);
            if (orbit_length(probe, opt.cap / 2, step) == 0) {
                res.status = GroupStatus::PresumedInfinite;
                res.message = std::string("order of phi_") + "xyz"[a] + " phi_" + "xyz"[b] + " exceeds cap/2";
                return res;
            }
        }

    std::map<std::vector<std::uint64_t>, std::size_t> index;
    std::vector<Word> relators;
    res.elements.push_back({});
    res.fingerprints.push_back(res.points);
    index[key_of(res.points, k)] = 0;
    for (std::size_t h = 0; h < res.elements.size(); ++h) {
        for (std::uint8_t g = 0; g < 3; ++g) {
            auto img = apply_gen(maps[g], res.fingerprints[h], f);
            auto key = key_of(img, k);
            auto it = index.find(key);
            if (it != index.end()) {
                const auto& old = res.fingerprints[it->second];
                if (!std::equal(img.begin() + static_cast<long>(k), img.end(), old.begin() + static_cast<long>(k))) {
                    res.status = GroupStatus::Failed;
                    res.message = "fingerprint collision not confirmed on verification points";
                    return res;
                }
                Word rel(res.elements[it->second].rbegin(), res.elements[it->second].rend());
                rel.push_back(g);
                rel.insert(rel.end(), res.elements[h].begin(), res.elements[h].end());
                Word n = normalize_relator(rel);
                if (!n.empty()) relators.push_back(std::move(n));
                continue;
            }
            if (res.elements.size() >= opt.cap) {
                res.status = GroupStatus::PresumedInfinite;
                res.message = "more than " + std::to_string(opt.cap) + " elements";
                return res;
            }
            Word w{g};
            w.insert(w.end(), res.elements[h].begin(), res.elements[h].end());
            index.emplace(std::move(key), res.elements.size());
            res.elements.push_back(std::move(w));
            res.fingerprints.push_back(std::move(img));
        }
    }
    std::sort(relators.begin(), relators.end(), [](const Word& a, const Word& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    relators.erase(std::unique(relators.begin(), relators.end()), relators.end());
    res.relators = std::move(relators);
    res.status = GroupStatus::Finite;
    res.order = res.elements.size();

    for (const Word& w : res.elements) {
        std::vector<TorusPoint> probe(res.points.begin(), res.points.begin() + static_cast<long>(k));
        std::size_t ord = orbit_length(probe, res.order, [&](const std::vector<TorusPoint>& p) {
            return apply_word(maps, w, p, f);
        });
        ++res.element_orders[static_cast<int>(ord)];
    }
    res.abelian = true;
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            if (apply_word(maps, {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)}, res.points, f) !=
                apply_word(maps, {static_cast<std::uint8_t>(b), static_cast<std::uint8_t>(a)}, res.points, f))
                res.abelian = false;
    (void)s;
    return res;
}

}  // namespace

CharPoly::CharPoly(StepSet s)
{
    for (const Step& st : s.steps())
        for (int axis = 0; axis < 3; ++axis)
            slices_[axis][st[axis] + 1].push_back({st[kOthers[axis][0]], st[kOthers[axis][1]]});
}

StepSet CharPoly::reconstruct() const
{
    std::vector<Step> steps;
    for (int v = -1; v <= 1; ++v)
        for (const Exp2& e : slice(0, v)) steps.push_back({v, e[0], e[1]});
    return StepSet::from_steps(steps);
}

std::array<RationalMap, 3> generator_maps(StepSet s)
{
    CharPoly cp(s);
    std::array<RationalMap, 3> maps;
    for (int axis = 0; axis < 3; ++axis) {
        if (cp.slice(axis, -1).empty() || cp.slice(axis, 1).empty())
            throw MapUndefined(std::string("map undefined: no step with ") + "xyz"[axis] + " = " +
                               (cp.slice(axis, -1).empty() ? "-1" : "+1"));
        maps[axis] = {axis, cp.slice(axis, -1), cp.slice(axis, 1)};
    }
    return maps;
}

TorusPoint make_point(const PrimeField& f, std::uint64_t x, std::uint64_t y, std::uint64_t z)
{
    TorusPoint p;
    p.v = {f.reduce(x), f.reduce(y), f.reduce(z)};
    for (int c = 0; c < 3; ++c) p.inv[c] = f.inv(p.v[c]);
    return p;
}

std::optional<TorusPoint> apply_map(const RationalMap& m, const TorusPoint& pt, const PrimeField& f)
{
    const std::uint64_t num = laurent_sum(m.numerator, pt, m.axis, f);
    const std::uint64_t den = laurent_sum(m.denominator, pt, m.axis, f);
    if (num == 0 || den == 0) return std::nullopt;
    // One inversion yields both 1/num and 1/den.
    const std::uint64_t inv_nd = f.inv(f.mul(num, den));
    TorusPoint q = pt;
    q.v[m.axis] = f.mul(f.mul(pt.inv[m.axis], num), f.mul(num, inv_nd));
    q.inv[m.axis] = f.mul(f.mul(pt.v[m.axis], den), f.mul(den, inv_nd));
    return q;
}

std::uint64_t eval_char_poly(StepSet s, const TorusPoint& pt, const PrimeField& f)
{
    std::uint64_t r = 0;
    for (const Step& st : s.steps()) {
        std::uint64_t t = 1;
        for (int c = 0; c < 3; ++c) {
            if (st[c] > 0) t = f.mul(t, pt.v[c]);
            else if (st[c] < 0) t = f.mul(t, pt.inv[c]);
        }
        r = f.add(r, t);
    }
    return r;
}

Word normalize_relator(Word w)
{
    Word st;
    for (auto g : w) {
        if (!st.empty() && st.back() == g) st.pop_back();
        else st.push_back(g);
    }
    std::size_t lo = 0, hi = st.size();
    while (hi - lo >= 2 && st[lo] == st[hi - 1]) { ++lo; --hi; }
    Word core(st.begin() + static_cast<long>(lo), st.begin() + static_cast<long>(hi));
    if (core.empty()) return core;
    Word best = core;
    Word rev(core.rbegin(), core.rend());
    for (const Word* base : {&core, &rev})
        for (std::size_t r = 0; r < base->size(); ++r) {
            Word cand(base->begin() + static_cast<long>(r), base->end());
            cand.insert(cand.end(), base->begin(), base->begin() + static_cast<long>(r));
            best = std::min(best, cand);
        }
    return best;
}

bool GroupResult::has_odd_relator() const
{
    return std::any_of(relators.begin(), relators.end(), [](const Word& w) { return w.size() % 2 == 1; });
}

std::size_t GroupResult::shortest_relator() const { return relators.empty() ? 0 : relators.front().size(); }

GroupResult explore_group(StepSet s, const GroupOptions& opt)
{
    if (opt.cap < 2) throw std::invalid_argument("group cap must be at least 2");
    if (opt.points < 3) throw std::invalid_argument("at least three evaluation points are required");
    const auto maps = generator_maps(s);
    std::uint64_t seed = opt.seed;
    for (int attempt = 0; attempt <= opt.retries; ++attempt) {
        try {
            return explore_once(s, opt, maps, seed);
        } catch (const ZeroDenominator&) {
            seed = std::mt19937_64(seed)();
        }
    }
    GroupResult res;
    res.status = GroupStatus::Failed;
    res.seed = opt.seed;
    res.message = "evaluation hit a zero denominator on every retry";
    return res;
}

const std::vector<GroupSignature>& known_group_signatures()
{
    static const std::vector<GroupSignature> sigs{
        {"Z2xZ2xZ2", 8, true, {{1, 1}, {2, 7}}},
        {"D12", 12, false, {{1, 1}, {2, 7}, {3, 2}, {6, 2}}},
        {"Z2xD8", 16, false, {{1, 1}, {2, 11}, {4, 4}}},
        {"S4", 24, false, {{1, 1}, {2, 9}, {3, 8}, {4, 6}}},
        {"Z2xS4", 48, false, {{1, 1}, {2, 19}, {3, 8}, {4, 12}, {6, 8}}},
    };
    return sigs;
}

std::string identify_group(const GroupResult& g)
{
    if (!g.finite()) throw std::logic_error("identify_group needs a finite group");
    for (const auto& sig : known_group_signatures())
        if (sig.order == g.order && sig.abelian == g.abelian && sig.element_orders == g.element_orders)
            return sig.name;
    return "Other(" + std::to_string(g.order) + ")";
}

OrbitSumVerdict orbit_sum_zero(StepSet s, const GroupResult& g, std::uint64_t seed)
{
    if (!g.finite()) throw std::logic_error("orbit sum needs a finite group");
    if (g.has_odd_relator()) throw std::logic_error("sign undefined: odd-length relator");
    const auto maps = generator_maps(s);
    OrbitSumVerdict verdict;
    verdict.is_zero = true;
    std::mt19937_64 rng(seed);
    for (std::uint64_t p : {kMersenne61, kPrime62}) {
        const PrimeField f(p);
        for (int attempt = 0;; ++attempt) {
            auto pts = random_points(rng, f, 3);
            std::vector<std::uint64_t> sums(pts.size(), 0);
            try {
                for (const Word& w : g.elements) {
                    auto img = apply_word(maps, w, pts, f);
                    for (std::size_t i = 0; i < pts.size(); ++i) {
                        std::uint64_t t = f.mul(f.mul(img[i].v[0], img[i].v[1]), img[i].v[2]);
                        sums[i] = w.size() % 2 ? f.sub(sums[i], t) : f.add(sums[i], t);
                    }
                }
            } catch (const ZeroDenominator&) {
                if (attempt >= 8) throw std::runtime_error("orbit sum evaluation kept hitting zero denominators");
                continue;
            }
            for (std::size_t i = 0; i < pts.size(); ++i) {
                verdict.evidence.push_back({p, pts[i], sums[i]});
                if (sums[i] != 0) verdict.is_zero = false;
            }
            break;
        }
    }

    // Monomial generators act linearly on exponent vectors.
    const bool monomial = std::all_of(maps.begin(), maps.end(), [](const RationalMap& m) {
        return m.numerator.size() == 1 && m.denominator.size() == 1;
    });
    if (monomial) {
        std::array<Eigen::Matrix3i, 3> gen;
        for (int a = 0; a < 3; ++a) {
            gen[a].setIdentity();
            gen[a](a, a) = -1;
            for (int k = 0; k < 2; ++k)
                gen[a](a, kOthers[a][k]) = maps[a].numerator[0][k] - maps[a].denominator[0][k];
        }
        for (const Word& w : g.elements) {
            Eigen::Matrix3i M = Eigen::Matrix3i::Identity();
            for (auto letter : w) M = M * gen[letter];
            Eigen::RowVector3i e = M.colwise().sum();
            Step key{e(0), e(1), e(2)};
            verdict.exact_terms[key] += w.size() % 2 ? -1 : 1;
        }
        std::erase_if(verdict.exact_terms, [](const auto& kv) { return kv.second == 0; });
        verdict.exact_zero = verdict.exact_terms.empty();
    }
    return verdict;
}

std::string word_to_string(const Word& w)
{
    std::string out;
    for (auto g : w) {
        if (!out.empty()) out += ' ';
        out += std::string("phi_") + "xyz"[g];
    }
    return out.empty() ? "id" : out;
}

std::string group_json(const GroupResult& g, const std::optional<OrbitSumVerdict>& os)
{
    std::ostringstream o;
    o << "{\"status\":\"" << (g.status == GroupStatus::Finite ? "Finite"
                              : g.status == GroupStatus::PresumedInfinite ? "PresumedInfinite" : "Failed")
      << "\"";
    if (g.finite()) {
        o << ",\"order\":" << g.order << ",\"name\":\"" << identify_group(g) << "\",\"relators\":[";
        std::size_t shown = 0;
        for (const Word& w : g.relators) {
            if (shown == 32) break;
            o << (shown++ ? "," : "") << '[';
            for (std::size_t i = 0; i < w.size(); ++i) o << (i ? "," : "") << int(w[i]);
            o << ']';
        }
        o << ']';
    }
    if (os) o << ",\"orbit_sum_zero\":" << (os->is_zero ? "true" : "false");
    o << ",\"seed\":" << g.seed << '}';
    return o.str();
}

}  // namespace octwalk
