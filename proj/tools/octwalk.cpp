#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "octwalk/asymptotics.hpp"
#include "octwalk/countkernel.hpp"
#include "octwalk/exactify.hpp"
#include "octwalk/guess.hpp"
#include "octwalk/lattice.hpp"
#include "octwalk/pipeline.hpp"
#include "octwalk/reduce.hpp"
#include "octwalk/stepset.hpp"
#include "octwalk/walkgroup.hpp"

using namespace octwalk;

namespace {

StepSet parse_model(const std::string& text)
{
    if (text.find(' ') != std::string::npos || text.size() >= 26) return StepSet::from_diagram(text);
    return StepSet::from_hex(text);
}

int finish(const std::string& stage, const StageResult& r)
{
    std::cerr << stage << ": " << r.completed << '/' << r.scheduled << " completed";
    if (r.failed) std::cerr << ", " << r.failed << " failed";
    std::cerr << '\n';
    return r.ok() ? 0 : 1;
}

int describe(StepSet s, const GroupOptions& gopt)
{
    std::cout << "model      " << s.hex() << "  " << s.diagram() << '\n'
              << "size       " << s.size() << '\n'
              << "canonical  " << canonical_form(s).hex() << '\n'
              << "closure    " << usable_closure(s).hex() << '\n'
              << "essential  " << essential_constraints(s) << '\n';
    if (auto cert = projectible(s)) std::cout << "projectible " << cert->to_json() << '\n';
    for (const auto& d : hadamard_decompositions(s))
        std::cout << "hadamard   " << (d.kind == HadamardKind::OnePlusTwo ? "1+2 " : "2+1 ") << axis_name(d.coordinate)
                  << '\n';
    try {
        const auto g = explore_group(s, gopt);
        std::optional<OrbitSumVerdict> os;
        if (g.finite() && !g.has_odd_relator()) os = orbit_sum_zero(s, g, gopt.seed);
        std::cout << "group      " << group_json(g, os) << '\n';
    } catch (const std::exception& e) {
        std::cout << "group      " << e.what() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Classification and counting of walks in the octant"};
    app.require_subcommand(1);

    std::string db = "octwalk-db", config;
    unsigned threads = 1;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_size, min_size;
    app.add_option("--db", db, "database directory");
    app.add_option("--config", config, "key = value configuration file");
    app.add_option("--threads", threads, "worker threads");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--max-size", max_size, "largest |S|");
    app.add_option("--min-size", min_size, "smallest |S|");

    auto* enumerate = app.add_subcommand("enumerate", "class representatives (filter 1)");
    auto* filter = app.add_subcommand("filter", "projectibility and Hadamard filters");
    auto* group = app.add_subcommand("group", "group and orbit sum filters");
    auto* report_cmd = app.add_subcommand("report", "summary tables");
    auto* run = app.add_subcommand("run", "every stage in order, resuming finished ones");

    auto* count = app.add_subcommand("count", "modular walk counts");
    std::string model, target = "excursions", out;
    std::uint32_t prime = 0;
    int horizon = 0;
    count->add_option("--model", model, "hex mask or 26-digit diagram");
    count->add_option("--target", target, "excursions|all");
    count->add_option("--prime", prime, "prime below 2^15");
    count->add_option("--n", horizon, "horizon N");
    count->add_option("--threads", threads, "worker threads");
    count->add_option("--out", out, "series file");

    auto* reconstruct = app.add_subcommand("reconstruct", "CRT reconstruction of exact counts");
    std::vector<std::string> inputs;
    reconstruct->add_option("--series", inputs, "series files of one model and target");
    reconstruct->add_option("--out", out, "exact series file");

    auto* asympt = app.add_subcommand("asympt", "growth constant estimates");
    std::string exact_file;
    int order = 6;
    long window_end = -1;
    asympt->add_option("--exact", exact_file, "exact series file");
    asympt->add_option("--order", order, "Richardson order");
    asympt->add_option("--window-end", window_end, "last index used");

    auto* guess = app.add_subcommand("guess", "recurrence and differential equation search");
    int r_max = 20, d_max = 30;
    guess->add_option("--series", inputs, "series file(s); a second prime checks the first");
    guess->add_option("--r", r_max, "largest order");
    guess->add_option("--d", d_max, "largest degree");

    auto* info = app.add_subcommand("model", "filters and group of a single model");
    info->add_option("model", model, "hex mask or 26-digit diagram")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig cfg = config.empty() ? PipelineConfig{} : PipelineConfig::load(config);
        if (app.get_option("--db")->count() || config.empty()) cfg.db = db;
        cfg.threads = threads;
        if (seed) cfg.seed = *seed;
        if (max_size) cfg.max_size = *max_size;
        if (min_size) cfg.min_size = *min_size;
        if (cfg.min_size < 1 || cfg.max_size > kStepCount || cfg.min_size > cfg.max_size)
            throw std::invalid_argument("size range must lie in [1, 26]");

        if (*enumerate) return finish("enumerate", stage_enumerate(cfg));
        if (*filter) return finish("filter", stage_filter(cfg));
        if (*group) return finish("group", stage_group(cfg));
        if (*report_cmd) {
            std::cout << report(cfg);
            return 0;
        }
        if (*run) return run_pipeline(cfg) ? 0 : 1;

        if (*count) {
            if (model.empty()) return finish("count", stage_count(cfg));
            if (!prime || horizon <= 0 || out.empty())
                throw std::invalid_argument("count needs --prime, --n and --out with --model");
            CountOptions opt;
            opt.threads = threads;
            opt.memory_budget = cfg.memory_budget_mb << 20;
            write_series(out, count_layers(parse_model(model), horizon, prime, parse_target(target), opt));
            return 0;
        }
        if (*reconstruct) {
            if (inputs.empty()) return finish("reconstruct", stage_reconstruct(cfg));
            std::vector<ModSeries> images;
            for (const auto& f : inputs) images.push_back(read_series(f));
            const auto exact = crt_reconstruct(images, threads);
            if (out.empty()) {
                for (std::size_t n = 0; n < exact.terms.size(); ++n) std::cout << n << '\t' << exact.terms[n] << '\n';
            } else {
                write_exact(out, exact);
            }
            return 0;
        }
        if (*asympt) {
            if (exact_file.empty()) return finish("asympt", stage_asympt(cfg));
            const auto exact = read_exact(exact_file);
            GrowthOptions opt;
            opt.order = order;
            opt.window_end = window_end;
            if (exact.target == Target::Excursions) opt.lattice_period = SupportLattice(exact.model).return_period();
            const auto est = estimate_growth(exact.terms, opt);
            std::optional<MinPolyCandidate> minpoly;
            if (est.accuracy > 0) {
                const Real digits = -boost::multiprecision::log10(est.accuracy);
                if (digits >= 15)
                    minpoly = recognize_constant(est.phi, static_cast<unsigned>(digits.convert_to<double>()), 4,
                                                 BigInt(100000000));
            }
            std::cout << estimate_csv_header() << '\n'
                      << estimate_csv_row(exact.model.hex(), exact.target, est, minpoly) << '\n';
            if (exact.model == model_m_dagger())
                std::cout << growth_comparison(est.phi, minpoly ? minpoly->to_string() : "none");
            return 0;
        }
        if (*guess) {
            if (inputs.empty()) return finish("guess", stage_guess(cfg));
            const auto first = read_series(inputs.front());
            GuessStats stats;
            auto rec = guess_recurrence(first, r_max, d_max, {}, &stats);
            auto ode = guess_ode(first, r_max, d_max, {});
            bool double_prime = false;
            if (rec && inputs.size() > 1) {
                auto again = guess_recurrence(read_series(inputs[1]), rec->order, rec->degree, {});
                double_prime = again && again->order == rec->order && again->degree == rec->degree;
            }
            std::cout << guess_json(first, r_max, d_max, stats, rec, ode, double_prime) << '\n';
            return 0;
        }
        if (*info) {
            GroupOptions gopt;
            gopt.seed = cfg.seed;
            gopt.cap = cfg.group_cap;
            return describe(parse_model(model), gopt);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
