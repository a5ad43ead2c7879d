#include "octwalk/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "octwalk/exactify.hpp"
#include "octwalk/guess.hpp"
#include "octwalk/lattice.hpp"
#include "octwalk/reduce.hpp"
#include "octwalk/walkgroup.hpp"

namespace octwalk {

using json = nlohmann::json;

namespace {

constexpr const char* kDbVersion = "octwalk-db 1";

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value)
{
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw std::invalid_argument("config: bad value for " + key + ": " + value);
    return out;
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string read_file(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> read_lines(const fs::path& file)
{
    std::vector<std::string> out;
    std::istringstream in(read_file(file));
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(line);
    return out;
}

std::vector<ModelRecord> read_models(const fs::path& file)
{
    std::vector<ModelRecord> out;
    for (const auto& line : read_lines(file)) out.push_back(parse_model_line(line));
    return out;
}

std::string models_text(const std::vector<ModelRecord>& models)
{
    std::string out;
    for (const auto& m : models) out += format_model_line(m) + '\n';
    return out;
}

// Runs fn(0..n-1) on a pool; each index is claimed by exactly one worker.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn)
{
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < n;) fn(i);
    };
    if (threads == 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

std::string shard_name(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "shard_%04zu.txt", i);
    return buf;
}

// Produces every missing shard file under dir, then returns all shard
// contents in shard order. A shard file exists only once complete.
std::vector<std::string> run_shards(const fs::path& dir, std::size_t shards, unsigned threads,
                                    const std::function<std::string(std::size_t)>& fn)
{
    fs::create_directories(dir);
    parallel_for(shards, threads, [&](std::size_t i) {
        const auto file = dir / shard_name(i);
        if (!fs::exists(file)) write_atomic(file, fn(i));
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < shards; ++i) out.push_back(read_file(dir / shard_name(i)));
    return out;
}

std::pair<std::size_t, std::size_t> shard_bounds(std::size_t n, std::size_t shards, std::size_t i)
{
    return {n * i / shards, n * (i + 1) / shards};
}

std::string error_line(const std::string& stage, const std::string& model, const std::string& message)
{
    return json{{"stage", stage}, {"model", model}, {"message", message}}.dump();
}

json steps_json(const std::vector<Step>& steps)
{
    json out = json::array();
    for (const auto& s : steps) out.push_back({s[0], s[1], s[2]});
    return out;
}

json decomposition_json(const HadamardDecomposition& d)
{
    return {{"kind", d.kind == HadamardKind::OnePlusTwo ? "1+2" : "2+1"},
            {"axis", std::string(1, axis_name(d.coordinate))},
            {"U", steps_json(d.U)},
            {"V", steps_json(d.V)},
            {"W", steps_json(d.W)}};
}

// Per-model shard line: model record, a tab, then a JSON payload.
std::string shard_line(const ModelRecord& r, const json& payload)
{
    return format_model_line(r) + '\t' + payload.dump() + '\n';
}

struct ShardEntry {
    ModelRecord record;
    json payload;
};

std::vector<ShardEntry> parse_shards(const std::vector<std::string>& shards)
{
    std::vector<ShardEntry> out;
    for (const auto& text : shards) {
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);) {
            if (line.empty()) continue;
            const auto tab = line.find('\t');
            out.push_back({parse_model_line(line.substr(0, tab)), json::parse(line.substr(tab + 1))});
        }
    }
    return out;
}

std::string series_name(StepSet s, Target t, std::uint32_t p)
{
    return s.hex() + '-' + std::string(to_string(t)) + '-' + std::to_string(p) + ".ow3s";
}

std::string exact_name(StepSet s, Target t)
{
    return s.hex() + '-' + std::string(to_string(t)) + ".txt";
}

std::vector<ModelRecord> survivors(const PipelineConfig& cfg)
{
    ClassificationDB db(cfg.db);
    return db.select({FilterStatus::FiniteGroupZeroOS});
}

struct Unit {
    StepSet model;
    Target target;
};

std::vector<Unit> survivor_units(const PipelineConfig& cfg)
{
    std::vector<Unit> out;
    for (const auto& r : survivors(cfg))
        for (Target t : cfg.targets) out.push_back({r.id, t});
    return out;
}

std::string errors_text(std::vector<std::string> lines)
{
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) out += l + '\n';
    return out;
}

void require_stage(const ClassificationDB& db, const std::string& stage)
{
    if (!db.stage_done(stage)) throw std::runtime_error("stage " + stage + " has not completed");
}

void write_meta(const PipelineConfig& cfg)
{
    const auto& table = prime_table();
    std::ostringstream os;
    os << kDbVersion << '\n'
       << cfg.to_text() << "prime_table = " << table.size() << " primes, " << table.front() << " .. "
       << table.back() << '\n';
    write_atomic(cfg.db / "meta.txt", os.str());
}

}  // namespace

// ---------------------------------------------------------------------------

PipelineConfig PipelineConfig::parse(const std::string& text)
{
    PipelineConfig cfg;
    std::istringstream in(text);
    int lineno = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(std::string_view(raw).substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);

        if (key == "db") cfg.db = value;
        else if (key == "min_size") cfg.min_size = parse_number<int>(key, value);
        else if (key == "max_size") cfg.max_size = parse_number<int>(key, value);
        else if (key == "threads") cfg.threads = parse_number<unsigned>(key, value);
        else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "group_cap") cfg.group_cap = parse_number<std::size_t>(key, value);
        else if (key == "group_points") cfg.group_points = parse_number<int>(key, value);
        else if (key == "horizon") cfg.horizon = parse_number<int>(key, value);
        else if (key == "richardson_order") cfg.richardson_order = parse_number<int>(key, value);
        else if (key == "guess_r") cfg.guess_r = parse_number<int>(key, value);
        else if (key == "guess_d") cfg.guess_d = parse_number<int>(key, value);
        else if (key == "memory_budget_mb") cfg.memory_budget_mb = parse_number<std::size_t>(key, value);
        else if (key == "shards") cfg.shards = parse_number<int>(key, value);
        else if (key == "targets") {
            cfg.targets.clear();
            for (const auto& t : split(value, ',')) cfg.targets.push_back(parse_target(t));
        } else
            throw std::invalid_argument("config: unknown key " + key);
    }
    if (cfg.min_size < 1 || cfg.max_size > kStepCount || cfg.min_size > cfg.max_size)
        throw std::invalid_argument("config: size range must lie in [1, 26]");
    if (cfg.horizon < 1) throw std::invalid_argument("config: horizon must be positive");
    if (cfg.shards < 1) throw std::invalid_argument("config: shards must be positive");
    if (cfg.group_points < 1) throw std::invalid_argument("config: group_points must be positive");
    if (cfg.targets.empty()) throw std::invalid_argument("config: no targets");
    return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& file)
{
    return parse(read_file(file));
}

std::string PipelineConfig::to_text() const
{
    std::ostringstream os;
    os << "min_size = " << min_size << '\n'
       << "max_size = " << max_size << '\n'
       << "seed = " << seed << '\n'
       << "group_cap = " << group_cap << '\n'
       << "group_points = " << group_points << '\n'
       << "horizon = " << horizon << '\n'
       << "targets = ";
    for (std::size_t i = 0; i < targets.size(); ++i) os << (i ? "," : "") << to_string(targets[i]);
    os << '\n'
       << "richardson_order = " << richardson_order << '\n'
       << "guess_r = " << guess_r << '\n'
       << "guess_d = " << guess_d << '\n'
       << "memory_budget_mb = " << memory_budget_mb << '\n'
       << "shards = " << shards << '\n';
    return os.str();
}

std::uint64_t SizePolynomial::total() const
{
    std::uint64_t t = 0;
    for (auto c : coeff) t += c;
    return t;
}

std::string SizePolynomial::to_string() const
{
    std::string out;
    for (int k = 1; k <= kStepCount; ++k) {
        if (!coeff[k]) continue;
        if (!out.empty()) out += " + ";
        out += std::to_string(coeff[k]) + "u^" + std::to_string(k);
    }
    return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------------------

void write_atomic(const fs::path& file, const std::string& contents)
{
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, file);
}

std::uint64_t model_seed(std::uint64_t seed, StepSet s)
{
    // splitmix64 finalizer
    std::uint64_t z = seed ^ (std::uint64_t{s.mask()} * 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z ? z : 1;
}

ClassificationDB::ClassificationDB(fs::path dir) : dir_(std::move(dir)) {}

std::vector<ModelRecord> ClassificationDB::load_models() const
{
    for (const char* name : {"group.txt", "filter.txt", "models.txt"})
        if (fs::exists(file(name))) return read_models(file(name));
    return {};
}

void ClassificationDB::save_models(const std::vector<ModelRecord>& models) const
{
    write_atomic(file("models.txt"), models_text(models));
}

bool ClassificationDB::stage_done(const std::string& stage) const
{
    return fs::exists(file(stage + ".done"));
}

void ClassificationDB::mark_stage(const std::string& stage) const
{
    write_atomic(file(stage + ".done"), stage + '\n');
}

std::vector<ModelRecord> ClassificationDB::select(std::initializer_list<FilterStatus> statuses) const
{
    std::vector<ModelRecord> out;
    for (auto& r : load_models())
        if (std::find(statuses.begin(), statuses.end(), r.filter_status) != statuses.end()) out.push_back(r);
    return out;
}

// ---------------------------------------------------------------------------

StageResult stage_enumerate(const PipelineConfig& cfg)
{
    ClassificationDB db(cfg.db);
    fs::create_directories(cfg.db);
    write_meta(cfg);
    const SizeRange range{cfg.min_size, cfg.max_size};
    const auto shards = static_cast<std::size_t>(cfg.shards);
    const auto dir = cfg.db / "enumerate.d";
    // Interleaving balances shards, since large masks cost more.
    const std::uint32_t width = (kMaskLimit + shards - 1) / shards;
    auto texts = run_shards(dir, shards, cfg.threads, [&](std::size_t i) {
        std::string out;
        for (StepSet s : enumerate_classes_in(static_cast<std::uint32_t>(i * width),
                                              static_cast<std::uint32_t>((i + 1) * width), range))
            out += format_model_line({s, s.size(), FilterStatus::Unprocessed, std::nullopt, {}}) + '\n';
        return out;
    });
    std::string all;
    for (const auto& t : texts) all += t;
    write_atomic(db.file("models.txt"), all);
    fs::remove_all(dir);
    db.mark_stage("enumerate");
    StageResult r;
    r.scheduled = r.completed = shards;
    return r;
}

StageResult stage_filter(const PipelineConfig& cfg)
{
    ClassificationDB db(cfg.db);
    require_stage(db, "enumerate");
    const auto models = read_models(db.file("models.txt"));
    const auto shards = static_cast<std::size_t>(cfg.shards);
    const auto dir = cfg.db / "filter.d";
    auto texts = run_shards(dir, shards, cfg.threads, [&](std::size_t i) {
        const auto [lo, hi] = shard_bounds(models.size(), shards, i);
        std::string out;
        for (auto k = lo; k < hi; ++k) {
            ModelRecord r = models[k];
            json payload = json::object();
            try {
                if (auto cert = projectible(r.id)) {
                    r.filter_status = FilterStatus::Projectible;
                    payload = {{"filter", "projectible"}, {"certificate", json::parse(cert->to_json())}};
                } else if (auto dec = hadamard_decompose(r.id)) {
                    r.filter_status = FilterStatus::Hadamard;
                    payload = {{"filter", "hadamard"}, {"decomposition", decomposition_json(*dec)}};
                } else {
                    r.filter_status = FilterStatus::Unprocessed;
                }
            } catch (const std::exception& e) {
                r.filter_status = FilterStatus::Error;
                payload = {{"error", e.what()}};
            }
            out += shard_line(r, payload);
        }
        return out;
    });

    StageResult result;
    std::string statuses, certs;
    std::vector<std::string> errors;
    for (auto& e : parse_shards(texts)) {
        ++result.scheduled;
        statuses += format_model_line(e.record) + '\n';
        const auto hex = e.record.id.hex();
        if (e.payload.contains("error")) {
            ++result.failed;
            errors.push_back(error_line("filter", hex, e.payload["error"]));
            continue;
        }
        ++result.completed;
        if (!e.payload.empty()) {
            json line = e.payload;
            line["model"] = hex;
            certs += line.dump() + '\n';
        }
    }
    write_atomic(db.file("certificates.jsonl"), certs);
    write_atomic(db.file("filter.errors.jsonl"), errors_text(errors));
    write_atomic(db.file("filter.txt"), statuses);
    fs::remove_all(dir);
    db.mark_stage("filter");
    return result;
}

StageResult stage_group(const PipelineConfig& cfg)
{
    ClassificationDB db(cfg.db);
    require_stage(db, "filter");
    const auto models = read_models(db.file("filter.txt"));
    std::vector<std::size_t> todo;
    for (std::size_t k = 0; k < models.size(); ++k)
        if (models[k].filter_status == FilterStatus::Unprocessed || models[k].filter_status == FilterStatus::Hadamard)
            todo.push_back(k);

    const auto shards = static_cast<std::size_t>(cfg.shards);
    const auto dir = cfg.db / "group.d";
    auto texts = run_shards(dir, shards, cfg.threads, [&](std::size_t i) {
        const auto [lo, hi] = shard_bounds(todo.size(), shards, i);
        std::string out;
        for (auto k = lo; k < hi; ++k) {
            ModelRecord r = models[todo[k]];
            const bool hadamard = r.filter_status == FilterStatus::Hadamard;
            json payload;
            try {
                GroupOptions opt;
                opt.cap = cfg.group_cap;
                opt.points = cfg.group_points;
                opt.seed = model_seed(cfg.seed, r.id);
                const GroupResult g = explore_group(r.id, opt);
                if (g.status == GroupStatus::Failed) throw std::runtime_error("group: " + g.message);
                std::optional<OrbitSumVerdict> os;
                if (g.finite()) {
                    if (g.has_odd_relator()) throw std::runtime_error("orbit sum: sign undefined (odd relator)");
                    os = orbit_sum_zero(r.id, g, opt.seed);
                }
                payload = json::parse(group_json(g, os));
                payload["hadamard"] = hadamard;
                if (!hadamard) {
                    if (!g.finite()) r.filter_status = FilterStatus::GroupLarge;
                    else r.filter_status = os->is_zero ? FilterStatus::FiniteGroupZeroOS
                                                       : FilterStatus::FiniteGroupNonzeroOS;
                }
            } catch (const std::exception& e) {
                r.filter_status = FilterStatus::Error;
                payload = {{"error", e.what()}};
            }
            out += shard_line(r, payload);
        }
        return out;
    });

    StageResult result;
    std::vector<ModelRecord> updated = models;
    std::map<std::uint32_t, ModelRecord> changed;
    std::string groups;
    std::vector<std::string> errors;
    for (auto& e : parse_shards(texts)) {
        ++result.scheduled;
        const auto hex = e.record.id.hex();
        changed[e.record.id.mask()] = e.record;
        if (e.payload.contains("error")) {
            ++result.failed;
            errors.push_back(error_line("group", hex, e.payload["error"]));
            continue;
        }
        ++result.completed;
        json line = e.payload;
        line["model"] = hex;
        groups += line.dump() + '\n';
    }
    for (auto& r : updated)
        if (auto it = changed.find(r.id.mask()); it != changed.end()) r = it->second;
    write_atomic(db.file("groups.jsonl"), groups);
    write_atomic(db.file("group.errors.jsonl"), errors_text(errors));
    write_atomic(db.file("group.txt"), models_text(updated));
    fs::remove_all(dir);
    db.mark_stage("group");
    return result;
}

StageResult stage_count(const PipelineConfig& cfg)
{
    ClassificationDB db(cfg.db);
    require_stage(db, "group");
    struct Job {
        StepSet model;
        Target target;
        std::uint32_t prime;
    };
    std::vector<Job> jobs;
    for (const auto& u : survivor_units(cfg))
        for (auto p : select_primes(u.model.size(), cfg.horizon).primes) jobs.push_back({u.model, u.target, p});

    const auto dir = cfg.db / "series";
    fs::create_directories(dir);
    std::mutex mu;
    std::vector<std::string> errors;
    std::atomic<std::size_t> done{0};
    parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
        const auto& j = jobs[i];
        const auto file = dir / series_name(j.model, j.target, j.prime);
        if (fs::exists(file)) {
            ++done;
            return;
        }
        try {
            CountOptions opt;
            opt.memory_budget = cfg.memory_budget_mb << 20;
            const auto series = count_layers(j.model, cfg.horizon, j.prime, j.target, opt);
            auto tmp = file;
            tmp += ".tmp";
            write_series(tmp, series);
            fs::rename(tmp, file);
            ++done;
        } catch (const std::exception& e) {
            std::lock_guard lock(mu);
            errors.push_back(error_line("count", j.model.hex(), std::string(to_string(j.target)) + " mod " +
                                                                    std::to_string(j.prime) + ": " + e.what()));
        }
    });
    write_atomic(db.file("count.errors.jsonl"), errors_text(errors));
    StageResult r{jobs.size(), done.load(), jobs.size() - done.load()};
    if (r.ok()) db.mark_stage("count");
    return r;
}

StageResult stage_reconstruct(const PipelineConfig& cfg)
{
    ClassificationDB db(cfg.db);
    require_stage(db, "count");
    const auto units = survivor_units(cfg);
    const auto dir = cfg.db / "exact";
    fs::create_directories(dir);
    std::mutex mu;
    std::vector<std::string> errors;
    std::atomic<std::size_t> done{0};
    parallel_for(units.size(), cfg.threads, [&](std::size_t i) {
        const auto& u = units[i];
        const auto file = dir / exact_name(u.model, u.target);
        try {
            std::vector<ModSeries> images;
            for (auto p : select_primes(u.model.size(), cfg.horizon).primes)
                images.push_back(read_series(cfg.db / "series" / series_name(u.model, u.target, p)));
            const auto exact = crt_reconstruct(images);
            auto tmp = file;
            tmp += ".tmp";
            write_exact(tmp, exact);
            fs::rename(tmp, file);
            ++done;
        } catch (const std::exception& e) {
            std::lock_guard lock(mu);
            errors.push_back(error_line("reconstruct", u.model.hex(), std::string(to_string(u.target)) + ": " + e.what()));
        }
    });
    write_atomic(db.file("reconstruct.errors.jsonl"), errors_text(errors));
    StageResult r{units.size(), done.load(), units.size() - done.load()};
    if (r.ok()) db.mark_stage("reconstruct");
    return r;
}

StageResult stage_asympt(const PipelineConfig& cfg)
{
    ClassificationDB db(cfg.db);
    require_stage(db, "reconstruct");
    const auto units = survivor_units(cfg);
    std::vector<std::string> rows(units.size());
    std::atomic<std::size_t> done{0};
    parallel_for(units.size(), cfg.threads, [&](std::size_t i) {
        const auto& u = units[i];
        try {
            const auto exact = read_exact(cfg.db / "exact" / exact_name(u.model, u.target));
            GrowthOptions opt;
            opt.order = cfg.richardson_order;
            if (u.target == Target::Excursions) opt.lattice_period = SupportLattice(u.model).return_period();
            const auto est = estimate_growth(exact.terms, opt);
            std::optional<MinPolyCandidate> minpoly;
            if (est.accuracy > 0) {
                const Real digits = -boost::multiprecision::log10(est.accuracy);
                if (digits >= 15)
                    minpoly = recognize_constant(est.phi, static_cast<unsigned>(digits.convert_to<double>()), 4,
                                                 BigInt(100000000));
            }
            rows[i] = estimate_csv_row(u.model.hex(), u.target, est, minpoly);
            ++done;
        } catch (const std::exception& e) {
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            rows[i] = u.model.hex() + ',' + std::string(to_string(u.target)) + ",,,,,,,error:" + msg;
        }
    });
    std::string out = estimate_csv_header() + '\n';
    for (const auto& row : rows) out += row + '\n';
    write_atomic(db.file("estimates.csv"), out);
    StageResult r{units.size(), done.load(), units.size() - done.load()};
    if (r.ok()) db.mark_stage("asympt");
    return r;
}

StageResult stage_guess(const PipelineConfig& cfg)
{
    ClassificationDB db(cfg.db);
    require_stage(db, "count");
    const auto units = survivor_units(cfg);
    std::vector<std::string> lines(units.size());
    std::atomic<std::size_t> done{0};
    parallel_for(units.size(), cfg.threads, [&](std::size_t i) {
        const auto& u = units[i];
        try {
            const auto primes = select_primes(u.model.size(), cfg.horizon).primes;
            const auto first = read_series(cfg.db / "series" / series_name(u.model, u.target, primes.front()));
            GuessStats stats;
            auto rec = guess_recurrence(first, cfg.guess_r, cfg.guess_d, {}, &stats);
            auto ode = guess_ode(first, cfg.guess_r, cfg.guess_d, {});
            bool double_prime = false;
            if (rec && primes.size() > 1) {
                const auto second = read_series(cfg.db / "series" / series_name(u.model, u.target, primes[1]));
                auto again = guess_recurrence(second, rec->order, rec->degree, {});
                double_prime = again && again->order == rec->order && again->degree == rec->degree;
            }
            lines[i] = guess_json(first, cfg.guess_r, cfg.guess_d, stats, rec, ode, double_prime);
            ++done;
        } catch (const std::exception& e) {
            lines[i] = error_line("guess", u.model.hex(), std::string(to_string(u.target)) + ": " + e.what());
        }
    });
    std::string out;
    for (const auto& l : lines) out += l + '\n';
    write_atomic(db.file("guess.jsonl"), out);
    StageResult r{units.size(), done.load(), units.size() - done.load()};
    if (r.ok()) db.mark_stage("guess");
    return r;
}

// ---------------------------------------------------------------------------

Summary summarize(const PipelineConfig& cfg)
{
    ClassificationDB db(cfg.db);
    Summary s;
    if (fs::exists(db.file("models.txt")))
        for (const auto& r : read_models(db.file("models.txt"))) ++s.filter1.coeff[r.size];
    if (fs::exists(db.file("filter.txt")))
        for (const auto& r : read_models(db.file("filter.txt"))) {
            if (r.filter_status != FilterStatus::Projectible) ++s.filter2.coeff[r.size];
            if (r.filter_status != FilterStatus::Projectible && r.filter_status != FilterStatus::Hadamard)
                ++s.filter3.coeff[r.size];
        }
    if (fs::exists(db.file("group.txt")))
        for (const auto& r : read_models(db.file("group.txt"))) {
            if (r.filter_status == FilterStatus::FiniteGroupZeroOS ||
                r.filter_status == FilterStatus::FiniteGroupNonzeroOS)
                ++s.filter4.coeff[r.size];
            if (r.filter_status == FilterStatus::FiniteGroupZeroOS) ++s.filter5.coeff[r.size];
            if (r.filter_status == FilterStatus::Error) ++s.errors;
        }
    if (fs::exists(db.file("groups.jsonl")))
        for (const auto& line : read_lines(db.file("groups.jsonl"))) {
            const auto g = json::parse(line);
            if (g.value("status", "") != "Finite") continue;
            auto& row = s.groups[g.value("name", "?")];
            if (g.value("hadamard", false)) {
                ++row.hadamard;
                ++s.hadamard_small_groups;
            } else if (g.value("orbit_sum_zero", false)) {
                ++row.zero_os;
            } else {
                ++row.nonzero_os;
            }
        }
    return s;
}

StepSet model_m_dagger()
{
    return StepSet::from_diagram("110111000 11100110 000110111");
}

std::string growth_comparison(const Real& phi, const std::string& closed_form)
{
    PrecisionScope scope(40);
    const Real a = 6 * (1 + boost::multiprecision::sqrt(Real(2)));
    const Real b = 2 * (1 + boost::multiprecision::sqrt(Real(6)));
    const Real printed("14.48528121823356265");
    std::ostringstream os;
    os << "  phi estimate            " << format_real(phi, 20) << '\n'
       << "  recognized closed form  " << closed_form << '\n'
       << "  6(1+sqrt 2)             " << format_real(a, 20) << "  diff " << format_real(abs(phi - a), 3) << '\n'
       << "  2(1+sqrt 6)             " << format_real(b, 20) << "  diff " << format_real(abs(phi - b), 3) << '\n'
       << "  published estimate      " << format_real(printed, 20) << "  diff " << format_real(abs(phi - printed), 3)
       << '\n'
       << "  note: 2(1+sqrt 6) is far from every estimate, and the published estimate differs from 6(1+sqrt 2) by "
       << format_real(abs(printed - a), 3) << "; left unresolved.\n";
    return os.str();
}

std::string report(const PipelineConfig& cfg)
{
    ClassificationDB db(cfg.db);
    const Summary s = summarize(cfg);
    std::ostringstream os;
    os << "octwalk classification report\n"
       << "sizes " << cfg.min_size << ".." << cfg.max_size << ", seed " << cfg.seed << ", group cap " << cfg.group_cap
       << ", horizon " << cfg.horizon << "\n\n";

    auto poly = [&](const char* name, const SizePolynomial& p) {
        os << "  " << name << " (" << p.total() << "): " << p.to_string() << '\n';
    };
    os << "size polynomials\n";
    poly("filter 1, class representatives", s.filter1);
    poly("filter 2, not projectible      ", s.filter2);
    poly("filter 3, no Hadamard product  ", s.filter3);
    poly("filter 4, finite group         ", s.filter4);
    poly("filter 5, zero orbit sum       ", s.filter5);

    os << "\ngroups of order <= " << cfg.group_cap << "\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "  %-14s %10s %12s %10s\n", "group", "Hadamard", "nonzero OS", "zero OS");
    os << buf;
    for (const auto& [name, row] : s.groups) {
        std::snprintf(buf, sizeof buf, "  %-14s %10llu %12llu %10llu\n", name.c_str(),
                      static_cast<unsigned long long>(row.hadamard), static_cast<unsigned long long>(row.nonzero_os),
                      static_cast<unsigned long long>(row.zero_os));
        os << buf;
    }
    os << "  Hadamard models with a finite group: " << s.hadamard_small_groups << '\n'
       << "  models with errors: " << s.errors << "\n\n";

    os << "survivors\n";
    for (const auto& r : survivors(cfg)) os << "  " << r.id.hex() << "  " << r.id.diagram() << '\n';

    if (fs::exists(db.file("estimates.csv"))) {
        os << "\nestimates (estimates.csv)\n";
        const auto mdag = model_m_dagger().hex();
        std::vector<std::string> comparisons;
        for (const auto& line : read_lines(db.file("estimates.csv"))) {
            os << "  " << line << '\n';
            const auto cols = split(line, ',');
            if (cols.size() >= 5 && cols[0] == mdag && !cols[3].empty()) {
                PrecisionScope scope(40);
                comparisons.push_back(cols[1] + '\n' +
                                      growth_comparison(Real(cols[3]), cols[4].empty() ? "none" : cols[4]));
            }
        }
        for (const auto& c : comparisons) os << "\ncomparison for " << mdag << ' ' << c;
    }
    const auto text = os.str();
    write_atomic(db.file("report.txt"), text);
    return text;
}

bool run_pipeline(const PipelineConfig& cfg)
{
    ClassificationDB db(cfg.db);
    bool ok = true;
    const std::pair<const char*, StageResult (*)(const PipelineConfig&)> stages[] = {
        {"enumerate", stage_enumerate}, {"filter", stage_filter},           {"group", stage_group},
        {"count", stage_count},         {"reconstruct", stage_reconstruct}, {"asympt", stage_asympt},
        {"guess", stage_guess},
    };
    for (const auto& [name, fn] : stages) {
        if (db.stage_done(name)) continue;
        const auto r = fn(cfg);
        ok = ok && r.ok();
        if (!db.stage_done(name) && std::string(name) != "asympt" && std::string(name) != "guess") break;
    }
    report(cfg);
    return ok;
}

}  // namespace octwalk
