#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "octwalk/asymptotics.hpp"
#include "octwalk/countkernel.hpp"
#include "octwalk/stepset.hpp"

namespace octwalk {

namespace fs = std::filesystem;

struct PipelineConfig {
    fs::path db = "octwalk-db";
    int min_size = 1;
    int max_size = kStepCount;
    unsigned threads = 1;
    std::uint64_t seed = 1;
    std::size_t group_cap = 400;
    int group_points = 3;
    int horizon = 100;
    std::vector<Target> targets{Target::Excursions, Target::AllEndpoints};
    int richardson_order = 6;
    int guess_r = 20;
    int guess_d = 30;
    std::size_t memory_budget_mb = 4096;
    int shards = 64;

    /// key = value lines; '#' starts a comment. Unknown keys are rejected.
    static PipelineConfig parse(const std::string& text);
    static PipelineConfig load(const fs::path& file);
    std::string to_text() const;
};

/// Coefficients of sum u^|S| indexed by |S|.
struct SizePolynomial {
    std::array<std::uint64_t, kStepCount + 1> coeff{};

    std::uint64_t total() const;
    std::string to_string() const;
};

struct GroupRow {
    std::uint64_t hadamard = 0;
    std::uint64_t nonzero_os = 0;
    std::uint64_t zero_os = 0;
};

struct Summary {
    SizePolynomial filter1, filter2, filter3, filter4, filter5;
    std::map<std::string, GroupRow> groups;  ///< by group name
    std::uint64_t hadamard_small_groups = 0;
    std::uint64_t errors = 0;
};

/// Model list and per-stage artifacts in one directory.
class ClassificationDB {
public:
    explicit ClassificationDB(fs::path dir);

    const fs::path& dir() const { return dir_; }
    fs::path file(const std::string& name) const { return dir_ / name; }

    std::vector<ModelRecord> load_models() const;
    void save_models(const std::vector<ModelRecord>& models) const;

    bool stage_done(const std::string& stage) const;
    void mark_stage(const std::string& stage) const;

    /// Models of every status in the given set.
    std::vector<ModelRecord> select(std::initializer_list<FilterStatus> statuses) const;

private:
    fs::path dir_;
};

struct StageResult {
    std::size_t scheduled = 0;
    std::size_t completed = 0;
    std::size_t failed = 0;
    bool ok() const { return failed == 0 && completed == scheduled; }
};

/// Replaces the file contents in one rename.
void write_atomic(const fs::path& file, const std::string& contents);

/// Deterministic per-model seed.
std::uint64_t model_seed(std::uint64_t seed, StepSet s);

StageResult stage_enumerate(const PipelineConfig& cfg);
StageResult stage_filter(const PipelineConfig& cfg);
StageResult stage_group(const PipelineConfig& cfg);
StageResult stage_count(const PipelineConfig& cfg);
StageResult stage_reconstruct(const PipelineConfig& cfg);
StageResult stage_asympt(const PipelineConfig& cfg);
StageResult stage_guess(const PipelineConfig& cfg);

Summary summarize(const PipelineConfig& cfg);
/// Writes report.txt and returns its text.
std::string report(const PipelineConfig& cfg);

/// The model 110111000 11100110 000110111.
StepSet model_m_dagger();

/// phi estimate against 6(1+sqrt 2), 2(1+sqrt 6) and the published estimate
/// 14.48528121823356265 for that model.
std::string growth_comparison(const Real& phi, const std::string& closed_form);

/// All stages in order; returns false if any stage left models unfinished.
bool run_pipeline(const PipelineConfig& cfg);

}  // namespace octwalk
