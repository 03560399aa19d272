#ifndef BRIFCA_SWEEP_HPP
#define BRIFCA_SWEEP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "brifca/core.hpp"
#include "brifca/metrics.hpp"
#include "brifca/model.hpp"

namespace brifca {

enum class Method { brifca_median, brifca_trimmed, ifca_fedavg, three_stage };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

/// One k/m combination of the study grid.
struct SettingSpec {
    std::string name;
    int k = 2;
    int m = 80;
};

/// A full experiment grid: settings x dimensions x methods, `trials` seeded
/// runs per cell. Methods share trial seeds so per-seed comparisons are
/// paired.
struct SweepSpec {
    ExperimentConfig base;
    int n_uniform = 100;  // samples per machine for every cell
    std::vector<SettingSpec> settings;
    std::vector<int> d_values;
    std::vector<Method> methods;
    int trials = 50;
    std::string out_dir = "out";
    int parallelism = 1;
    bool timing = false;  // real per-row wall-clock; off keeps CSV bytes seed-only
};

SweepSpec sweep_from_json_text(const std::string& text);
SweepSpec load_sweep(const std::string& path);

/// Deterministic per-trial seed; independent of the method so every method
/// sees the same population for a given (setting, d, trial) cell.
std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& setting, int d, int trial);

/// Generates the trial's truth and population from cfg.seed and runs the
/// method end to end.
TrialRecord run_trial(const ExperimentConfig& cfg, Method method, bool measure_time = false);

struct CellSummary {
    std::string setting;
    std::string method;
    int d = 0;
    int k = 0;
    int m = 0;
    int trials = 0;
    double mean_dist = 0.0;    // final-iteration dist, mean over trials
    double stderr_dist = 0.0;  // sample standard error over trials
    double mean_accuracy = 0.0;
};

struct SweepResult {
    std::vector<CellSummary> summary;
    std::vector<std::string> failures;  // one message per failed trial
    std::string raw_csv_path;
    std::string summary_csv_path;
};

/// Runs every (setting, d, method, trial) cell on a pool of
/// spec.parallelism threads and writes raw.csv / summary.csv under
/// spec.out_dir. Output bytes depend only on the spec, not on thread
/// scheduling. Failed trials are recorded and skipped in the summary.
SweepResult run_sweep(const SweepSpec& spec);

struct DiagnosticsOutput {
    DiagnosticsReport estimates;
    double min_cluster_fraction = 0.0;  // the p of the theory conditions
    std::vector<std::string> lines;     // "pass: ..." / "warn: ..." per check
    bool any_warning = false;
};

/// Monte-Carlo assumption estimates plus the checkable theorem
/// preconditions for the config. Advisory only.
DiagnosticsOutput diagnose(const ExperimentConfig& cfg);

}  // namespace brifca

#endif
