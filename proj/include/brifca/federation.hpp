#ifndef BRIFCA_FEDERATION_HPP
#define BRIFCA_FEDERATION_HPP

#include <vector>

#include "brifca/aggregation.hpp"
#include "brifca/core.hpp"
#include "brifca/datagen.hpp"
#include "brifca/metrics.hpp"
#include "brifca/model.hpp"

namespace brifca {

struct GradientReport {
    int machine = -1;
    int reported_cluster = -1;
    ParamVector g;
};

/// Server-side view of one synchronous round: the k broadcast parameters,
/// each machine's reported cluster, and the rosters they induce. Rosters
/// partition the machines that sent a valid report.
struct RoundState {
    int iteration = 0;
    std::vector<ParamVector> params;
    std::vector<int> assignments;           // per machine; -1 = no valid report
    std::vector<std::vector<int>> rosters;  // per cluster, ascending machine indices
};

/// The cluster index the worker reports for the broadcast parameters: honest
/// workers take the argmin of their empirical loss (ties to the lowest
/// index). Byzantine workers under scaled_eval/arbitrary_vector/sign_flip
/// make the same loss-based choice on their own data;
/// omniscient_target_smallest reports `omniscient_target` when it is a valid
/// index. `data_override` substitutes the evaluation sample (resampling).
int assign_cluster(const WorkerSpec& worker, const std::vector<ParamVector>& params,
                   const LossModel& model, int omniscient_target = -1,
                   const Dataset* data_override = nullptr);

/// The gradient the worker sends for its assigned parameter. Honest: the
/// empirical gradient at theta_j. scaled_eval (and the omniscient variant):
/// the gradient of the worker's own data evaluated at 3*theta_j. sign_flip:
/// the negated honest gradient. arbitrary_vector: a direction drawn from
/// `attack_rng` scaled to the strategy magnitude (attack_rng required).
GradientReport worker_report(const WorkerSpec& worker, const std::vector<ParamVector>& params,
                             const LossModel& model, int assignment,
                             RngStream* attack_rng = nullptr,
                             const Dataset* data_override = nullptr);

/// One synchronous update: group reports by reported cluster, aggregate each
/// group with the rule, take a projected gradient step. Clusters with no
/// valid report keep their parameter. Reports with a non-finite vector or an
/// out-of-range cluster are rejected, counted into *rejected, and noted on
/// stderr.
RoundState server_round(const RoundState& state, const std::vector<GradientReport>& reports,
                        const AggregationRule& rule, double gamma, const ParameterSpace& space,
                        int* rejected = nullptr);

/// "brifca_median" / "brifca_trimmed" / "ifca_fedavg" per the rule kind.
std::string method_name(const AggregationRule& rule);

/// Initial parameters for a trial: warm mode draws theta_j uniformly in a
/// ball of radius min_separation/4 around theta_j* (radius 1/4 when k == 1
/// leaves the separation undefined); random mode draws uniformly in the
/// parameter space. Stream key: (seed, init, j).
std::vector<ParamVector> initial_params(const ExperimentConfig& cfg, const GroundTruth& truth);

/// T rounds of broadcast, assignment, reports and robust aggregation from
/// the configured initialization. The record holds T+1 rows; row t scores
/// the parameters entering round t, and the final row scores the output
/// under a fresh full-data assignment pass. With cfg.resampling, round t
/// evaluates losses on each worker's subset 2t and gradients on subset 2t+1
/// of a 2T-way split.
TrialRecord run_algorithm(const ExperimentConfig& cfg, const GroundTruth& truth,
                          const std::vector<WorkerSpec>& workers, const AggregationRule& rule,
                          bool measure_time = false);

}  // namespace brifca

#endif
