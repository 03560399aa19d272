#ifndef BRIFCA_METRICS_HPP
#define BRIFCA_METRICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "brifca/core.hpp"
#include "brifca/datagen.hpp"

namespace brifca {

struct IterationRow {
    int iteration = 0;
    double dist = 0.0;
    double cluster_accuracy = 0.0;
    std::vector<double> per_cluster_err;  // ||theta_j - theta_pi(j)*||, truth order
    double elapsed_ms = 0.0;
};

/// Per-iteration trajectory of one seeded run; always T+1 rows (row 0 is the
/// initialization).
struct TrialRecord {
    std::uint64_t seed = 0;
    std::string method;
    std::uint64_t config_hash = 0;
    int rejected_reports = 0;
    std::vector<IterationRow> rows;
    std::vector<ParamVector> final_params;
};

/// Label matching between estimates and true parameters: assignment[e] is the
/// truth index matched to estimate e, minimizing the total distance.
struct Matching {
    std::vector<int> estimate_to_truth;
    double total_cost = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix (Hungarian
/// algorithm, O(k^3)).
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

Matching optimal_matching(const std::vector<ParamVector>& estimates,
                          const std::vector<ParamVector>& truth_params);

/// (1/k) sum_j ||theta_hat_pi(j) - theta_j*|| minimized over label
/// permutations.
double dist(const std::vector<ParamVector>& estimates, const GroundTruth& truth);

/// Fraction of honest workers whose reported cluster maps, under the dist
/// matching, to their true cluster. assignments[i] < 0 means unreported.
double cluster_accuracy(const std::vector<int>& assignments, const std::vector<WorkerSpec>& workers,
                        const Matching& matching);

/// One trajectory row: dist, accuracy and per-cluster errors of `estimates`
/// against the truth, under a single shared matching.
IterationRow evaluate_round(int iteration, const std::vector<ParamVector>& estimates,
                            const GroundTruth& truth, const std::vector<int>& assignments,
                            const std::vector<WorkerSpec>& workers);

}  // namespace brifca

#endif
