#ifndef BRIFCA_THREESTAGE_HPP
#define BRIFCA_THREESTAGE_HPP

#include <functional>
#include <vector>

#include "brifca/core.hpp"
#include "brifca/datagen.hpp"
#include "brifca/metrics.hpp"
#include "brifca/model.hpp"
#include "brifca/rng.hpp"

namespace brifca {

/// Result of the trimmed k-means stage. Every point is assigned to its
/// nearest center; the floor(trim*count) points farthest from their assigned
/// centers are additionally marked trimmed and excluded from the center
/// updates.
struct TrimmedKMeansState {
    std::vector<ParamVector> centers;
    std::vector<int> membership;  // per point: nearest-center index
    std::vector<char> trimmed;    // per point: 1 if globally trimmed
    double trim = 0.0;
    int iterations_run = 0;
};

/// One exact local minimizer per machine, Byzantine machines included.
/// Degenerate designs fall back to the ridge solution.
std::vector<ParamVector> stage1_erms(const std::vector<WorkerSpec>& workers,
                                     const LossModel& model);

/// Lloyd iterations with global distance trimming: assign points to the
/// nearest center, trim the floor(trim*count) points farthest from their
/// assigned centers, recompute each center as the untrimmed mean. Runs S
/// iterations or until membership+trim flags reach a fixed point. Centers
/// start from k-means++ seeding restricted to a pre-trimmed pool: the
/// floor(trim*count) points farthest from the coordinate-wise median are
/// never seed candidates (a coherent group of far outliers would otherwise
/// dominate the squared-distance seeding weights and keep a center that no
/// later trimming can evict). A cluster losing all untrimmed members is
/// re-seeded from the untrimmed point farthest from its current center.
TrimmedKMeansState trimmed_kmeans(const std::vector<ParamVector>& points, int k, double trim,
                                  int S, RngStream& rng);

using RoundObserver = std::function<void(int iteration, const std::vector<ParamVector>& params)>;

/// T rounds of trimmed-mean gradient aggregation and projected descent per
/// cluster with the memberships frozen (membership < 0 means the machine is
/// trimmed out and never reports). Starts from `centers`; a cluster with no
/// members keeps its center. `observer`, when set, sees the parameters after
/// every round.
std::vector<ParamVector> stage3_aggregate(const std::vector<WorkerSpec>& workers,
                                          const std::vector<int>& memberships,
                                          const std::vector<ParamVector>& centers,
                                          const LossModel& model, double beta, double gamma, int T,
                                          const ParameterSpace& space,
                                          TrimDivisor divisor = TrimDivisor::remaining,
                                          std::uint64_t attack_seed = 0,
                                          const RoundObserver& observer = {});

/// The full baseline: local ERMs, trimmed k-means over the ERMs (trim =
/// cfg.beta, cfg.kmeans_iters iterations), then stage3_aggregate for cfg.T
/// rounds. The record's row 0 scores the stage-II centers.
TrialRecord run_three_stage(const ExperimentConfig& cfg, const GroundTruth& truth,
                            const std::vector<WorkerSpec>& workers, bool measure_time = false);

/// Max over true clusters of the fraction of its honest untrimmed machines
/// whose cluster maps, under the matching, to a different true cluster.
double max_miscluster_fraction(const std::vector<int>& memberships,
                               const std::vector<char>& trimmed,
                               const std::vector<WorkerSpec>& workers, const Matching& matching);

}  // namespace brifca

#endif
