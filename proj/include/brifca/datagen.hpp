#ifndef BRIFCA_DATAGEN_HPP
#define BRIFCA_DATAGEN_HPP

#include <optional>
#include <string>
#include <vector>

#include "brifca/core.hpp"
#include "brifca/model.hpp"
#include "brifca/rng.hpp"

namespace brifca {

struct AttackStrategy {
    AttackKind kind = AttackKind::scaled_eval;
    double magnitude = 0.0;  // arbitrary_vector report norm
};

/// One machine's role and data. Honest workers carry their true cluster id;
/// Byzantine workers carry an attack strategy and (for the regression attack)
/// the coefficient their data was generated from, rescaled to norm 3.
struct WorkerSpec {
    int index = 0;
    bool byzantine = false;
    int cluster_id = -1;
    AttackStrategy strategy{};
    Dataset data;
    std::optional<ParamVector> byz_param;
};

/// Draws k ground-truth parameters with i.i.d. Bernoulli(0.5) coordinates
/// rescaled to unit Euclidean norm (all-zero draws are redrawn) and records
/// the minimum pairwise separation.
GroundTruth generate_ground_truth(int k, int d, RngStream& rng);

/// Builds the worker population for one trial: round(alpha*m) Byzantine
/// machines, the rest honest and spread round-robin across the k clusters
/// (sizes differ by at most one). Every draw comes from a stream keyed by
/// (config.seed, machine index), so workers can be generated in any order.
/// Fills truth.cluster_sizes.
std::vector<WorkerSpec> generate_population(const ExperimentConfig& cfg, GroundTruth& truth);

/// Columnar text dump, one file per worker (worker_<index>.txt under dir):
/// a header line with role/cluster/model/shape, then one sample per line.
void dump_workers(const std::string& dir, const std::vector<WorkerSpec>& workers,
                  const LossModel& model);
std::vector<WorkerSpec> load_workers(const std::string& dir);

}  // namespace brifca

#endif
