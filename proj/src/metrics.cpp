#include "brifca/metrics.hpp"

#include <cmath>
#include <limits>

namespace brifca {

// Jonker-style O(n^3) Hungarian with potentials. Rows are estimates, columns
// are truth slots; returns for each row its assigned column.
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    if (n == 0) return {};
    if (cost.cols() != n) throw InvalidInput("hungarian: cost matrix must be square");
    if (!cost.allFinite()) throw InvalidInput("hungarian: non-finite cost");

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match_col(n + 1, 0);  // match_col[col] = row (1-based)
    std::vector<int> way(n + 1, 0);

    for (int row = 1; row <= n; ++row) {
        match_col[0] = row;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match_col[j0];
            double delta = inf;
            int j1 = -1;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match_col[j0] != 0);
        do {
            const int j1 = way[j0];
            match_col[j0] = match_col[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (match_col[j] > 0) row_to_col[match_col[j] - 1] = j - 1;
    }
    return row_to_col;
}

Matching optimal_matching(const std::vector<ParamVector>& estimates,
                          const std::vector<ParamVector>& truth_params) {
    const int k = static_cast<int>(estimates.size());
    if (k == 0 || truth_params.size() != estimates.size())
        throw InvalidInput("optimal_matching: estimate/truth count mismatch");
    Eigen::MatrixXd cost(k, k);
    for (int e = 0; e < k; ++e) {
        if (estimates[e].size() != truth_params[0].size())
            throw InvalidInput("optimal_matching: dimension mismatch");
        for (int t = 0; t < k; ++t) cost(e, t) = (estimates[e] - truth_params[t]).norm();
    }
    Matching m;
    m.estimate_to_truth = hungarian(cost);
    for (int e = 0; e < k; ++e) m.total_cost += cost(e, m.estimate_to_truth[e]);
    return m;
}

double dist(const std::vector<ParamVector>& estimates, const GroundTruth& truth) {
    const Matching m = optimal_matching(estimates, truth.params);
    return m.total_cost / static_cast<double>(estimates.size());
}

double cluster_accuracy(const std::vector<int>& assignments, const std::vector<WorkerSpec>& workers,
                        const Matching& matching) {
    if (assignments.size() != workers.size())
        throw InvalidInput("cluster_accuracy: assignment/worker count mismatch");
    const int k = static_cast<int>(matching.estimate_to_truth.size());
    std::size_t honest = 0, correct = 0;
    for (std::size_t i = 0; i < workers.size(); ++i) {
        if (workers[i].byzantine) continue;
        ++honest;
        const int a = assignments[i];
        if (a < 0 || a >= k) continue;
        if (matching.estimate_to_truth[a] == workers[i].cluster_id) ++correct;
    }
    if (honest == 0) return 0.0;
    return static_cast<double>(correct) / static_cast<double>(honest);
}

IterationRow evaluate_round(int iteration, const std::vector<ParamVector>& estimates,
                            const GroundTruth& truth, const std::vector<int>& assignments,
                            const std::vector<WorkerSpec>& workers) {
    const Matching m = optimal_matching(estimates, truth.params);
    IterationRow row;
    row.iteration = iteration;
    row.dist = m.total_cost / static_cast<double>(estimates.size());
    row.cluster_accuracy = cluster_accuracy(assignments, workers, m);
    row.per_cluster_err.assign(truth.params.size(), 0.0);
    for (std::size_t e = 0; e < estimates.size(); ++e) {
        const int t = m.estimate_to_truth[e];
        row.per_cluster_err[static_cast<std::size_t>(t)] =
            (estimates[e] - truth.params[static_cast<std::size_t>(t)]).norm();
    }
    return row;
}

}  // namespace brifca
