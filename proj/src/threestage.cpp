#include "brifca/threestage.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "brifca/aggregation.hpp"
#include "brifca/federation.hpp"

namespace brifca {

std::vector<ParamVector> stage1_erms(const std::vector<WorkerSpec>& workers,
                                     const LossModel& model) {
    std::vector<ParamVector> erms;
    erms.reserve(workers.size());
    for (const auto& w : workers) erms.push_back(local_erm(model, w.data, DegeneratePolicy::ridge));
    return erms;
}

namespace {

std::vector<ParamVector> kmeanspp_seed(const std::vector<ParamVector>& points,
                                       const std::vector<int>& pool, int k, RngStream& rng) {
    const int n = static_cast<int>(pool.size());
    auto at = [&](int i) -> const ParamVector& {
        return points[static_cast<std::size_t>(pool[static_cast<std::size_t>(i)])];
    };
    std::vector<ParamVector> centers;
    centers.reserve(static_cast<std::size_t>(k));
    centers.push_back(at(rng.uniform_int(0, n - 1)));
    std::vector<double> d2(static_cast<std::size_t>(n));
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = (at(i) - centers[0]).squaredNorm();
            for (std::size_t c = 1; c < centers.size(); ++c)
                best = std::min(best, (at(i) - centers[c]).squaredNorm());
            d2[static_cast<std::size_t>(i)] = best;
            total += best;
        }
        int pick;
        if (total > 0.0) {
            double target = rng.uniform01() * total, acc = 0.0;
            pick = n - 1;
            for (int i = 0; i < n; ++i) {
                acc += d2[static_cast<std::size_t>(i)];
                if (target < acc) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.uniform_int(0, n - 1);  // all candidates coincide with a center
        }
        centers.push_back(at(pick));
    }
    return centers;
}

}  // namespace

TrimmedKMeansState trimmed_kmeans(const std::vector<ParamVector>& points, int k, double trim,
                                  int S, RngStream& rng) {
    const int n = static_cast<int>(points.size());
    if (k < 1 || k > n) throw InvalidInput("trimmed_kmeans: need 1 <= k <= point count");
    if (!(trim >= 0.0 && trim < 0.5)) throw InvalidInput("trimmed_kmeans: trim must be in [0, 1/2)");
    if (S < 1) throw InvalidInput("trimmed_kmeans: need S >= 1 iterations");

    const int cut = static_cast<int>(std::floor(trim * static_cast<double>(n)));

    // Seed pool: drop the `cut` points farthest from the coordinate-wise
    // median (capped so at least k candidates remain) before k-means++.
    std::vector<int> pool;
    pool.reserve(static_cast<std::size_t>(n));
    const int excluded = std::min(cut, n - k);
    if (excluded > 0) {
        const ParamVector med = coordinate_median(points);
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::vector<double> d0(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            d0[static_cast<std::size_t>(i)] = (points[static_cast<std::size_t>(i)] - med).norm();
        // farthest first; equal distances drop the higher index
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double da = d0[static_cast<std::size_t>(a)];
            const double db = d0[static_cast<std::size_t>(b)];
            if (da != db) return da > db;
            return a > b;
        });
        std::vector<char> dropped(static_cast<std::size_t>(n), 0);
        for (int c = 0; c < excluded; ++c)
            dropped[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])] = 1;
        for (int i = 0; i < n; ++i)
            if (!dropped[static_cast<std::size_t>(i)]) pool.push_back(i);
    } else {
        pool.resize(static_cast<std::size_t>(n));
        std::iota(pool.begin(), pool.end(), 0);
    }

    TrimmedKMeansState st;
    st.trim = trim;
    st.centers = kmeanspp_seed(points, pool, k, rng);
    st.membership.assign(static_cast<std::size_t>(n), -1);
    st.trimmed.assign(static_cast<std::size_t>(n), 0);

    std::vector<double> dist_to_center(static_cast<std::size_t>(n), 0.0);
    for (int it = 0; it < S; ++it) {
        const std::vector<int> prev_membership = st.membership;
        const std::vector<char> prev_trimmed = st.trimmed;

        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (points[static_cast<std::size_t>(i)] - st.centers[0]).norm();
            for (int j = 1; j < k; ++j) {
                const double d =
                    (points[static_cast<std::size_t>(i)] - st.centers[static_cast<std::size_t>(j)])
                        .norm();
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
            st.membership[static_cast<std::size_t>(i)] = best;
            dist_to_center[static_cast<std::size_t>(i)] = best_d;
        }

        std::fill(st.trimmed.begin(), st.trimmed.end(), 0);
        if (cut > 0) {
            std::vector<int> order(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), 0);
            // farthest first; equal distances trim the higher index
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const double da = dist_to_center[static_cast<std::size_t>(a)];
                const double db = dist_to_center[static_cast<std::size_t>(b)];
                if (da != db) return da > db;
                return a > b;
            });
            for (int c = 0; c < cut; ++c)
                st.trimmed[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])] = 1;
        }

        st.iterations_run = it + 1;
        if (st.membership == prev_membership && st.trimmed == prev_trimmed) break;

        for (int j = 0; j < k; ++j) {
            ParamVector sum = ParamVector::Zero(points[0].size());
            int count = 0;
            for (int i = 0; i < n; ++i) {
                if (st.membership[static_cast<std::size_t>(i)] != j ||
                    st.trimmed[static_cast<std::size_t>(i)])
                    continue;
                sum += points[static_cast<std::size_t>(i)];
                ++count;
            }
            if (count > 0) {
                st.centers[static_cast<std::size_t>(j)] = sum / static_cast<double>(count);
            } else {
                int far = -1;
                double far_d = -1.0;
                for (int i = 0; i < n; ++i) {
                    if (st.trimmed[static_cast<std::size_t>(i)]) continue;
                    if (dist_to_center[static_cast<std::size_t>(i)] > far_d) {
                        far_d = dist_to_center[static_cast<std::size_t>(i)];
                        far = i;
                    }
                }
                if (far >= 0) st.centers[static_cast<std::size_t>(j)] = points[static_cast<std::size_t>(far)];
            }
        }
    }
    return st;
}

std::vector<ParamVector> stage3_aggregate(const std::vector<WorkerSpec>& workers,
                                          const std::vector<int>& memberships,
                                          const std::vector<ParamVector>& centers,
                                          const LossModel& model, double beta, double gamma, int T,
                                          const ParameterSpace& space, TrimDivisor divisor,
                                          std::uint64_t attack_seed, const RoundObserver& observer) {
    if (memberships.size() != workers.size())
        throw InvalidInput("stage3_aggregate: membership/worker count mismatch");
    const AggregationRule rule = AggregationRule::trimmed(beta, divisor);

    RoundState state;
    state.params = centers;
    state.assignments.assign(workers.size(), -1);
    for (int t = 0; t < T; ++t) {
        std::vector<GradientReport> reports;
        reports.reserve(workers.size());
        for (std::size_t i = 0; i < workers.size(); ++i) {
            const int j = memberships[i];
            if (j < 0) continue;  // trimmed out in stage II
            const WorkerSpec& w = workers[i];
            if (w.byzantine && w.strategy.kind == AttackKind::arbitrary_vector) {
                RngStream attack_rng(attack_seed,
                                     {stream_label::attack, static_cast<std::uint64_t>(w.index),
                                      static_cast<std::uint64_t>(t)});
                reports.push_back(worker_report(w, state.params, model, j, &attack_rng));
            } else {
                reports.push_back(worker_report(w, state.params, model, j));
            }
        }
        state = server_round(state, reports, rule, gamma, space);
        if (observer) observer(t + 1, state.params);
    }
    return state.params;
}

TrialRecord run_three_stage(const ExperimentConfig& cfg, const GroundTruth& truth,
                            const std::vector<WorkerSpec>& workers, bool measure_time) {
    cfg.validate();
    if (truth.k() != cfg.k) throw InvalidInput("run_three_stage: truth/config cluster mismatch");
    if (static_cast<int>(workers.size()) != cfg.m)
        throw InvalidInput("run_three_stage: worker count does not match config");

    const LossModel model{cfg.model, cfg.d};
    const ParameterSpace space = cfg.space();

    TrialRecord record;
    record.seed = cfg.seed;
    record.method = "three_stage";
    record.config_hash = config_hash(cfg);
    record.rows.reserve(static_cast<std::size_t>(cfg.T) + 1);

    auto start = std::chrono::steady_clock::now();
    const std::vector<ParamVector> erms = stage1_erms(workers, model);
    RngStream kmeans_rng(cfg.seed, {stream_label::kmeans});
    const TrimmedKMeansState st =
        trimmed_kmeans(erms, cfg.k, cfg.beta, cfg.kmeans_iters, kmeans_rng);

    std::vector<int> memberships(workers.size());
    for (std::size_t i = 0; i < workers.size(); ++i)
        memberships[i] = st.trimmed[i] ? -1 : st.membership[i];

    auto stamp = [&](IterationRow& row) {
        if (!measure_time) return;
        row.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                   start)
                             .count();
        start = std::chrono::steady_clock::now();
    };

    IterationRow first = evaluate_round(0, st.centers, truth, memberships, workers);
    stamp(first);
    record.rows.push_back(std::move(first));

    record.final_params = stage3_aggregate(
        workers, memberships, st.centers, model, cfg.beta, cfg.gamma, cfg.T, space,
        cfg.trim_divisor, cfg.seed, [&](int t, const std::vector<ParamVector>& params) {
            IterationRow row = evaluate_round(t, params, truth, memberships, workers);
            stamp(row);
            record.rows.push_back(std::move(row));
        });
    return record;
}

double max_miscluster_fraction(const std::vector<int>& memberships,
                               const std::vector<char>& trimmed,
                               const std::vector<WorkerSpec>& workers, const Matching& matching) {
    if (memberships.size() != workers.size() || trimmed.size() != workers.size())
        throw InvalidInput("max_miscluster_fraction: size mismatch");
    const int k = static_cast<int>(matching.estimate_to_truth.size());
    std::vector<int> total(static_cast<std::size_t>(k), 0), wrong(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < workers.size(); ++i) {
        if (workers[i].byzantine || trimmed[i]) continue;
        const int truth_cluster = workers[i].cluster_id;
        ++total[static_cast<std::size_t>(truth_cluster)];
        const int m = memberships[i];
        const int mapped = (m >= 0 && m < k) ? matching.estimate_to_truth[static_cast<std::size_t>(m)]
                                             : -1;
        if (mapped != truth_cluster) ++wrong[static_cast<std::size_t>(truth_cluster)];
    }
    double rho = 0.0;
    for (int j = 0; j < k; ++j)
        if (total[static_cast<std::size_t>(j)] > 0)
            rho = std::max(rho, static_cast<double>(wrong[static_cast<std::size_t>(j)]) /
                                    static_cast<double>(total[static_cast<std::size_t>(j)]));
    return rho;
}

}  // namespace brifca
