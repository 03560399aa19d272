#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "brifca/metrics.hpp"
#include "brifca/rng.hpp"

using namespace brifca;

namespace {

ParamVector vec2(double a, double b) {
    ParamVector v(2);
    v << a, b;
    return v;
}

std::vector<ParamVector> random_params(RngStream& rng, int k, int d) {
    std::vector<ParamVector> out;
    for (int j = 0; j < k; ++j) {
        ParamVector v(d);
        for (int h = 0; h < d; ++h) v[h] = rng.uniform(-2.0, 2.0);
        out.push_back(std::move(v));
    }
    return out;
}

double brute_force_cost(const std::vector<ParamVector>& estimates,
                        const std::vector<ParamVector>& truth) {
    const int k = static_cast<int>(estimates.size());
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (int e = 0; e < k; ++e)
            cost += (estimates[static_cast<std::size_t>(e)] -
                     truth[static_cast<std::size_t>(perm[static_cast<std::size_t>(e)])])
                        .norm();
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

WorkerSpec honest_worker(int index, int cluster) {
    WorkerSpec w;
    w.index = index;
    w.cluster_id = cluster;
    return w;
}

}  // namespace

TEST_CASE("hungarian equals brute force for k <= 6") {
    RngStream rng(51, {1100});
    for (int k = 1; k <= 6; ++k) {
        for (int rep = 0; rep < 12; ++rep) {
            const auto estimates = random_params(rng, k, 3);
            const auto truth = random_params(rng, k, 3);
            const Matching m = optimal_matching(estimates, truth);
            // a valid permutation
            std::vector<int> seen(static_cast<std::size_t>(k), 0);
            for (int t : m.estimate_to_truth) {
                REQUIRE(t >= 0);
                REQUIRE(t < k);
                ++seen[static_cast<std::size_t>(t)];
            }
            for (int s : seen) CHECK(s == 1);
            CHECK(m.total_cost == doctest::Approx(brute_force_cost(estimates, truth)).epsilon(1e-12));
        }
    }
}

TEST_CASE("dist: identity, label swap, hand value") {
    GroundTruth truth;
    truth.params = {vec2(1.0, 0.0), vec2(0.0, 1.0)};
    CHECK(dist({vec2(1.0, 0.0), vec2(0.0, 1.0)}, truth) == 0.0);
    CHECK(dist({vec2(0.0, 1.0), vec2(1.0, 0.0)}, truth) == 0.0);
    // one estimate off by (0.6, 0.8): dist = (1/2)(0 + 1) = 0.5
    CHECK(dist({vec2(1.6, 0.8), vec2(0.0, 1.0)}, truth) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("dist is invariant to estimate ordering") {
    RngStream rng(52, {1101});
    GroundTruth truth;
    truth.params = random_params(rng, 5, 4);
    auto estimates = random_params(rng, 5, 4);
    const double base = dist(estimates, truth);
    std::reverse(estimates.begin(), estimates.end());
    CHECK(dist(estimates, truth) == doctest::Approx(base).epsilon(1e-12));
    std::swap(estimates[0], estimates[3]);
    CHECK(dist(estimates, truth) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("dist vanishes exactly when the multisets agree") {
    RngStream rng(53, {1102});
    GroundTruth truth;
    truth.params = random_params(rng, 4, 3);
    auto estimates = truth.params;
    std::rotate(estimates.begin(), estimates.begin() + 2, estimates.end());
    CHECK(dist(estimates, truth) < 1e-12);
    estimates[1][0] += 1e-3;
    CHECK(dist(estimates, truth) > 1e-12);
}

TEST_CASE("dist validates shape") {
    GroundTruth truth;
    truth.params = {vec2(0.0, 0.0)};
    CHECK_THROWS_AS(dist({}, truth), InvalidInput);
    CHECK_THROWS_AS(dist({vec2(0.0, 0.0), vec2(1.0, 1.0)}, truth), InvalidInput);
}

TEST_CASE("cluster_accuracy: hand cases") {
    GroundTruth truth;
    truth.params = {vec2(1.0, 0.0), vec2(0.0, 1.0)};
    std::vector<WorkerSpec> workers;
    for (int i = 0; i < 8; ++i) workers.push_back(honest_worker(i, i % 2));
    const Matching identity = optimal_matching(truth.params, truth.params);

    std::vector<int> perfect = {0, 1, 0, 1, 0, 1, 0, 1};
    CHECK(cluster_accuracy(perfect, workers, identity) == 1.0);

    std::vector<int> all_zero(8, 0);
    CHECK(cluster_accuracy(all_zero, workers, identity) == 0.5);

    std::vector<int> unassigned(8, -1);
    CHECK(cluster_accuracy(unassigned, workers, identity) == 0.0);

    // under swapped estimates the matching relabels and accuracy flips back
    const Matching swapped =
        optimal_matching({truth.params[1], truth.params[0]}, truth.params);
    std::vector<int> swapped_assignments = {1, 0, 1, 0, 1, 0, 1, 0};
    CHECK(cluster_accuracy(swapped_assignments, workers, swapped) == 1.0);
}

TEST_CASE("cluster_accuracy ignores byzantine workers") {
    GroundTruth truth;
    truth.params = {vec2(1.0, 0.0), vec2(0.0, 1.0)};
    const Matching identity = optimal_matching(truth.params, truth.params);
    std::vector<WorkerSpec> workers;
    for (int i = 0; i < 4; ++i) workers.push_back(honest_worker(i, 0));
    workers.push_back([] {
        WorkerSpec w;
        w.index = 4;
        w.byzantine = true;
        w.cluster_id = -1;
        return w;
    }());
    std::vector<int> assignments = {0, 0, 0, 0, 1};  // byzantine report is irrelevant
    CHECK(cluster_accuracy(assignments, workers, identity) == 1.0);
}

TEST_CASE("cluster_accuracy equals a direct counting oracle on random inputs") {
    RngStream rng(54, {1103});
    GroundTruth truth;
    const int k = 4;
    truth.params = random_params(rng, k, 3);
    const auto estimates = random_params(rng, k, 3);
    const Matching m = optimal_matching(estimates, truth.params);

    std::vector<WorkerSpec> workers;
    std::vector<int> assignments;
    for (int i = 0; i < 60; ++i) {
        WorkerSpec w = honest_worker(i, rng.uniform_int(0, k - 1));
        w.byzantine = rng.uniform01() < 0.2;
        workers.push_back(w);
        assignments.push_back(rng.uniform_int(-1, k - 1));
    }
    int honest = 0, correct = 0;
    for (std::size_t i = 0; i < workers.size(); ++i) {
        if (workers[i].byzantine) continue;
        ++honest;
        const int a = assignments[i];
        if (a >= 0 && m.estimate_to_truth[static_cast<std::size_t>(a)] == workers[i].cluster_id)
            ++correct;
    }
    CHECK(cluster_accuracy(assignments, workers, m) ==
          doctest::Approx(static_cast<double>(correct) / honest).epsilon(1e-15));
}

TEST_CASE("evaluate_round ties dist to the per-cluster errors") {
    RngStream rng(55, {1104});
    GroundTruth truth;
    truth.params = random_params(rng, 3, 4);
    const auto estimates = random_params(rng, 3, 4);
    std::vector<WorkerSpec> workers;
    std::vector<int> assignments;
    for (int i = 0; i < 9; ++i) {
        workers.push_back(honest_worker(i, i % 3));
        assignments.push_back(i % 3);
    }
    const IterationRow row = evaluate_round(7, estimates, truth, assignments, workers);
    CHECK(row.iteration == 7);
    REQUIRE(row.per_cluster_err.size() == 3);
    const double mean_err =
        (row.per_cluster_err[0] + row.per_cluster_err[1] + row.per_cluster_err[2]) / 3.0;
    CHECK(row.dist == doctest::Approx(mean_err).epsilon(1e-12));
    CHECK(row.dist == doctest::Approx(dist(estimates, truth)).epsilon(1e-12));
}
