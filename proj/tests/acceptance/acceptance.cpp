// End-to-end acceptance gate: one pass/fail line per criterion, nonzero exit
// if any fails. Criteria pin the tolerances; none of them is statistical
// beyond the stated seed counts, so a pass is reproducible bit for bit.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "brifca/federation.hpp"
#include "brifca/sweep.hpp"
#include "brifca/threestage.hpp"

using namespace brifca;

namespace {

int failures = 0;
std::chrono::steady_clock::time_point mark;

void start() { mark = std::chrono::steady_clock::now(); }

void report(int index, const std::string& name, bool ok, const std::string& detail) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - mark).count();
    std::printf("%s  criterion %d: %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
}

ParamVector vec(std::initializer_list<double> xs) {
    ParamVector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index h = 0;
    for (double x : xs) v[h++] = x;
    return v;
}

// Sort-based per-coordinate references, independent of the nth_element path.
ParamVector median_oracle(const std::vector<ParamVector>& batch) {
    const std::size_t count = batch.size();
    ParamVector out(batch.front().size());
    for (Eigen::Index h = 0; h < out.size(); ++h) {
        std::vector<double> col;
        for (const auto& v : batch) col.push_back(v[h]);
        std::sort(col.begin(), col.end());
        if (count % 2 == 1) {
            out[h] = col[count / 2];
        } else {
            const double lower = col[count / 2 - 1], upper = col[count / 2];
            out[h] = lower + (upper - lower) / 2.0;
        }
    }
    return out;
}

ParamVector trimmed_oracle(const std::vector<ParamVector>& batch, double beta) {
    const std::size_t count = batch.size();
    const std::size_t cut = static_cast<std::size_t>(std::floor(beta * double(count)));
    ParamVector out(batch.front().size());
    for (Eigen::Index h = 0; h < out.size(); ++h) {
        std::vector<double> col;
        for (const auto& v : batch) col.push_back(v[h]);
        std::sort(col.begin(), col.end());
        double sum = 0.0;
        for (std::size_t i = cut; i < count - cut; ++i) sum += col[i];
        out[h] = sum / double(count - 2 * cut);
    }
    return out;
}

void criterion1() {
    start();
    RngStream rng(1, {901});
    int bad = 0;
    const double betas[] = {0.0, 0.1, 0.25};
    for (int rep = 0; rep < 1000; ++rep) {
        const int count = rng.uniform_int(1, 50);
        const int d = rng.uniform_int(1, 8);
        std::vector<ParamVector> batch;
        for (int i = 0; i < count; ++i) {
            ParamVector v(d);
            for (int h = 0; h < d; ++h) v[h] = rng.uniform(-5.0, 5.0);
            batch.push_back(std::move(v));
        }
        if ((coordinate_median(batch) - median_oracle(batch)).norm() != 0.0) ++bad;
        const double beta = betas[rep % 3];
        if ((coordinate_trimmed_mean(batch, beta) - trimmed_oracle(batch, beta)).norm() != 0.0)
            ++bad;
    }
    std::ostringstream detail;
    detail << (1000 - bad) << "/1000 random batches match the sort oracles exactly";
    report(1, "aggregator oracle equivalence", bad == 0, detail.str());
}

void criterion2() {
    start();
    RngStream rng(2, {902});
    double worst = 0.0;
    for (ModelFamily family :
         {ModelFamily::mean_squared, ModelFamily::linreg_squared, ModelFamily::poisson_mean}) {
        const int d = 6;
        LossModel model{family, d};
        for (int rep = 0; rep < 20; ++rep) {
            ParamVector star(d), theta(d);
            for (int h = 0; h < d; ++h) {
                star[h] = family == ModelFamily::poisson_mean ? rng.uniform(0.3, 2.0)
                                                              : rng.uniform(-1.5, 1.5);
                theta[h] = rng.uniform(0.1, 1.5);
            }
            Dataset data = draw_dataset(model, star, 0.3, 15, rng);
            ParamVector g = empirical_gradient(model, theta, data);
            const double h_step = 1e-6;
            for (int h = 0; h < d; ++h) {
                ParamVector up = theta, down = theta;
                up[h] += h_step;
                down[h] -= h_step;
                const double fd =
                    (empirical_loss(model, up, data) - empirical_loss(model, down, data)) /
                    (2.0 * h_step);
                const double rel = std::abs(fd - g[h]) / std::max(1.0, std::abs(g[h]));
                worst = std::max(worst, rel);
            }
        }
    }
    std::ostringstream detail;
    detail << "worst relative error " << worst << " over 3 families x 20 instances (< 1e-5)";
    report(2, "gradient correctness", worst < 1e-5, detail.str());
}

void criterion3() {
    // Single cluster, noiseless, gamma = 1/L = 1/2: the per-round error
    // ratio must sit at or below 1/2 exactly. Dyadic coordinates and a
    // power-of-two sample count keep every mean and step free of rounding.
    start();
    ExperimentConfig cfg;
    cfg.m = 5;
    cfg.k = 1;
    cfg.d = 4;
    cfg.n_per_machine.assign(5, 32);
    cfg.alpha = 0.0;
    cfg.sigma2 = 0.0;
    cfg.gamma = 0.5;
    cfg.T = 50;
    cfg.seed = 3;
    cfg.model = ModelFamily::mean_squared;

    GroundTruth truth;
    truth.params = {vec({0.5, -0.75, 1.0, 0.25})};
    std::vector<WorkerSpec> workers = generate_population(cfg, truth);
    TrialRecord record = run_algorithm(cfg, truth, workers, AggregationRule::median());

    bool ok = record.rows.size() == 51 && record.rows[0].dist > 0.0;
    double worst_ratio = 0.0;
    for (std::size_t t = 0; t + 1 < record.rows.size(); ++t) {
        const double prev = record.rows[t].dist, next = record.rows[t + 1].dist;
        ok = ok && next <= (0.5 + 1e-12) * prev;
        if (prev > 0.0) worst_ratio = std::max(worst_ratio, next / prev);
    }
    std::ostringstream detail;
    detail << "worst per-round ratio " << worst_ratio << " over 50 rounds (<= 0.5 + 1e-12)";
    report(3, "deterministic contraction", ok, detail.str());
}

// Criterion 4 and 7 share the clean-recovery instance.
void criteria4and7() {
    start();
    int recovered = 0, clustered = 0;
    for (int s = 0; s < 20; ++s) {
        ExperimentConfig cfg;
        cfg.m = 60;
        cfg.k = 3;
        cfg.d = 10;
        cfg.n_per_machine.assign(60, 50);
        cfg.alpha = 0.0;
        cfg.sigma2 = 0.01;
        cfg.gamma = 0.5;
        cfg.T = 100;
        cfg.seed = 40000 + static_cast<std::uint64_t>(s);
        cfg.model = ModelFamily::mean_squared;

        TrialRecord record = run_trial(cfg, Method::brifca_median);
        if (record.rows.back().dist <= 0.02) ++recovered;
        if (record.rows.back().cluster_accuracy >= 0.95) ++clustered;
    }
    std::ostringstream d4;
    d4 << recovered << "/20 seeds reach final dist <= 0.02 (need >= 18)";
    report(4, "clean recovery", recovered >= 18, d4.str());
    start();
    std::ostringstream d7;
    d7 << clustered << "/20 seeds reach cluster_accuracy >= 0.95 (need >= 18)";
    report(7, "cluster recovery", clustered >= 18, d7.str());
}

ExperimentConfig study_config(int d, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.m = 200;
    cfg.k = 5;
    cfg.d = d;
    cfg.n_per_machine.assign(200, 100);
    cfg.alpha = 0.05;
    cfg.beta = 0.05;
    cfg.gamma = 0.5;
    cfg.T = 300;
    cfg.sigma2 = 0.2;
    cfg.seed = seed;
    cfg.model = ModelFamily::linreg_squared;
    return cfg;
}

void criterion5() {
    start();
    int sign = 0;
    double mean_trimmed = 0.0, mean_fedavg = 0.0;
    for (int t = 0; t < 10; ++t) {
        ExperimentConfig cfg = study_config(100, trial_seed(7, "c5", 100, t));
        const double tr = run_trial(cfg, Method::brifca_trimmed).rows.back().dist;
        const double fa = run_trial(cfg, Method::ifca_fedavg).rows.back().dist;
        if (tr < fa) ++sign;
        mean_trimmed += tr / 10.0;
        mean_fedavg += fa / 10.0;
    }
    std::ostringstream detail;
    detail << "mean dist trimmed " << mean_trimmed << " vs fedavg " << mean_fedavg << ", paired "
           << sign << "/10 (need mean order + >= 8)";
    report(5, "robustness ordering under attack", mean_trimmed < mean_fedavg && sign >= 8,
           detail.str());
}

void criterion6() {
    start();
    double trimmed20 = 0.0, trimmed500 = 0.0, stage20 = 0.0, stage500 = 0.0;
    for (int t = 0; t < 10; ++t) {
        ExperimentConfig c20 = study_config(20, trial_seed(7, "c6", 20, t));
        ExperimentConfig c500 = study_config(500, trial_seed(7, "c6", 500, t));
        trimmed20 += run_trial(c20, Method::brifca_trimmed).rows.back().dist / 10.0;
        trimmed500 += run_trial(c500, Method::brifca_trimmed).rows.back().dist / 10.0;
        stage20 += run_trial(c20, Method::three_stage).rows.back().dist / 10.0;
        stage500 += run_trial(c500, Method::three_stage).rows.back().dist / 10.0;
    }
    const double ratio_trimmed = trimmed500 / trimmed20;
    const double ratio_stage = stage500 / stage20;
    std::ostringstream detail;
    detail << "d500/d20 dist ratio: three_stage " << ratio_stage << " vs trimmed " << ratio_trimmed
           << " (need three_stage larger)";
    report(6, "three-stage dimension degradation", ratio_stage > ratio_trimmed, detail.str());
}

void criterion8() {
    start();
    // Sixteen honest coordinates spread over [0, 1]; beta = 0.1.
    auto build = [](int honest, int adversarial, double magnitude) {
        std::vector<ParamVector> batch;
        for (int i = 0; i < honest; ++i)
            batch.push_back(vec({double(i) / double(honest - 1)}));
        for (int i = 0; i < adversarial; ++i) batch.push_back(vec({magnitude}));
        return batch;
    };

    // 16 honest + 4 adversarial = 20 reports, floor(0.1 * 20) = 2 < 4: two
    // planted values survive every trim, so the aggregate tracks the
    // magnitude without bound.
    bool ok = true;
    double prev = 1.0;
    for (double mag : {1e2, 1e3, 1e4, 1e5, 1e6}) {
        const double out = coordinate_trimmed_mean(build(16, 4, mag), 0.1)[0];
        ok = ok && out > prev;
        prev = out;
    }
    const double drifted = prev;
    ok = ok && drifted > 1e5;  // 2 * 1e6 / 18 > 1e5: far past any honest value

    // 18 honest + 2 adversarial = 20 reports, 2 <= floor(0.1 * 20): the trim
    // absorbs the attack entirely, pinning the aggregate inside the honest
    // range whatever the magnitude.
    double bounded_hi = 0.0, bounded_lo = 0.0;
    for (double mag : {1e3, 1e6}) {
        bounded_hi = coordinate_trimmed_mean(build(18, 2, mag), 0.1)[0];
        bounded_lo = coordinate_trimmed_mean(build(18, 2, -mag), 0.1)[0];
        ok = ok && bounded_hi >= 0.0 && bounded_hi <= 1.0;
        ok = ok && bounded_lo >= 0.0 && bounded_lo <= 1.0;
    }
    std::ostringstream detail;
    detail << "4 > floor(beta*20) planted reports drift the mean to " << drifted
           << "; 2 <= floor(beta*20) stay inside [0, 1] (last " << bounded_hi << ")";
    report(8, "trimmed-mean breakdown boundary", ok, detail.str());
}

void criterion9() {
    start();
    SweepSpec spec;
    spec.base.m = 10;
    spec.base.k = 2;
    spec.base.d = 4;
    spec.base.n_per_machine.assign(10, 12);
    spec.base.alpha = 0.1;
    spec.base.beta = 0.1;
    spec.base.T = 10;
    spec.base.sigma2 = 0.2;
    spec.base.seed = 77;
    spec.base.model = ModelFamily::mean_squared;
    spec.n_uniform = 12;
    spec.settings = {{"s1", 2, 10}, {"s2", 3, 12}};
    spec.d_values = {4, 6};
    spec.methods = {Method::brifca_median, Method::brifca_trimmed, Method::ifca_fedavg,
                    Method::three_stage};
    spec.trials = 3;

    const auto dir = std::filesystem::path("acceptance_sweep");
    std::filesystem::remove_all(dir);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    spec.parallelism = 1;
    spec.out_dir = (dir / "serial").string();
    SweepResult serial = run_sweep(spec);
    spec.parallelism = 4;
    spec.out_dir = (dir / "parallel").string();
    SweepResult parallel = run_sweep(spec);

    const bool raw_same = slurp(serial.raw_csv_path) == slurp(parallel.raw_csv_path);
    const bool summary_same = slurp(serial.summary_csv_path) == slurp(parallel.summary_csv_path);
    const bool clean = serial.failures.empty() && parallel.failures.empty();
    std::filesystem::remove_all(dir);
    std::ostringstream detail;
    detail << "48-trial grid, serial vs 4 threads: raw " << (raw_same ? "identical" : "DIFFERS")
           << ", summary " << (summary_same ? "identical" : "DIFFERS");
    report(9, "byte-identical determinism", raw_same && summary_same && clean, detail.str());
}

}  // namespace

int main() {
    std::printf("acceptance gate: 9 criteria\n");
    criterion1();
    criterion2();
    criterion3();
    criteria4and7();
    criterion5();
    criterion6();
    criterion8();
    criterion9();
    if (failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", failures);
    return 1;
}
