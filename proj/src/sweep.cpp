#include "brifca/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "brifca/datagen.hpp"
#include "brifca/federation.hpp"
#include "brifca/threestage.hpp"

namespace brifca {

std::string to_string(Method m) {
    switch (m) {
        case Method::brifca_median: return "brifca_median";
        case Method::brifca_trimmed: return "brifca_trimmed";
        case Method::ifca_fedavg: return "ifca_fedavg";
        case Method::three_stage: return "three_stage";
    }
    return "unknown";
}

Method method_from_string(const std::string& name) {
    if (name == "brifca_median") return Method::brifca_median;
    if (name == "brifca_trimmed") return Method::brifca_trimmed;
    if (name == "ifca_fedavg") return Method::ifca_fedavg;
    if (name == "three_stage") return Method::three_stage;
    throw ConfigError("unknown method: " + name);
}

SweepSpec sweep_from_json_text(const std::string& text) {
    SweepSpec spec;
    spec.base = config_from_json_text(text);
    spec.n_uniform = spec.base.n_per_machine.empty() ? 100 : spec.base.n_per_machine.front();

    nlohmann::json j = nlohmann::json::parse(text);
    try {
        if (j.contains("trials")) spec.trials = j["trials"].get<int>();
        if (j.contains("d_sweep")) spec.d_values = j["d_sweep"].get<std::vector<int>>();
        if (j.contains("methods"))
            for (const auto& name : j["methods"])
                spec.methods.push_back(method_from_string(name.get<std::string>()));
        if (j.contains("settings")) {
            const bool uniform_n =
                std::all_of(spec.base.n_per_machine.begin(), spec.base.n_per_machine.end(),
                            [&](int n) { return n == spec.n_uniform; });
            if (j.contains("n_per_machine") && !uniform_n)
                throw ConfigError("a settings sweep needs a uniform per-machine sample count");
            for (const auto& s : j["settings"]) {
                SettingSpec set;
                set.name = s.at("name").get<std::string>();
                set.k = s.at("k").get<int>();
                set.m = s.at("m").get<int>();
                spec.settings.push_back(std::move(set));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("sweep config type error: ") + e.what());
    }
    if (spec.settings.empty())
        spec.settings.push_back({"base", spec.base.k, spec.base.m});
    if (spec.d_values.empty()) spec.d_values.push_back(spec.base.d);
    if (spec.methods.empty())
        spec.methods = {Method::brifca_median, Method::brifca_trimmed, Method::ifca_fedavg,
                        Method::three_stage};
    if (spec.trials < 1) throw ConfigError("trials must be >= 1");
    return spec;
}

SweepSpec load_sweep(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return sweep_from_json_text(buf.str());
}

namespace {

constexpr std::uint64_t fnv_basis = 0xcbf29ce484222325ULL;
constexpr std::uint64_t fnv_prime = 0x100000001b3ULL;

std::uint64_t fnv_u64(std::uint64_t h, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
        h = (h ^ ((v >> (8 * b)) & 0xffULL)) * fnv_prime;
    }
    return h;
}

std::uint64_t fnv_text(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) h = (h ^ c) * fnv_prime;
    return h;
}

std::uint64_t splitmix_final(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void write_double(std::ostream& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, static_cast<std::streamsize>(res.ptr - buf));
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& setting, int d, int trial) {
    std::uint64_t h = fnv_basis;
    h = fnv_u64(h, base_seed);
    h = fnv_text(h, setting);
    h = fnv_u64(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(d)));
    h = fnv_u64(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(trial)));
    return splitmix_final(h);
}

TrialRecord run_trial(const ExperimentConfig& cfg, Method method, bool measure_time) {
    cfg.validate();
    RngStream truth_rng(cfg.seed, {stream_label::ground_truth});
    GroundTruth truth = generate_ground_truth(cfg.k, cfg.d, truth_rng);
    const std::vector<WorkerSpec> workers = generate_population(cfg, truth);
    switch (method) {
        case Method::brifca_median:
            return run_algorithm(cfg, truth, workers, AggregationRule::median(), measure_time);
        case Method::brifca_trimmed:
            return run_algorithm(cfg, truth, workers,
                                 AggregationRule::trimmed(cfg.beta, cfg.trim_divisor),
                                 measure_time);
        case Method::ifca_fedavg:
            return run_algorithm(cfg, truth, workers, AggregationRule::mean(), measure_time);
        case Method::three_stage:
            return run_three_stage(cfg, truth, workers, measure_time);
    }
    throw InvalidInput("run_trial: unknown method");
}

namespace {

struct Task {
    SettingSpec setting;
    int d = 0;
    Method method{};
    int trial = 0;
    ExperimentConfig cfg;
};

ExperimentConfig cell_config(const SweepSpec& spec, const SettingSpec& setting, int d, int trial) {
    ExperimentConfig cfg = spec.base;
    cfg.k = setting.k;
    cfg.m = setting.m;
    cfg.d = d;
    if (setting.m == spec.base.m) {
        cfg.n_per_machine = spec.base.n_per_machine;
    } else {
        cfg.n_per_machine.assign(static_cast<std::size_t>(setting.m), spec.n_uniform);
    }
    cfg.seed = trial_seed(spec.base.seed, setting.name, d, trial);
    cfg.validate();
    return cfg;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    std::vector<Task> tasks;
    for (const auto& setting : spec.settings)
        for (int d : spec.d_values)
            for (Method method : spec.methods)
                for (int trial = 0; trial < spec.trials; ++trial)
                    tasks.push_back({setting, d, method, trial,
                                     cell_config(spec, setting, d, trial)});

    std::filesystem::create_directories(spec.out_dir);
    const auto raw_path = std::filesystem::path(spec.out_dir) / "raw.csv";
    const auto summary_path = std::filesystem::path(spec.out_dir) / "summary.csv";
    std::ofstream raw(raw_path);
    std::ofstream summary(summary_path);
    if (!raw || !summary)
        throw std::runtime_error("run_sweep: cannot write under " + spec.out_dir);
    raw << "setting,method,d,k,m,trial,iteration,dist,cluster_accuracy,elapsed_ms\n";
    summary << "setting,method,d,k,m,trials,mean_dist,stderr_dist,mean_accuracy\n";

    std::vector<std::optional<TrialRecord>> records(tasks.size());
    std::vector<std::string> failures_by_task(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex log_mutex;
    const std::size_t report_every = std::max<std::size_t>(1, tasks.size() / 20);

    auto run_tasks = [&]() {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= tasks.size()) return;
            const Task& task = tasks[idx];
            try {
                records[idx] = run_trial(task.cfg, task.method, spec.timing);
            } catch (const std::exception& e) {
                std::ostringstream what;
                what << "trial failed: setting=" << task.setting.name << " method="
                     << to_string(task.method) << " d=" << task.d << " trial=" << task.trial
                     << ": " << e.what();
                failures_by_task[idx] = what.str();
            }
            const std::size_t finished = done.fetch_add(1) + 1;
            if (finished % report_every == 0 || finished == tasks.size()) {
                std::lock_guard<std::mutex> lock(log_mutex);
                std::cerr << "sweep: " << finished << "/" << tasks.size() << " trials done\n";
            }
        }
    };

    const int width = std::max(1, spec.parallelism);
    if (width == 1) {
        run_tasks();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(width));
        for (int t = 0; t < width; ++t) pool.emplace_back(run_tasks);
        for (auto& th : pool) th.join();
    }

    SweepResult result;
    result.raw_csv_path = raw_path.string();
    result.summary_csv_path = summary_path.string();

    // Raw rows in task-enumeration order: bytes are scheduling-independent.
    for (std::size_t idx = 0; idx < tasks.size(); ++idx) {
        const Task& task = tasks[idx];
        if (!records[idx]) {
            result.failures.push_back(failures_by_task[idx]);
            continue;
        }
        for (const IterationRow& row : records[idx]->rows) {
            raw << task.setting.name << ',' << records[idx]->method << ',' << task.d << ','
                << task.setting.k << ',' << task.setting.m << ',' << task.trial << ','
                << row.iteration << ',';
            write_double(raw, row.dist);
            raw << ',';
            write_double(raw, row.cluster_accuracy);
            raw << ',';
            write_double(raw, row.elapsed_ms);
            raw << '\n';
        }
    }

    // One summary row per cell; tasks are enumerated trials-innermost.
    for (std::size_t base = 0; base < tasks.size(); base += static_cast<std::size_t>(spec.trials)) {
        const Task& head = tasks[base];
        std::vector<double> dists, accs;
        for (int t = 0; t < spec.trials; ++t) {
            const auto& rec = records[base + static_cast<std::size_t>(t)];
            if (!rec) continue;
            dists.push_back(rec->rows.back().dist);
            accs.push_back(rec->rows.back().cluster_accuracy);
        }
        CellSummary cell;
        cell.setting = head.setting.name;
        cell.method = to_string(head.method);
        cell.d = head.d;
        cell.k = head.setting.k;
        cell.m = head.setting.m;
        cell.trials = static_cast<int>(dists.size());
        if (!dists.empty()) {
            double sum = 0.0;
            for (double v : dists) sum += v;
            cell.mean_dist = sum / static_cast<double>(dists.size());
            if (dists.size() > 1) {
                double ss = 0.0;
                for (double v : dists) ss += (v - cell.mean_dist) * (v - cell.mean_dist);
                cell.stderr_dist = std::sqrt(ss / static_cast<double>(dists.size() - 1)) /
                                   std::sqrt(static_cast<double>(dists.size()));
            }
            double acc_sum = 0.0;
            for (double v : accs) acc_sum += v;
            cell.mean_accuracy = acc_sum / static_cast<double>(accs.size());
        }
        summary << cell.setting << ',' << cell.method << ',' << cell.d << ',' << cell.k << ','
                << cell.m << ',' << cell.trials << ',';
        write_double(summary, cell.mean_dist);
        summary << ',';
        write_double(summary, cell.stderr_dist);
        summary << ',';
        write_double(summary, cell.mean_accuracy);
        summary << '\n';
        result.summary.push_back(std::move(cell));
    }
    return result;
}

DiagnosticsOutput diagnose(const ExperimentConfig& cfg) {
    cfg.validate();
    const LossModel model{cfg.model, cfg.d};
    RngStream truth_rng(cfg.seed, {stream_label::ground_truth});
    const GroundTruth truth = generate_ground_truth(cfg.k, cfg.d, truth_rng);
    RngStream probe_rng(cfg.seed, {stream_label::probe});

    DiagnosticsOutput out;
    out.estimates = estimate_assumptions(model, truth, cfg.space(), cfg.sigma2, 5, probe_rng);
    out.min_cluster_fraction =
        static_cast<double>(cfg.honest_count() / cfg.k) / static_cast<double>(cfg.m);

    auto check = [&out](bool ok, const std::string& text) {
        out.lines.push_back((ok ? "pass: " : "warn: ") + text);
        if (!ok) out.any_warning = true;
    };
    std::ostringstream line;

    const double ratio = out.min_cluster_fraction > 0.0
                             ? 4.0 * cfg.alpha / out.min_cluster_fraction
                             : std::numeric_limits<double>::infinity();
    line << "Byzantine budget 4*alpha/p = " << ratio << " vs trim level beta = " << cfg.beta;
    check(ratio <= cfg.beta, line.str());

    const double delta = truth.min_separation();
    line.str("");
    if (std::isfinite(delta)) {
        // mis-clustering scale from the per-machine loss concentration
        const double needed = static_cast<double>(cfg.k) * out.estimates.eta2_hat /
                              (out.estimates.lambda_hat * out.estimates.lambda_hat * delta * delta *
                               delta * delta);
        line << "n_min = " << cfg.n_min() << " vs separation-driven sample demand k*eta^2/(lambda^2*delta^4) = "
             << needed;
        check(static_cast<double>(cfg.n_min()) >= needed, line.str());

        line.str("");
        const double warm_radius = delta / 4.0;
        const double floor_hat = std::sqrt(out.estimates.nu2_hat) / out.estimates.lambda_hat *
                                 (cfg.alpha / std::sqrt(static_cast<double>(cfg.n_min())) +
                                  1.0 / std::sqrt(static_cast<double>(cfg.n_min()) *
                                                  static_cast<double>(cfg.honest_count())));
        line << "estimated error floor " << floor_hat << " vs warm-init radius delta/4 = "
             << warm_radius;
        check(floor_hat <= warm_radius, line.str());
    } else {
        out.lines.push_back("pass: single cluster, separation conditions vacuous");
    }

    line.str("");
    line << "step size gamma = " << cfg.gamma << " vs 1/L_hat = " << 1.0 / out.estimates.L_hat;
    check(cfg.gamma <= 1.0001 / out.estimates.L_hat, line.str());

    line.str("");
    line << "info: lambda_hat=" << out.estimates.lambda_hat << " L_hat=" << out.estimates.L_hat
         << " eta2_hat=" << out.estimates.eta2_hat << " nu2_hat=" << out.estimates.nu2_hat
         << " skew_hat=" << out.estimates.skew_hat << " delta=" << delta;
    out.lines.push_back(line.str());
    return out;
}

}  // namespace brifca
