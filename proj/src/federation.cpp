#include "brifca/federation.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

namespace brifca {

namespace {

int argmin_loss(const Dataset& data, const std::vector<ParamVector>& params,
                const LossModel& model) {
    int best = 0;
    double best_loss = empirical_loss(model, params[0], data);
    for (int j = 1; j < static_cast<int>(params.size()); ++j) {
        const double loss = empirical_loss(model, params[static_cast<std::size_t>(j)], data);
        if (loss < best_loss) {
            best_loss = loss;
            best = j;
        }
    }
    return best;
}

double elapsed_ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

int assign_cluster(const WorkerSpec& worker, const std::vector<ParamVector>& params,
                   const LossModel& model, int omniscient_target, const Dataset* data_override) {
    if (params.empty()) throw InvalidInput("assign_cluster: no parameters");
    if (worker.byzantine && worker.strategy.kind == AttackKind::omniscient_target_smallest &&
        omniscient_target >= 0 && omniscient_target < static_cast<int>(params.size()))
        return omniscient_target;
    return argmin_loss(data_override ? *data_override : worker.data, params, model);
}

GradientReport worker_report(const WorkerSpec& worker, const std::vector<ParamVector>& params,
                             const LossModel& model, int assignment, RngStream* attack_rng,
                             const Dataset* data_override) {
    if (assignment < 0 || assignment >= static_cast<int>(params.size()))
        throw InvalidInput("worker_report: assignment out of range");
    const Dataset& data = data_override ? *data_override : worker.data;
    const ParamVector& theta = params[static_cast<std::size_t>(assignment)];

    GradientReport report;
    report.machine = worker.index;
    report.reported_cluster = assignment;
    if (!worker.byzantine) {
        report.g = empirical_gradient(model, theta, data);
        return report;
    }
    switch (worker.strategy.kind) {
        case AttackKind::scaled_eval:
        case AttackKind::omniscient_target_smallest:
            report.g = empirical_gradient(model, 3.0 * theta, data);
            break;
        case AttackKind::sign_flip:
            report.g = -empirical_gradient(model, theta, data);
            break;
        case AttackKind::arbitrary_vector: {
            if (!attack_rng)
                throw InvalidInput("worker_report: arbitrary_vector needs an attack stream");
            ParamVector direction(theta.size());
            double norm = 0.0;
            do {
                for (Eigen::Index h = 0; h < direction.size(); ++h)
                    direction[h] = attack_rng->normal();
                norm = direction.norm();
            } while (norm == 0.0);
            report.g = direction * (worker.strategy.magnitude / norm);
            break;
        }
    }
    return report;
}

RoundState server_round(const RoundState& state, const std::vector<GradientReport>& reports,
                        const AggregationRule& rule, double gamma, const ParameterSpace& space,
                        int* rejected) {
    const int k = static_cast<int>(state.params.size());
    if (k == 0) throw InvalidInput("server_round: no cluster parameters");

    int machines = static_cast<int>(state.assignments.size());
    for (const auto& r : reports) machines = std::max(machines, r.machine + 1);

    RoundState next;
    next.iteration = state.iteration + 1;
    next.params = state.params;
    next.assignments.assign(static_cast<std::size_t>(machines), -1);
    next.rosters.assign(static_cast<std::size_t>(k), {});

    std::vector<std::vector<ParamVector>> batches(static_cast<std::size_t>(k));
    for (const auto& r : reports) {
        const bool valid = r.machine >= 0 && r.reported_cluster >= 0 && r.reported_cluster < k &&
                           r.g.size() == state.params[0].size() && r.g.allFinite();
        if (!valid) {
            if (rejected) ++*rejected;
            std::cerr << "server_round: rejected report from machine " << r.machine << "\n";
            continue;
        }
        next.assignments[static_cast<std::size_t>(r.machine)] = r.reported_cluster;
        next.rosters[static_cast<std::size_t>(r.reported_cluster)].push_back(r.machine);
        batches[static_cast<std::size_t>(r.reported_cluster)].push_back(r.g);
    }

    for (int j = 0; j < k; ++j) {
        if (batches[static_cast<std::size_t>(j)].empty()) continue;  // roster empty: frozen
        const ParamVector g = aggregate(rule, batches[static_cast<std::size_t>(j)]);
        next.params[static_cast<std::size_t>(j)] =
            project(state.params[static_cast<std::size_t>(j)] - gamma * g, space);
    }
    return next;
}

std::string method_name(const AggregationRule& rule) {
    switch (rule.kind) {
        case AggregationKind::median: return "brifca_median";
        case AggregationKind::trimmed_mean: return "brifca_trimmed";
        case AggregationKind::mean: return "ifca_fedavg";
    }
    return "unknown";
}

std::vector<ParamVector> initial_params(const ExperimentConfig& cfg, const GroundTruth& truth) {
    const ParameterSpace theta_space = cfg.space();
    std::vector<ParamVector> params;
    params.reserve(truth.params.size());
    for (int j = 0; j < truth.k(); ++j) {
        RngStream rng(cfg.seed, {stream_label::init, static_cast<std::uint64_t>(j)});
        if (cfg.init_mode == InitMode::random) {
            params.push_back(uniform_in_ball(theta_space, rng));
            continue;
        }
        double separation = truth.min_separation();
        if (!std::isfinite(separation)) separation = 1.0;  // k = 1: no pairwise gap
        ParameterSpace around;
        around.radius = separation / 4.0;
        around.center = truth.params[static_cast<std::size_t>(j)];
        params.push_back(project(uniform_in_ball(around, rng), theta_space));
    }
    return params;
}

TrialRecord run_algorithm(const ExperimentConfig& cfg, const GroundTruth& truth,
                          const std::vector<WorkerSpec>& workers, const AggregationRule& rule,
                          bool measure_time) {
    cfg.validate();
    if (truth.k() != cfg.k) throw InvalidInput("run_algorithm: truth/config cluster mismatch");
    if (static_cast<int>(workers.size()) != cfg.m)
        throw InvalidInput("run_algorithm: worker count does not match config");

    const LossModel model{cfg.model, cfg.d};
    const ParameterSpace space = cfg.space();
    int omniscient_target = -1;
    if (cfg.attack == AttackKind::omniscient_target_smallest && !truth.cluster_sizes.empty())
        omniscient_target = truth.smallest_cluster();

    TrialRecord record;
    record.seed = cfg.seed;
    record.method = method_name(rule);
    record.config_hash = config_hash(cfg);
    record.rows.reserve(static_cast<std::size_t>(cfg.T) + 1);

    auto start = std::chrono::steady_clock::now();
    RoundState state;
    state.iteration = 0;
    state.params = initial_params(cfg, truth);

    for (int t = 0; t < cfg.T; ++t) {
        std::vector<int> assignments(workers.size(), -1);
        std::vector<GradientReport> reports;
        reports.reserve(workers.size());
        for (std::size_t i = 0; i < workers.size(); ++i) {
            const WorkerSpec& w = workers[i];
            Dataset assign_data, grad_data;
            const Dataset *assign_ptr = nullptr, *grad_ptr = nullptr;
            if (cfg.resampling) {
                const int s = w.data.n() / (2 * cfg.T);
                assign_data = w.data.rows(2 * t * s, (2 * t + 1) * s);
                grad_data = w.data.rows((2 * t + 1) * s, (2 * t + 2) * s);
                assign_ptr = &assign_data;
                grad_ptr = &grad_data;
            }
            const int a = assign_cluster(w, state.params, model, omniscient_target, assign_ptr);
            assignments[i] = a;
            if (w.byzantine && w.strategy.kind == AttackKind::arbitrary_vector) {
                RngStream attack_rng(cfg.seed,
                                     {stream_label::attack, static_cast<std::uint64_t>(w.index),
                                      static_cast<std::uint64_t>(t)});
                reports.push_back(worker_report(w, state.params, model, a, &attack_rng, grad_ptr));
            } else {
                reports.push_back(worker_report(w, state.params, model, a, nullptr, grad_ptr));
            }
        }
        IterationRow row = evaluate_round(t, state.params, truth, assignments, workers);
        state = server_round(state, reports, rule, cfg.gamma, space, &record.rejected_reports);
        if (measure_time) {
            row.elapsed_ms = elapsed_ms_since(start);
            start = std::chrono::steady_clock::now();
        }
        record.rows.push_back(std::move(row));
    }

    // Final scoring pass: assignments for the output parameters, full data.
    std::vector<int> final_assignments(workers.size(), -1);
    for (std::size_t i = 0; i < workers.size(); ++i)
        final_assignments[i] =
            assign_cluster(workers[i], state.params, model, omniscient_target, nullptr);
    IterationRow last = evaluate_round(cfg.T, state.params, truth, final_assignments, workers);
    if (measure_time) last.elapsed_ms = elapsed_ms_since(start);
    record.rows.push_back(std::move(last));
    record.final_params = std::move(state.params);
    return record;
}

}  // namespace brifca
