// Python module exposing the main operations: aggregation rules, loss
// family primitives, data generation, the round loop, the baseline, metrics
// and the sweep runner.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "brifca/aggregation.hpp"
#include "brifca/core.hpp"
#include "brifca/datagen.hpp"
#include "brifca/federation.hpp"
#include "brifca/metrics.hpp"
#include "brifca/model.hpp"
#include "brifca/sweep.hpp"
#include "brifca/threestage.hpp"

namespace py = pybind11;
using namespace brifca;

namespace {

LossModel make_model(const std::string& family, int dim) {
    LossModel model;
    model.dim = dim;
    if (family == "mean_squared") model.family = ModelFamily::mean_squared;
    else if (family == "linreg_squared") model.family = ModelFamily::linreg_squared;
    else if (family == "poisson_mean") model.family = ModelFamily::poisson_mean;
    else throw InvalidInput("unknown model family: " + family);
    return model;
}

Dataset make_dataset(const Eigen::MatrixXd& points, const Eigen::VectorXd& responses) {
    Dataset data;
    data.points = points;
    data.responses = responses;
    return data;
}

py::dict record_to_dict(const TrialRecord& record) {
    py::list iterations, dists, accuracies;
    for (const auto& row : record.rows) {
        iterations.append(row.iteration);
        dists.append(row.dist);
        accuracies.append(row.cluster_accuracy);
    }
    py::dict out;
    out["seed"] = record.seed;
    out["method"] = record.method;
    out["config_hash"] = record.config_hash;
    out["rejected_reports"] = record.rejected_reports;
    out["iteration"] = iterations;
    out["dist"] = dists;
    out["cluster_accuracy"] = accuracies;
    out["final_params"] = record.final_params;
    return out;
}

}  // namespace

PYBIND11_MODULE(_brifca, m) {
    m.doc() = "robust clustered federated learning core";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<InvalidInput>(m, "InvalidInputError");
    py::register_exception<OverTrim>(m, "OverTrimError");
    py::register_exception<EmptyAggregate>(m, "EmptyAggregateError");

    m.def("coordinate_median", &coordinate_median, py::arg("batch"));
    m.def(
        "coordinate_trimmed_mean",
        [](const std::vector<ParamVector>& batch, double beta) {
            return coordinate_trimmed_mean(batch, beta);
        },
        py::arg("batch"), py::arg("beta"));
    m.def(
        "fedavg_mean", [](const std::vector<ParamVector>& batch) { return fedavg_mean(batch); },
        py::arg("batch"));

    m.def(
        "project",
        [](const ParamVector& theta, double radius) {
            return project(theta, ParameterSpace::ball(theta.size(), radius));
        },
        py::arg("theta"), py::arg("radius"));

    m.def(
        "empirical_loss",
        [](const std::string& family, const ParamVector& theta, const Eigen::MatrixXd& points,
           const Eigen::VectorXd& responses) {
            return empirical_loss(make_model(family, static_cast<int>(theta.size())), theta,
                                  make_dataset(points, responses));
        },
        py::arg("family"), py::arg("theta"), py::arg("points"),
        py::arg("responses") = Eigen::VectorXd());
    m.def(
        "empirical_gradient",
        [](const std::string& family, const ParamVector& theta, const Eigen::MatrixXd& points,
           const Eigen::VectorXd& responses) {
            return empirical_gradient(make_model(family, static_cast<int>(theta.size())), theta,
                                      make_dataset(points, responses));
        },
        py::arg("family"), py::arg("theta"), py::arg("points"),
        py::arg("responses") = Eigen::VectorXd());
    m.def(
        "local_erm",
        [](const std::string& family, int dim, const Eigen::MatrixXd& points,
           const Eigen::VectorXd& responses) {
            return local_erm(make_model(family, dim), make_dataset(points, responses),
                             DegeneratePolicy::ridge);
        },
        py::arg("family"), py::arg("dim"), py::arg("points"),
        py::arg("responses") = Eigen::VectorXd());

    m.def(
        "generate_ground_truth",
        [](int k, int d, std::uint64_t seed) {
            RngStream rng(seed, {stream_label::ground_truth});
            return generate_ground_truth(k, d, rng).params;
        },
        py::arg("k"), py::arg("d"), py::arg("seed"));

    m.def(
        "trimmed_kmeans",
        [](const std::vector<ParamVector>& points, int k, double trim, int iters,
           std::uint64_t seed) {
            RngStream rng(seed, {stream_label::kmeans});
            const TrimmedKMeansState st = trimmed_kmeans(points, k, trim, iters, rng);
            py::dict out;
            out["centers"] = st.centers;
            out["membership"] = st.membership;
            out["trimmed"] = std::vector<int>(st.trimmed.begin(), st.trimmed.end());
            out["iterations_run"] = st.iterations_run;
            return out;
        },
        py::arg("points"), py::arg("k"), py::arg("trim"), py::arg("iters"), py::arg("seed"));

    m.def(
        "dist",
        [](const std::vector<ParamVector>& estimates, const std::vector<ParamVector>& truth) {
            GroundTruth gt;
            gt.params = truth;
            return dist(estimates, gt);
        },
        py::arg("estimates"), py::arg("truth"));

    m.def(
        "run_trial",
        [](const std::string& config_json, const std::string& method) {
            const ExperimentConfig cfg = config_from_json_text(config_json);
            return record_to_dict(run_trial(cfg, method_from_string(method)));
        },
        py::arg("config_json"), py::arg("method"));

    m.def(
        "diagnose",
        [](const std::string& config_json) {
            const DiagnosticsOutput out = diagnose(config_from_json_text(config_json));
            py::dict d;
            d["lines"] = out.lines;
            d["any_warning"] = out.any_warning;
            d["min_cluster_fraction"] = out.min_cluster_fraction;
            d["lambda_hat"] = out.estimates.lambda_hat;
            d["L_hat"] = out.estimates.L_hat;
            d["eta2_hat"] = out.estimates.eta2_hat;
            d["nu2_hat"] = out.estimates.nu2_hat;
            d["skew_hat"] = out.estimates.skew_hat;
            return d;
        },
        py::arg("config_json"));

    py::class_<RngStream>(m, "RngStream")
        .def(py::init([](std::uint64_t seed, const std::vector<std::uint64_t>& labels) {
                 return RngStream(seed, std::span<const std::uint64_t>(labels));
             }),
             py::arg("seed"), py::arg("labels"))
        .def("next_u64", &RngStream::next_u64)
        .def("uniform01", &RngStream::uniform01)
        .def("normal", &RngStream::normal)
        .def("uniform_int", &RngStream::uniform_int, py::arg("lo"), py::arg("hi"))
        .def("poisson", &RngStream::poisson, py::arg("lam"));
}
