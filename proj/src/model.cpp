#include "brifca/model.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace brifca {

Dataset Dataset::rows(int lo, int hi) const {
    if (lo < 0 || hi > n() || lo >= hi) throw InvalidInput("Dataset::rows: bad range");
    Dataset out;
    out.points = points.middleRows(lo, hi - lo);
    if (has_responses()) out.responses = responses.segment(lo, hi - lo);
    return out;
}

namespace {

void check_dims(const LossModel& model, const ParamVector& theta, const Dataset& data) {
    if (theta.size() != model.dim) throw InvalidInput("theta dimension differs from model");
    if (data.dim() != model.dim) throw InvalidInput("data dimension differs from model");
    if (data.n() == 0) throw InvalidInput("empty dataset");
    if (model.is_linreg() && data.responses.size() != data.n())
        throw InvalidInput("linreg dataset needs one response per row");
}

}  // namespace

double empirical_loss(const LossModel& model, const ParamVector& theta, const Dataset& data) {
    check_dims(model, theta, data);
    const double n = static_cast<double>(data.n());
    if (model.is_linreg()) {
        Eigen::VectorXd residual = data.responses - data.points * theta;
        return residual.squaredNorm() / n;
    }
    // f(theta; z) = ||theta - z||^2 for the mean and Poisson families.
    return (data.points.rowwise() - theta.transpose()).rowwise().squaredNorm().sum() / n;
}

ParamVector empirical_gradient(const LossModel& model, const ParamVector& theta,
                               const Dataset& data) {
    check_dims(model, theta, data);
    const double n = static_cast<double>(data.n());
    if (model.is_linreg()) {
        Eigen::VectorXd residual = data.points * theta - data.responses;
        return (2.0 / n) * (data.points.transpose() * residual);
    }
    ParamVector sample_mean = data.points.colwise().mean();
    return 2.0 * (theta - sample_mean);
}

ParamVector local_erm(const LossModel& model, const Dataset& data, DegeneratePolicy policy) {
    if (data.dim() != model.dim) throw InvalidInput("data dimension differs from model");
    if (data.n() == 0) throw InvalidInput("empty dataset");
    if (!model.is_linreg()) return data.points.colwise().mean();

    if (data.responses.size() != data.n())
        throw InvalidInput("linreg dataset needs one response per row");
    const int n = data.n();
    const int d = data.dim();
    constexpr double kRidge = 1e-10;

    if (n >= d) {
        Eigen::MatrixXd gram = data.points.transpose() * data.points;
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        if (llt.info() == Eigen::Success)
            return llt.solve(data.points.transpose() * data.responses);
        if (policy == DegeneratePolicy::error)
            throw DegenerateDesign("local_erm: singular Gram matrix");
        gram.diagonal().array() += kRidge;
        return Eigen::LLT<Eigen::MatrixXd>(gram).solve(data.points.transpose() * data.responses);
    }

    if (policy == DegeneratePolicy::error)
        throw DegenerateDesign("local_erm: n < d makes the Gram matrix singular");
    // Dual form: (X^T X + r I)^-1 X^T y == X^T (X X^T + r I)^-1 y, only n x n.
    Eigen::MatrixXd outer = data.points * data.points.transpose();
    outer.diagonal().array() += kRidge;
    return data.points.transpose() * Eigen::LLT<Eigen::MatrixXd>(outer).solve(data.responses);
}

Dataset draw_dataset(const LossModel& model, const ParamVector& theta_star, double sigma2, int n,
                     RngStream& rng) {
    if (theta_star.size() != model.dim) throw InvalidInput("theta_star dimension differs from model");
    if (n < 1) throw InvalidInput("draw_dataset: n must be >= 1");
    const int d = model.dim;
    const double sigma = std::sqrt(sigma2);
    Dataset data;
    data.points.resize(n, d);
    switch (model.family) {
        case ModelFamily::mean_squared:
            for (int i = 0; i < n; ++i)
                for (int h = 0; h < d; ++h) data.points(i, h) = theta_star[h] + sigma * rng.normal();
            break;
        case ModelFamily::poisson_mean:
            for (int i = 0; i < n; ++i)
                for (int h = 0; h < d; ++h) {
                    if (theta_star[h] < 0.0)
                        throw InvalidInput("poisson_mean needs nonnegative rates");
                    data.points(i, h) = static_cast<double>(rng.poisson(theta_star[h]));
                }
            break;
        case ModelFamily::linreg_squared:
            data.responses.resize(n);
            for (int i = 0; i < n; ++i) {
                for (int h = 0; h < d; ++h) data.points(i, h) = rng.normal();
                data.responses[i] = data.points.row(i).dot(theta_star) + sigma * rng.normal();
            }
            break;
    }
    return data;
}

namespace {

double sample_variance(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return var / n;
}

/// E|X-EX|^3 / Var(X)^{3/2} from sample moments; zero for degenerate columns.
double abs_skewness(const Eigen::VectorXd& column) {
    const double n = static_cast<double>(column.size());
    const double mean = column.mean();
    double m2 = 0.0, a3 = 0.0;
    for (Eigen::Index i = 0; i < column.size(); ++i) {
        double dev = column[i] - mean;
        m2 += dev * dev;
        a3 += std::abs(dev * dev * dev);
    }
    m2 /= n;
    a3 /= n;
    if (m2 <= 0.0) return 0.0;
    return a3 / std::pow(m2, 1.5);
}

}  // namespace

ParamVector uniform_in_ball(const ParameterSpace& space, RngStream& rng) {
    const Eigen::Index d = space.center.size();
    ParamVector direction(d);
    for (Eigen::Index h = 0; h < d; ++h) direction[h] = rng.normal();
    double norm = direction.norm();
    if (norm == 0.0) return space.center;
    double radius = space.radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
    return space.center + (radius / norm) * direction;
}

DiagnosticsReport estimate_assumptions(const LossModel& model, const GroundTruth& truth,
                                       const ParameterSpace& space, double sigma2, int probe_count,
                                       RngStream& rng, int samples_per_probe) {
    if (probe_count < 2) throw InvalidInput("estimate_assumptions: probe_count must be >= 2");
    if (samples_per_probe < 2) throw InvalidInput("estimate_assumptions: need >= 2 samples per probe");
    if (space.center.size() != model.dim)
        throw InvalidInput("estimate_assumptions: space dimension differs from model");
    const int d = model.dim;

    DiagnosticsReport report;
    report.lambda_hat = std::numeric_limits<double>::infinity();
    report.L_hat = 0.0;

    std::vector<double> losses(static_cast<std::size_t>(samples_per_probe));
    for (int probe = 0; probe < probe_count; ++probe) {
        for (const auto& theta_star : truth.params) {
            ParamVector theta = uniform_in_ball(space, rng);

            Dataset batch = draw_dataset(model, theta_star, sigma2, samples_per_probe, rng);
            Eigen::MatrixXd grad_dev(samples_per_probe, d);
            ParamVector grad_pop = 2.0 * (theta - theta_star);  // population gradient, all families
            for (int i = 0; i < samples_per_probe; ++i) {
                Dataset one = batch.rows(i, i + 1);
                losses[static_cast<std::size_t>(i)] = empirical_loss(model, theta, one);
                grad_dev.row(i) = (empirical_gradient(model, theta, one) - grad_pop).transpose();
            }
            report.eta2_hat = std::max(report.eta2_hat, sample_variance(losses));
            report.nu2_hat = std::max(report.nu2_hat, grad_dev.rowwise().squaredNorm().mean());
            for (int h = 0; h < d; ++h)
                report.skew_hat = std::max(report.skew_hat, abs_skewness(grad_dev.col(h)));

            if (model.is_linreg()) {
                Eigen::MatrixXd hessian =
                    (2.0 / samples_per_probe) * (batch.points.transpose() * batch.points);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian);
                report.lambda_hat = std::min(report.lambda_hat, eig.eigenvalues().minCoeff());
                report.L_hat = std::max(report.L_hat, eig.eigenvalues().maxCoeff());
            } else {
                // Quadratic families with Hessian exactly 2I.
                report.lambda_hat = std::min(report.lambda_hat, 2.0);
                report.L_hat = std::max(report.L_hat, 2.0);
            }
        }
    }
    return report;
}

}  // namespace brifca
