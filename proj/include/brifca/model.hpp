#ifndef BRIFCA_MODEL_HPP
#define BRIFCA_MODEL_HPP

#include <vector>

#include "brifca/core.hpp"
#include "brifca/rng.hpp"

namespace brifca {

/// One machine's samples. For the mean/Poisson families each row of `points`
/// is one observation in R^d and `responses` is empty; for linear regression
/// `points` holds the feature rows x and `responses` the scalar targets y.
struct Dataset {
    Eigen::MatrixXd points;
    Eigen::VectorXd responses;

    int n() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }
    bool has_responses() const { return responses.size() > 0; }

    /// Copy of rows [lo, hi).
    Dataset rows(int lo, int hi) const;
};

struct LossModel {
    ModelFamily family = ModelFamily::mean_squared;
    int dim = 1;

    bool is_linreg() const { return family == ModelFamily::linreg_squared; }
};

enum class DegeneratePolicy { error, ridge };

/// (1/n) sum_l f(theta; z_l). Squared loss for every family.
double empirical_loss(const LossModel& model, const ParamVector& theta, const Dataset& data);

/// Exact analytic gradient of empirical_loss.
ParamVector empirical_gradient(const LossModel& model, const ParamVector& theta,
                               const Dataset& data);

/// Exact local empirical minimizer: the sample mean for the mean/Poisson
/// families, the least-squares solution for linear regression. A singular
/// Gram matrix raises DegenerateDesign under the default policy; with
/// DegeneratePolicy::ridge it falls back to the ridge solution with
/// regularizer 1e-10 (the minimum-norm solution in the limit).
ParamVector local_erm(const LossModel& model, const Dataset& data,
                      DegeneratePolicy policy = DegeneratePolicy::error);

/// Draws n fresh samples from the family's data law at parameter theta_star
/// with noise variance sigma2 (Gaussian covariates/noise for linreg,
/// Gaussian observations for the mean family, Poisson counts per coordinate
/// for the Poisson family, which ignores sigma2).
Dataset draw_dataset(const LossModel& model, const ParamVector& theta_star, double sigma2, int n,
                     RngStream& rng);

/// Monte-Carlo estimates of the quantities the convergence assumptions bound.
struct DiagnosticsReport {
    double eta2_hat = 0.0;    // max sample variance of f(theta; z)
    double nu2_hat = 0.0;     // max mean squared gradient deviation
    double skew_hat = 0.0;    // max coordinate absolute skewness of grad f
    double lambda_hat = 0.0;  // min empirical-Hessian eigenvalue
    double L_hat = 0.0;       // max empirical-Hessian eigenvalue
};

DiagnosticsReport estimate_assumptions(const LossModel& model, const GroundTruth& truth,
                                       const ParameterSpace& space, double sigma2, int probe_count,
                                       RngStream& rng, int samples_per_probe = 2000);

/// Uniform draw from the space's ball (rejection-free: gaussian direction,
/// radius scaled by u^(1/d)).
ParamVector uniform_in_ball(const ParameterSpace& space, RngStream& rng);

}  // namespace brifca

#endif
