#ifndef BRIFCA_CORE_HPP
#define BRIFCA_CORE_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace brifca {

/// A point in the d-dimensional parameter space.
using ParamVector = Eigen::VectorXd;

struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct EmptyAggregate : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct OverTrim : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DegenerateDesign : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ModelFamily { mean_squared, linreg_squared, poisson_mean };
enum class InitMode { warm, random };
enum class AttackKind { scaled_eval, arbitrary_vector, sign_flip, omniscient_target_smallest };
/// Divisor used by the trimmed mean: the count of values actually kept
/// ("remaining") or the nominal (1-2*beta)*m of the textbook definition.
enum class TrimDivisor { remaining, nominal };

std::string to_string(ModelFamily f);
std::string to_string(InitMode m);
std::string to_string(AttackKind a);
std::string to_string(TrimDivisor t);

/// The parameter space: a Euclidean ball of given radius around `center`.
/// Projection may be disabled, in which case project() is the identity.
struct ParameterSpace {
    double radius = 10.0;
    ParamVector center;
    bool enabled = true;

    static ParameterSpace ball(Eigen::Index dim, double radius = 10.0, bool enabled = true);
};

/// Euclidean projection onto the ball. Identity for points already inside
/// (or when projection is disabled). Throws InvalidInput on non-finite input.
ParamVector project(const ParamVector& theta, const ParameterSpace& space);

/// All scalars of one experiment. `seed` fully determines every random draw
/// in a trial; replaying the same config is bit-identical.
struct ExperimentConfig {
    int m = 80;
    int k = 2;
    int d = 20;
    std::vector<int> n_per_machine;  // size m; filled with `n` if uniform
    double alpha = 0.05;             // Byzantine fraction, [0, 1/2)
    double beta = 0.05;              // trim fraction, [0, 1/2)
    double gamma = 0.5;              // step size, default 1/L_F for the quadratic families
    int T = 300;                     // iteration count
    double sigma2 = 0.2;             // noise variance
    std::uint64_t seed = 0;
    bool resampling = false;
    InitMode init_mode = InitMode::warm;
    AttackKind attack = AttackKind::scaled_eval;
    double attack_magnitude = 100.0;  // arbitrary_vector report norm
    ModelFamily model = ModelFamily::linreg_squared;
    double space_radius = 10.0;
    bool projection = true;
    TrimDivisor trim_divisor = TrimDivisor::remaining;
    int kmeans_iters = 100;  // stage-II iteration budget of the three-stage baseline

    int byzantine_count() const;
    int honest_count() const;
    int n_min() const;
    long long n_total_honest() const;
    ParameterSpace space() const;

    /// Throws ConfigError on any inconsistency (called before round 0).
    void validate() const;
};

/// Stable 64-bit hash of the fully-resolved configuration.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Loads the canonical JSON config format (see configs/example.json).
/// Unknown keys are rejected.
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// The k true cluster parameters plus derived separation data.
struct GroundTruth {
    std::vector<ParamVector> params;  // theta_1* .. theta_k*
    std::vector<int> cluster_sizes;   // honest machines per cluster; sums to (1-alpha)m
    double delta = std::numeric_limits<double>::infinity();  // min pairwise separation

    int k() const { return static_cast<int>(params.size()); }
    /// Recomputes delta from params (infinity when k == 1).
    double min_separation() const;
    /// Index of the smallest cluster (lowest index on ties).
    int smallest_cluster() const;
};

}  // namespace brifca

#endif
