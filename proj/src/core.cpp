#include "brifca/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace brifca {

std::string to_string(ModelFamily f) {
    switch (f) {
        case ModelFamily::mean_squared: return "mean_squared";
        case ModelFamily::linreg_squared: return "linreg_squared";
        case ModelFamily::poisson_mean: return "poisson_mean";
    }
    return "?";
}

std::string to_string(InitMode m) {
    return m == InitMode::warm ? "warm" : "random";
}

std::string to_string(AttackKind a) {
    switch (a) {
        case AttackKind::scaled_eval: return "scaled_eval";
        case AttackKind::arbitrary_vector: return "arbitrary_vector";
        case AttackKind::sign_flip: return "sign_flip";
        case AttackKind::omniscient_target_smallest: return "omniscient_target_smallest";
    }
    return "?";
}

std::string to_string(TrimDivisor t) {
    return t == TrimDivisor::remaining ? "remaining" : "nominal";
}

ParameterSpace ParameterSpace::ball(Eigen::Index dim, double radius, bool enabled) {
    ParameterSpace s;
    s.radius = radius;
    s.center = ParamVector::Zero(dim);
    s.enabled = enabled;
    return s;
}

ParamVector project(const ParamVector& theta, const ParameterSpace& space) {
    if (!theta.allFinite()) throw InvalidInput("project: non-finite input");
    if (!space.enabled) return theta;
    if (space.center.size() != theta.size())
        throw InvalidInput("project: dimension mismatch with space center");
    ParamVector offset = theta - space.center;
    double norm = offset.norm();
    if (norm <= space.radius) return theta;
    return space.center + (space.radius / norm) * offset;
}

int ExperimentConfig::byzantine_count() const {
    return static_cast<int>(std::llround(alpha * m));
}

int ExperimentConfig::honest_count() const { return m - byzantine_count(); }

int ExperimentConfig::n_min() const {
    int lo = std::numeric_limits<int>::max();
    for (int c = 0; c < honest_count(); ++c) lo = std::min(lo, n_per_machine[c]);
    return lo;
}

long long ExperimentConfig::n_total_honest() const {
    long long total = 0;
    for (int c = 0; c < honest_count(); ++c) total += n_per_machine[c];
    return total;
}

ParameterSpace ExperimentConfig::space() const {
    return ParameterSpace::ball(d, space_radius, projection);
}

void ExperimentConfig::validate() const {
    if (m < 1) throw ConfigError("m must be >= 1");
    if (k < 1) throw ConfigError("k must be >= 1");
    if (d < 1) throw ConfigError("d must be >= 1");
    if (static_cast<int>(n_per_machine.size()) != m)
        throw ConfigError("n_per_machine must list one sample count per machine");
    for (int n : n_per_machine)
        if (n < 1) throw ConfigError("per-machine sample counts must be positive");
    if (!(alpha >= 0.0 && alpha < 0.5)) throw ConfigError("alpha must lie in [0, 1/2)");
    if (!(beta >= 0.0 && beta < 0.5)) throw ConfigError("beta must lie in [0, 1/2)");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
    if (T < 1) throw ConfigError("T must be >= 1");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw ConfigError("sigma2 must be >= 0");
    if (!(space_radius > 0.0)) throw ConfigError("space_radius must be positive");
    if (!(attack_magnitude >= 0.0) || !std::isfinite(attack_magnitude))
        throw ConfigError("attack_magnitude must be finite and >= 0");
    if (kmeans_iters < 1) throw ConfigError("kmeans_iters must be >= 1");
    if (honest_count() < k)
        throw ConfigError("fewer honest machines than clusters: " + std::to_string(honest_count()) +
                          " < " + std::to_string(k));
    if (resampling && n_min() < 2 * T)
        throw ConfigError("resampling needs n_i >= 2T on every honest machine (n_min=" +
                          std::to_string(n_min()) + ", 2T=" + std::to_string(2 * T) + ")");
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a_str(std::uint64_t h, const std::string& s) {
    return fnv1a(h, s.data(), s.size());
}

ModelFamily parse_family(const std::string& s) {
    if (s == "mean_squared") return ModelFamily::mean_squared;
    if (s == "linreg_squared") return ModelFamily::linreg_squared;
    if (s == "poisson_mean") return ModelFamily::poisson_mean;
    throw ConfigError("unknown model family: " + s);
}

InitMode parse_init(const std::string& s) {
    if (s == "warm") return InitMode::warm;
    if (s == "random") return InitMode::random;
    throw ConfigError("unknown init_mode: " + s);
}

AttackKind parse_attack(const std::string& s) {
    if (s == "scaled_eval") return AttackKind::scaled_eval;
    if (s == "arbitrary_vector") return AttackKind::arbitrary_vector;
    if (s == "sign_flip") return AttackKind::sign_flip;
    if (s == "omniscient_target_smallest") return AttackKind::omniscient_target_smallest;
    throw ConfigError("unknown attack: " + s);
}

TrimDivisor parse_divisor(const std::string& s) {
    if (s == "remaining") return TrimDivisor::remaining;
    if (s == "nominal") return TrimDivisor::nominal;
    throw ConfigError("unknown trim_divisor: " + s);
}

}  // namespace

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](auto v) { h = fnv1a(h, &v, sizeof(v)); };
    mix(cfg.m);
    mix(cfg.k);
    mix(cfg.d);
    for (int n : cfg.n_per_machine) mix(n);
    mix(cfg.alpha);
    mix(cfg.beta);
    mix(cfg.gamma);
    mix(cfg.T);
    mix(cfg.sigma2);
    mix(cfg.seed);
    mix(cfg.resampling);
    h = fnv1a_str(h, to_string(cfg.init_mode));
    h = fnv1a_str(h, to_string(cfg.attack));
    mix(cfg.attack_magnitude);
    h = fnv1a_str(h, to_string(cfg.model));
    mix(cfg.space_radius);
    mix(cfg.projection);
    h = fnv1a_str(h, to_string(cfg.trim_divisor));
    mix(cfg.kmeans_iters);
    return h;
}

ExperimentConfig config_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    static const char* known[] = {
        "m", "k", "d", "n", "n_per_machine", "alpha", "beta", "gamma", "T",
        "sigma2", "seed", "resampling", "init_mode", "attack", "attack_magnitude",
        "model", "space_radius", "projection", "trim_divisor", "kmeans_iters",
        // sweep-level keys, consumed by the sweep loader and allowed here
        "settings", "d_sweep", "methods", "trials"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* key : known) ok = ok || it.key() == key;
        if (!ok) throw ConfigError("unknown config key: " + it.key());
    }

    ExperimentConfig cfg;
    try {
        if (j.contains("m")) cfg.m = j["m"].get<int>();
        if (j.contains("k")) cfg.k = j["k"].get<int>();
        if (j.contains("d")) cfg.d = j["d"].get<int>();
        if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
        if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
        if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
        if (j.contains("T")) cfg.T = j["T"].get<int>();
        if (j.contains("sigma2")) cfg.sigma2 = j["sigma2"].get<double>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("resampling")) cfg.resampling = j["resampling"].get<bool>();
        if (j.contains("init_mode")) cfg.init_mode = parse_init(j["init_mode"].get<std::string>());
        if (j.contains("attack")) cfg.attack = parse_attack(j["attack"].get<std::string>());
        if (j.contains("attack_magnitude"))
            cfg.attack_magnitude = j["attack_magnitude"].get<double>();
        if (j.contains("model")) cfg.model = parse_family(j["model"].get<std::string>());
        if (j.contains("space_radius")) cfg.space_radius = j["space_radius"].get<double>();
        if (j.contains("projection")) cfg.projection = j["projection"].get<bool>();
        if (j.contains("trim_divisor"))
            cfg.trim_divisor = parse_divisor(j["trim_divisor"].get<std::string>());
        if (j.contains("kmeans_iters")) cfg.kmeans_iters = j["kmeans_iters"].get<int>();

        if (j.contains("n_per_machine")) {
            cfg.n_per_machine = j["n_per_machine"].get<std::vector<int>>();
        } else {
            int n = j.contains("n") ? j["n"].get<int>() : 100;
            cfg.n_per_machine.assign(static_cast<std::size_t>(std::max(cfg.m, 0)), n);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

double GroundTruth::min_separation() const {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < params.size(); ++a)
        for (std::size_t b = a + 1; b < params.size(); ++b)
            lo = std::min(lo, (params[a] - params[b]).norm());
    return lo;
}

int GroundTruth::smallest_cluster() const {
    if (cluster_sizes.empty()) throw InvalidInput("smallest_cluster: sizes not populated");
    int best = 0;
    for (int j = 1; j < static_cast<int>(cluster_sizes.size()); ++j)
        if (cluster_sizes[j] < cluster_sizes[best]) best = j;
    return best;
}

}  // namespace brifca
