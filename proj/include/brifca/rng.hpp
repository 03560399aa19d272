#ifndef BRIFCA_RNG_HPP
#define BRIFCA_RNG_HPP

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace brifca {

/// Deterministic random stream keyed by (seed, labels).
///
/// The same key always yields the same stream; distinct keys yield
/// independent streams with no shared state, so per-machine draws are
/// reproducible regardless of execution order. The generator (xoshiro256++
/// seeded through splitmix64) and all samplers are self-contained, so
/// streams are bit-identical across platforms and standard libraries.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::span<const std::uint64_t> labels);
    RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> labels);

    std::uint64_t next_u64();

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01();
    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller (pairs cached).
    double normal();

    /// Uniform integer on [lo, hi] inclusive.
    int uniform_int(int lo, int hi);

    /// Fair coin in {0, 1}.
    int bernoulli_half();

    /// Poisson draw by Knuth's product method (intended for small lambda).
    int poisson(double lambda);

private:
    std::array<std::uint64_t, 4> state_{};
    bool have_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

/// Well-known RNG stream labels so call sites cannot collide by accident.
namespace stream_label {
inline constexpr std::uint64_t ground_truth = 1;
inline constexpr std::uint64_t worker_data = 2;   // (worker_data, machine)
inline constexpr std::uint64_t byz_param = 3;     // (byz_param, machine)
inline constexpr std::uint64_t init = 4;          // (init, cluster)
inline constexpr std::uint64_t attack = 5;        // (attack, machine, iteration)
inline constexpr std::uint64_t kmeans = 6;
inline constexpr std::uint64_t probe = 7;
}  // namespace stream_label

}  // namespace brifca

#endif
