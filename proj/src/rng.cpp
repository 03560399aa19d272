#include "brifca/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace brifca {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int s) { return (v << s) | (v >> (64 - s)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::span<const std::uint64_t> labels) {
    // Fold the labels into the seed, then expand to the xoshiro state.
    std::uint64_t key = seed;
    key = splitmix64(key);
    for (std::uint64_t label : labels) {
        key ^= splitmix64(label) + 0x9e3779b97f4a7c15ULL + (key << 6) + (key >> 2);
        key = splitmix64(key);
    }
    for (auto& word : state_) word = splitmix64(key);
    if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0) state_[0] = 1;
}

RngStream::RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> labels)
    : RngStream(seed, std::span<const std::uint64_t>(labels.begin(), labels.size())) {}

std::uint64_t RngStream::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double RngStream::normal() {
    if (have_cached_normal_) {
        have_cached_normal_ = false;
        return cached_normal_;
    }
    // Box-Muller; u1 in (0,1] so the log is finite.
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = r * std::sin(angle);
    have_cached_normal_ = true;
    return r * std::cos(angle);
}

int RngStream::uniform_int(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    // Rejection sampling to avoid modulo bias.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return lo + static_cast<int>(v % span);
}

int RngStream::bernoulli_half() { return static_cast<int>(next_u64() >> 63); }

int RngStream::poisson(double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("poisson: negative rate");
    if (lambda == 0.0) return 0;
    const double threshold = std::exp(-lambda);
    int count = -1;
    double product = 1.0;
    do {
        ++count;
        product *= uniform01();
    } while (product > threshold);
    return count;
}

}  // namespace brifca
