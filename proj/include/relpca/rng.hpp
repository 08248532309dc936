#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace relpca {

// Reproducibility contract: every stochastic work unit (kernel row, MC
// projection point, subset draw for one digit) owns a stream derived from
// (master seed, purpose tag, unit index).  Results are then independent of
// scheduling and worker count, and identical across platforms, because
// std::mt19937_64's sequence and the mixing below are fully specified.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

// Value-semantic random stream: engine plus the Box-Muller spare, so copies
// carry the full state.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0, 1): top 53 bits of one engine draw
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n), n >= 1; rejection-free modulo is avoided to
    // keep draws unbiased and portable
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // standard normal via Box-Muller; second value of each pair is cached
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]; log is finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Documented derivation: mix the purpose tag and unit index into the master
// seed through splitmix64 so distinct (purpose, index) pairs get
// well-separated engine seeds.
inline RngStream derive_stream(std::uint64_t seed, std::string_view purpose, std::uint64_t index) {
    std::uint64_t state = seed ^ fnv1a64(purpose);
    std::uint64_t mixed = splitmix64(state);
    state = mixed ^ (index * 0xD1342543DE82EF95ull + 0x2545F4914F6CDD1Dull);
    mixed = splitmix64(state);
    return RngStream(mixed);
}

}  // namespace relpca
