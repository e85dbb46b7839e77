#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace varlearn {

// Deterministic random stream. All randomness in the library flows through
// this wrapper so that a fixed seed reproduces output bit for bit; the
// distributions are implemented here rather than with std:: distribution
// objects, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                          static_cast<std::uint32_t>(seed >> 32),
                          0x9e3779b9u};
        eng_.seed(seq);
    }

    // Substream derived from (seed, stream); used for per-trial and per-point
    // streams so results do not depend on evaluation schedule.
    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                          static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream & 0xffffffffu),
                          static_cast<std::uint32_t>(stream >> 32),
                          0x9e3779b9u};
        eng_.seed(seq);
    }

    // Uniform in [0, 1): 53-bit mantissa.
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double gaussian() {
        if (has_cache_) {
            has_cache_ = false;
            return cache_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cache_ = r * std::sin(a);
        has_cache_ = true;
        return r * std::cos(a);
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    double cache_ = 0.0;
    bool has_cache_ = false;
};

} // namespace varlearn
