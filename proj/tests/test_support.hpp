#pragma once

// Seeded generators shared by the property tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace testing_support {

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::vector<double> gaussian_samples(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u1 = 1.0 - unit(rng);
        const double u2 = unit(rng);
        out[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    return out;
}

/// Random window of length 2..400 with a random location and scale; one in
/// ten is constant.
inline std::vector<double> random_window(std::mt19937_64& rng) {
    const std::size_t n = 2 + rng() % 399;
    const double loc = (unit(rng) - 0.5) * 400.0;
    const double scale = std::pow(10.0, unit(rng) * 4.0 - 2.0);
    std::vector<double> x(n);
    if (rng() % 10 == 0) {
        for (auto& v : x) v = loc;
        return x;
    }
    for (auto& v : x) v = loc + scale * (unit(rng) < 0.5 ? gaussian_samples(rng, 1)[0] : unit(rng) - 0.5);
    return x;
}

}  // namespace testing_support
