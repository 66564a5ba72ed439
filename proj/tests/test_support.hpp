#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace testing_support {

/// Gaussian random walk starting at 100; `len` values.
inline std::vector<double> random_walk(std::size_t len, std::uint64_t seed, double sigma = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, sigma);
    std::vector<double> z;
    z.reserve(len);
    double v = 100.0;
    for (std::size_t k = 0; k < len; ++k) {
        z.push_back(v);
        v += step(rng);
    }
    return z;
}

} // namespace testing_support
