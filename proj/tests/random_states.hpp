#pragma once

#include <array>
#include <random>

// Random points of the probability simplex (normalised exponentials) and
// random rate parameters for property tests.
template <std::size_t N>
std::array<double, N> random_simplex(std::mt19937_64& rng) {
    std::exponential_distribution<double> ex(1.0);
    std::array<double, N> x{};
    double total = 0.0;
    for (auto& v : x) total += (v = ex(rng));
    for (auto& v : x) v /= total;
    return x;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}
