#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace infosubs {

inline constexpr double kProbTol = 1e-12;
inline constexpr double kValueTol = 1e-9;

inline constexpr double neg_inf() { return -std::numeric_limits<double>::infinity(); }
inline constexpr double pos_inf() { return std::numeric_limits<double>::infinity(); }

using Rng = std::mt19937_64;

struct InvalidInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Expectation term with the convention 0 * (+-inf) := 0.
inline double weighted_term(double weight, double value) {
    if (weight == 0.0) return 0.0;
    return weight * value;
}

// Fixed-tree pairwise summation; result is independent of evaluation order at
// call sites and exact when all terms share a power-of-two scale.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    if (xs.size() == 1) return xs[0];
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& xs) {
    return pairwise_sum(std::span<const double>(xs));
}

inline double log2_safe(double x) {
    if (x == 0.0) return neg_inf();
    return std::log2(x);
}

inline bool approx_eq(double a, double b, double tol = kProbTol) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::fabs(a - b) <= tol;
}

}  // namespace infosubs
