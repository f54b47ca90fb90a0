#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace truncmil {

/// State of a d-dimensional SDE; model units, indexed 0..d-1.
using StateVector = std::vector<double>;

inline double squared_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

inline double euclidean_norm(std::span<const double> x) {
    return std::sqrt(squared_norm(x));
}

inline bool all_finite(std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

/// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

} // namespace truncmil
