#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "truncmil/state.hpp"

namespace truncmil {

/// One autonomous SDE instance  dx = f(x) dt + sum_j g_j(x) dB^j.
///
/// Coefficients are plain callables; derivative columns are supplied
/// analytically by the model author (no automatic differentiation) so that
/// a finite-difference cross-check can falsify them.
struct SdeSystem {
    std::size_t state_dim = 1;
    std::size_t noise_dim = 1;

    /// f: R^d -> R^d
    std::function<StateVector(const StateVector&)> drift;
    /// g_j: R^d -> R^d, noise column j in [0, noise_dim)
    std::function<StateVector(const StateVector&, std::size_t)> diffusion_col;
    /// G_j^l = d g_j / d x^l: R^d -> R^d, column j, coordinate l in [0, state_dim)
    std::function<StateVector(const StateVector&, std::size_t, std::size_t)> diffusion_deriv;

    StateVector initial_state{1.0};
    std::string label;
};

/// L^{j1} g_{j2}(x) = sum_l g_{l,j1}(x) * G_{j2}^l(x).
///
/// Throws std::out_of_range for bad column indices and std::domain_error,
/// naming the first offending coordinate, when the evaluation is non-finite.
StateVector eval_L_operator(const SdeSystem& system, const StateVector& x,
                            std::size_t j1, std::size_t j2);

/// Registry lookup. Known names: "paper-example", "gbm", "linear-2d-diagonal".
/// Unknown names throw std::invalid_argument listing the available models.
SdeSystem builtin_model(const std::string& name);
std::vector<std::string> builtin_model_names();

/// Scalar dx = (x - x^5) dt + x^2 dB, x(0) = 1. The quintic benchmark the
/// convergence experiments target; registry name "paper-example".
SdeSystem make_quintic_example();

/// Geometric Brownian motion dx = a x dt + sigma x dB.
SdeSystem make_gbm(double a, double sigma, double x0);

/// d = m = 2, f = a x componentwise, g_1 = (sigma x^1, 0), g_2 = (0, sigma x^2):
/// two GBMs driven by independent noises; commutative by construction.
SdeSystem make_linear_2d_diagonal(double a, double sigma, double x0);

} // namespace truncmil
