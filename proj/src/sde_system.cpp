#include "truncmil/sde_system.hpp"

#include <cmath>
#include <stdexcept>

namespace truncmil {

StateVector eval_L_operator(const SdeSystem& system, const StateVector& x,
                            std::size_t j1, std::size_t j2) {
    if (j1 >= system.noise_dim || j2 >= system.noise_dim)
        throw std::out_of_range("eval_L_operator: noise column index out of range");
    if (x.size() != system.state_dim)
        throw std::invalid_argument("eval_L_operator: state dimension mismatch");

    const StateVector g1 = system.diffusion_col(x, j1);
    StateVector out(system.state_dim, 0.0);
    for (std::size_t l = 0; l < system.state_dim; ++l) {
        const StateVector deriv = system.diffusion_deriv(x, j2, l);
        axpy(g1[l], deriv, out);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!std::isfinite(out[i]))
            throw std::domain_error("eval_L_operator: non-finite value in coordinate " +
                                    std::to_string(i));
    }
    return out;
}

SdeSystem make_quintic_example() {
    SdeSystem s;
    s.state_dim = 1;
    s.noise_dim = 1;
    s.drift = [](const StateVector& x) {
        const double v = x[0];
        return StateVector{v - v * v * v * v * v};
    };
    s.diffusion_col = [](const StateVector& x, std::size_t) {
        return StateVector{x[0] * x[0]};
    };
    s.diffusion_deriv = [](const StateVector& x, std::size_t, std::size_t) {
        return StateVector{2.0 * x[0]};
    };
    s.initial_state = {1.0};
    s.label = "paper-example";
    return s;
}

SdeSystem make_gbm(double a, double sigma, double x0) {
    SdeSystem s;
    s.state_dim = 1;
    s.noise_dim = 1;
    s.drift = [a](const StateVector& x) { return StateVector{a * x[0]}; };
    s.diffusion_col = [sigma](const StateVector& x, std::size_t) {
        return StateVector{sigma * x[0]};
    };
    s.diffusion_deriv = [sigma](const StateVector&, std::size_t, std::size_t) {
        return StateVector{sigma};
    };
    s.initial_state = {x0};
    s.label = "gbm";
    return s;
}

SdeSystem make_linear_2d_diagonal(double a, double sigma, double x0) {
    SdeSystem s;
    s.state_dim = 2;
    s.noise_dim = 2;
    s.drift = [a](const StateVector& x) { return StateVector{a * x[0], a * x[1]}; };
    s.diffusion_col = [sigma](const StateVector& x, std::size_t j) {
        StateVector g(2, 0.0);
        g[j] = sigma * x[j];
        return g;
    };
    s.diffusion_deriv = [sigma](const StateVector&, std::size_t j, std::size_t l) {
        StateVector d(2, 0.0);
        if (j == l) d[j] = sigma;
        return d;
    };
    s.initial_state = {x0, x0};
    s.label = "linear-2d-diagonal";
    return s;
}

std::vector<std::string> builtin_model_names() {
    return {"paper-example", "gbm", "linear-2d-diagonal"};
}

SdeSystem builtin_model(const std::string& name) {
    if (name == "paper-example") return make_quintic_example();
    if (name == "gbm") return make_gbm(0.05, 0.2, 1.0);
    if (name == "linear-2d-diagonal") return make_linear_2d_diagonal(0.05, 0.2, 1.0);
    std::string known;
    for (const auto& n : builtin_model_names()) {
        if (!known.empty()) known += ", ";
        known += n;
    }
    throw std::invalid_argument("unknown model \"" + name + "\"; available: " + known);
}

} // namespace truncmil
