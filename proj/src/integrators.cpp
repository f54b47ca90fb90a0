#include "truncmil/integrators.hpp"

#include <cmath>
#include <stdexcept>

namespace truncmil {

std::string_view scheme_name(Scheme s) {
    switch (s) {
        case Scheme::TruncatedMilstein: return "truncated-milstein";
        case Scheme::ClassicalMilstein: return "classical-milstein";
        case Scheme::TruncatedEuler: return "truncated-euler";
        case Scheme::EulerMaruyama: return "euler-maruyama";
    }
    throw std::logic_error("scheme_name: bad enum");
}

Scheme scheme_from_name(std::string_view name) {
    if (name == "truncated-milstein") return Scheme::TruncatedMilstein;
    if (name == "classical-milstein") return Scheme::ClassicalMilstein;
    if (name == "truncated-euler") return Scheme::TruncatedEuler;
    if (name == "euler-maruyama") return Scheme::EulerMaruyama;
    throw std::invalid_argument(
        "unknown scheme \"" + std::string(name) +
        "\"; available: truncated-milstein, classical-milstein, truncated-euler, "
        "euler-maruyama");
}

bool scheme_uses_truncation(Scheme s) {
    return s == Scheme::TruncatedMilstein || s == Scheme::TruncatedEuler;
}

namespace {

// Milstein update with all coefficients evaluated at `eval`:
//   y + f(eval) dt + sum_j g_j(eval) dB^j
//     + 1/2 sum_{j1,j2} [sum_l g_{l,j1}(eval) G_{j2}^l(eval)]
//                       (dB^{j1} dB^{j2} - delta_{j1,j2} dt).
// The one-step maps and the within-step interpolant all funnel through this
// kernel, so endpoint consistency is exact and the truncated/classical pair
// agree bitwise whenever eval == y.
StateVector milstein_update(const SdeSystem& sys, const StateVector& eval,
                            const StateVector& y, std::span<const double> dB, double dt) {
    const std::size_t d = sys.state_dim;
    const std::size_t m = sys.noise_dim;

    StateVector out = y;
    axpy(dt, sys.drift(eval), out);

    std::vector<StateVector> g(m);
    for (std::size_t j = 0; j < m; ++j) {
        g[j] = sys.diffusion_col(eval, j);
        axpy(dB[j], g[j], out);
    }

    // cache G_{j}^{l} once; the double sum touches each m*d times
    std::vector<StateVector> deriv(m * d);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = 0; l < d; ++l) deriv[j * d + l] = sys.diffusion_deriv(eval, j, l);

    for (std::size_t j1 = 0; j1 < m; ++j1) {
        for (std::size_t j2 = 0; j2 < m; ++j2) {
            const double weight =
                0.5 * (dB[j1] * dB[j2] - (j1 == j2 ? dt : 0.0));
            for (std::size_t l = 0; l < d; ++l)
                axpy(weight * g[j1][l], deriv[j2 * d + l], out);
        }
    }
    return out;
}

StateVector euler_update(const SdeSystem& sys, const StateVector& eval, const StateVector& y,
                         std::span<const double> dB, double dt) {
    StateVector out = y;
    axpy(dt, sys.drift(eval), out);
    for (std::size_t j = 0; j < sys.noise_dim; ++j)
        axpy(dB[j], sys.diffusion_col(eval, j), out);
    return out;
}

void require_noise_dim(const SdeSystem& sys, std::span<const double> dB) {
    if (dB.size() != sys.noise_dim)
        throw std::invalid_argument("step: increment length must equal noise_dim");
}

} // namespace

StateVector truncated_milstein_step(const SdeSystem& system, const TruncationContext& ctx,
                                    const StateVector& y, std::span<const double> dB,
                                    double dt) {
    require_noise_dim(system, dB);
    return milstein_update(system, truncate_point(ctx, y), y, dB, dt);
}

StateVector classical_milstein_step(const SdeSystem& system, const StateVector& y,
                                    std::span<const double> dB, double dt) {
    require_noise_dim(system, dB);
    return milstein_update(system, y, y, dB, dt);
}

StateVector truncated_euler_step(const SdeSystem& system, const TruncationContext& ctx,
                                 const StateVector& y, std::span<const double> dB, double dt) {
    require_noise_dim(system, dB);
    return euler_update(system, truncate_point(ctx, y), y, dB, dt);
}

StateVector euler_maruyama_step(const SdeSystem& system, const StateVector& y,
                                std::span<const double> dB, double dt) {
    require_noise_dim(system, dB);
    return euler_update(system, y, y, dB, dt);
}

StateVector interpolate_within_step(const SdeSystem& system, const TruncationContext& ctx,
                                    const StateVector& y_k, std::span<const double> dB_partial,
                                    double s_minus_tk) {
    require_noise_dim(system, dB_partial);
    if (s_minus_tk < 0.0 || s_minus_tk > ctx.step())
        throw std::invalid_argument("interpolate_within_step: s - t_k must lie in [0, step]");
    return milstein_update(system, truncate_point(ctx, y_k), y_k, dB_partial, s_minus_tk);
}

Trajectory simulate(const SdeSystem& system, Scheme scheme, const PathGrid& grid,
                    const BrownianPath& path, const TruncationContext* ctx) {
    if (!(path.grid() == grid))
        throw std::invalid_argument("simulate: path grid does not match the requested grid");
    if (path.noise_dim() != system.noise_dim)
        throw std::invalid_argument("simulate: path noise_dim does not match the model");
    const bool wants_ctx = scheme_uses_truncation(scheme);
    if (wants_ctx && ctx == nullptr)
        throw std::invalid_argument("simulate: truncated scheme requires a TruncationContext");
    if (!wants_ctx && ctx != nullptr)
        throw std::invalid_argument("simulate: untruncated scheme must not get a context");
    const double dt = grid.step();
    if (wants_ctx && std::fabs(ctx->step() - dt) > 1e-12 * dt)
        throw std::invalid_argument("simulate: context step does not match grid step");

    const std::size_t d = system.state_dim;
    const std::size_t m = system.noise_dim;

    Trajectory traj;
    traj.grid = grid;
    traj.state_dim = d;
    traj.scheme = scheme;
    if (wants_ctx) traj.ctx = *ctx;
    traj.states.reserve((grid.steps + 1) * d);
    traj.states.insert(traj.states.end(), system.initial_state.begin(),
                       system.initial_state.end());

    StateVector y = system.initial_state;
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const std::span<const double> dB{path.increments().data() + k * m, m};
        switch (scheme) {
            case Scheme::TruncatedMilstein: y = truncated_milstein_step(system, *ctx, y, dB, dt); break;
            case Scheme::ClassicalMilstein: y = classical_milstein_step(system, y, dB, dt); break;
            case Scheme::TruncatedEuler: y = truncated_euler_step(system, *ctx, y, dB, dt); break;
            case Scheme::EulerMaruyama: y = euler_maruyama_step(system, y, dB, dt); break;
        }
        traj.states.insert(traj.states.end(), y.begin(), y.end());
        if (!all_finite(y)) {
            traj.blow_up_index = k + 1;
            break;
        }
    }
    return traj;
}

} // namespace truncmil
