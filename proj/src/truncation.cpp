#include "truncmil/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "truncmil/rng.hpp"

namespace truncmil {

TruncationPolicy power_policy(double a, double epsilon, double delta_star) {
    if (!(a > 0.0)) throw std::invalid_argument("power_policy: a must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("power_policy: epsilon must be positive");
    if (!(delta_star > 0.0) || delta_star > 1.0)
        throw std::invalid_argument("power_policy: delta_star must lie in (0, 1]");
    TruncationPolicy p;
    p.mu = [a](double u) { return std::pow(u, a); };
    p.mu_inv = [a](double v) { return std::pow(v, 1.0 / a); };
    p.h = [epsilon](double dt) { return std::pow(dt, -epsilon); };
    p.delta_star = delta_star;
    std::ostringstream label;
    label << "power: mu=u^" << a << ", h=delta^-" << epsilon;
    p.label = label.str();
    return p;
}

std::string PolicyValidation::summary() const {
    std::ostringstream os;
    os << "policy validation: " << (passed() ? "pass" : "FAIL") << '\n';
    os << "  h(delta*) >= mu(1):            " << (admissible_at_delta_star ? "ok" : "FAIL")
       << '\n';
    os << "  delta^{1/4} h(delta) <= 1:     " << (step_bound_ok ? "ok" : "FAIL")
       << "  (worst " << worst_step_bound << " at delta=" << worst_step_bound_delta << ")\n";
    os << "  mu(mu_inv(v)) = v (rel 1e-10): " << (inverse_consistent ? "ok" : "FAIL")
       << "  (worst rel " << worst_inverse_rel << " at v=" << worst_inverse_v << ")\n";
    os << "  mu strictly increasing:        " << (mu_increasing ? "ok" : "FAIL") << '\n';
    os << "  h strictly decreasing:         " << (h_decreasing ? "ok" : "FAIL");
    return os.str();
}

PolicyValidation validate_policy(const TruncationPolicy& policy, std::size_t grid_points) {
    if (grid_points < 2) throw std::invalid_argument("validate_policy: grid_points >= 2");
    if (!policy.mu || !policy.mu_inv || !policy.h)
        throw std::invalid_argument("validate_policy: policy callables must be set");
    if (!(policy.delta_star > 0.0) || policy.delta_star > 1.0)
        throw std::invalid_argument("validate_policy: delta_star must lie in (0, 1]");

    PolicyValidation rep;
    const double ds = policy.delta_star;
    const double mu1 = policy.mu(1.0);

    rep.admissible_at_delta_star = policy.h(ds) >= mu1;

    // logarithmic delta grid in [1e-8*delta*, delta*]
    std::vector<double> deltas(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(grid_points - 1);
        deltas[i] = ds * std::pow(1e-8, 1.0 - t);
    }

    rep.step_bound_ok = true;
    rep.h_decreasing = true;
    double prev_h = std::numeric_limits<double>::infinity();
    for (double dt : deltas) {
        const double hval = policy.h(dt);
        const double bound = std::pow(dt, 0.25) * hval;
        if (bound > rep.worst_step_bound) {
            rep.worst_step_bound = bound;
            rep.worst_step_bound_delta = dt;
        }
        // 1e-12 relative slack keeps exact boundary families (equality for
        // every delta) from tripping on pow() rounding
        if (bound > 1.0 + 1e-12) rep.step_bound_ok = false;
        if (!(hval < prev_h)) rep.h_decreasing = false;
        prev_h = hval;
    }

    // inverse round trip on v in [mu(1) v h(delta*), h(delta_min)]
    const double v_lo = std::max(mu1, policy.h(ds));
    const double v_hi = std::max(v_lo * (1.0 + 1e-9), policy.h(deltas.front()));
    rep.inverse_consistent = true;
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(grid_points - 1);
        const double v = v_lo * std::pow(v_hi / v_lo, t);
        const double back = policy.mu(policy.mu_inv(v));
        const double rel = std::fabs(back - v) / v;
        if (rel > rep.worst_inverse_rel) {
            rep.worst_inverse_rel = rel;
            rep.worst_inverse_v = v;
        }
        if (rel > 1e-10) rep.inverse_consistent = false;
    }

    // mu strictly increasing on a grid of radii covering the barrier range
    rep.mu_increasing = true;
    const double u_hi = std::max(2.0, policy.mu_inv(v_hi));
    double prev_mu = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(grid_points - 1);
        const double u = 1e-3 * std::pow(u_hi / 1e-3, t);
        const double muval = policy.mu(u);
        if (!(muval > prev_mu)) rep.mu_increasing = false;
        prev_mu = muval;
    }

    if (!rep.passed()) {
        std::string why = "policy rejected";
        if (!rep.step_bound_ok) {
            std::ostringstream os;
            os << "policy rejected: delta^{1/4} h(delta) <= 1 fails (worst "
               << rep.worst_step_bound << " at delta=" << rep.worst_step_bound_delta << ")";
            why = os.str();
        } else if (!rep.admissible_at_delta_star) {
            why = "policy rejected: h(delta*) >= mu(1) fails";
        } else if (!rep.inverse_consistent) {
            why = "policy rejected: mu(mu_inv(v)) round trip off by more than rel 1e-10";
        } else if (!rep.mu_increasing) {
            why = "policy rejected: mu is not strictly increasing";
        } else {
            why = "policy rejected: h is not strictly decreasing";
        }
        throw PolicyRejected(why, rep);
    }
    return rep;
}

TruncationContext::TruncationContext(TruncationPolicy policy, double step)
    : policy_(std::move(policy)), step_(step) {
    if (!(step > 0.0) || step > policy_.delta_star)
        throw std::invalid_argument("TruncationContext: step must lie in (0, delta*]");
    bound_ = policy_.h(step);
    barrier_ = policy_.mu_inv(bound_);
    if (!(barrier_ > 0.0) || !std::isfinite(barrier_))
        throw std::invalid_argument("TruncationContext: barrier must be positive and finite");
    const double back = policy_.mu(barrier_);
    if (std::fabs(back - bound_) > 1e-10 * std::fabs(bound_))
        throw std::invalid_argument(
            "TruncationContext: mu(barrier) does not reproduce h(step) to rel 1e-10");
}

StateVector truncate_point(const TruncationContext& ctx, const StateVector& x) {
    const double b = ctx.barrier();
    const double b2 = b * b;
    StateVector out = x;
    // Rescale until the squared norm is inside the ball. The scale factor is
    // < 1 whenever the loop runs, so the norm strictly decreases and the
    // result is a fixed point of the map: re-applying it changes nothing.
    while (squared_norm(out) > b2) {
        const double s = b / euclidean_norm(out);
        if (!(s < 1.0)) break;
        for (double& v : out) v *= s;
    }
    return out;
}

StateVector truncated_drift(const TruncationContext& ctx, const SdeSystem& system,
                            const StateVector& x) {
    return system.drift(truncate_point(ctx, x));
}

StateVector truncated_diffusion(const TruncationContext& ctx, const SdeSystem& system,
                                const StateVector& x, std::size_t j) {
    return system.diffusion_col(truncate_point(ctx, x), j);
}

StateVector truncated_deriv(const TruncationContext& ctx, const SdeSystem& system,
                            const StateVector& x, std::size_t j, std::size_t l) {
    return system.diffusion_deriv(truncate_point(ctx, x), j, l);
}

EnvelopeReport check_mu_envelope(const SdeSystem& system, const TruncationPolicy& policy,
                                 std::span<const double> radii,
                                 std::size_t samples_per_radius, std::uint64_t seed) {
    EnvelopeReport rep;
    const std::size_t d = system.state_dim;
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        const double u = radii[ri];
        const double mu_u = policy.mu(u);
        for (std::size_t s = 0; s < samples_per_radius; ++s) {
            // random direction from normalized gaussian coordinates
            StateVector x(d);
            double n2 = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                x[i] = normal_draw(seed, static_cast<std::uint32_t>(s),
                                   static_cast<std::uint32_t>(i),
                                   static_cast<std::uint32_t>(ri), 0x20u);
                n2 += x[i] * x[i];
            }
            const double n = std::sqrt(n2);
            for (double& v : x) v = (n > 0.0) ? v / n * u : 0.0;

            double sup = euclidean_norm(system.drift(x));
            for (std::size_t j = 0; j < system.noise_dim; ++j) {
                sup = std::max(sup, euclidean_norm(system.diffusion_col(x, j)));
                for (std::size_t l = 0; l < d; ++l)
                    sup = std::max(sup, euclidean_norm(system.diffusion_deriv(x, j, l)));
            }
            const double ratio = sup / mu_u;
            if (ratio > rep.max_ratio) {
                rep.max_ratio = ratio;
                rep.worst_radius = u;
            }
        }
    }
    rep.holds = rep.max_ratio <= 1.0;
    return rep;
}

} // namespace truncmil
