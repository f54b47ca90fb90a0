#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

#include "truncmil/sde_system.hpp"
#include "truncmil/state.hpp"

namespace truncmil {

/// The (mu, mu^{-1}, h, delta*) quadruple that defines the truncation.
///
/// mu must be strictly increasing on R_+ with mu(u) -> infinity and dominate
/// the coefficient norms on balls; h must be strictly decreasing on
/// (0, delta*] with h(delta*) >= mu(1) and delta^{1/4} h(delta) <= 1.
/// validate_policy probes those conditions on logarithmic grids.
struct TruncationPolicy {
    std::function<double(double)> mu;
    std::function<double(double)> mu_inv;
    std::function<double(double)> h;
    double delta_star = 1.0;
    std::string label;
};

/// mu(u) = u^a, h(delta) = delta^{-epsilon}. Closed-form inverse; admissible
/// exactly when epsilon <= 1/4 (given delta* <= 1).
TruncationPolicy power_policy(double a, double epsilon, double delta_star = 1.0);

struct PolicyValidation {
    bool admissible_at_delta_star = false; // h(delta*) >= mu(1)
    bool step_bound_ok = false;            // delta^{1/4} h(delta) <= 1 on grid
    bool inverse_consistent = false;       // mu(mu_inv(v)) = v to rel 1e-10
    bool mu_increasing = false;
    bool h_decreasing = false;

    double worst_step_bound = 0.0;
    double worst_step_bound_delta = 0.0;
    double worst_inverse_rel = 0.0;
    double worst_inverse_v = 0.0;

    bool passed() const {
        return admissible_at_delta_star && step_bound_ok && inverse_consistent &&
               mu_increasing && h_decreasing;
    }
    std::string summary() const;
};

class PolicyRejected : public std::runtime_error {
public:
    PolicyRejected(const std::string& what, PolicyValidation rep)
        : std::runtime_error(what), report(std::move(rep)) {}
    PolicyValidation report;
};

/// Probes all policy conditions on logarithmic grids (delta between
/// 1e-8*delta* and delta*) and throws PolicyRejected, carrying the report,
/// if any fails. A passing report is returned. grid_points >= 2.
PolicyValidation validate_policy(const TruncationPolicy& policy,
                                 std::size_t grid_points = 64);

/// Frozen per-step-size state: barrier = mu_inv(h(step)), bound = h(step).
/// Immutable after construction; safe to share across workers.
class TruncationContext {
public:
    TruncationContext(TruncationPolicy policy, double step);

    double step() const { return step_; }
    double barrier() const { return barrier_; }
    double bound() const { return bound_; }
    const TruncationPolicy& policy() const { return policy_; }

private:
    TruncationPolicy policy_;
    double step_;
    double barrier_;
    double bound_;
};

/// Radial projection onto the closed ball of radius barrier. Points inside
/// come back bitwise unchanged (so 0 maps to 0); the projection is an exact
/// retraction: applying it twice gives the same bits as applying it once.
StateVector truncate_point(const TruncationContext& ctx, const StateVector& x);

/// f, g_j, G_j^l evaluated at the projected point. Each step map projects
/// once and reuses the point for every coefficient.
StateVector truncated_drift(const TruncationContext& ctx, const SdeSystem& system,
                            const StateVector& x);
StateVector truncated_diffusion(const TruncationContext& ctx, const SdeSystem& system,
                                const StateVector& x, std::size_t j);
StateVector truncated_deriv(const TruncationContext& ctx, const SdeSystem& system,
                            const StateVector& x, std::size_t j, std::size_t l);

struct EnvelopeReport {
    double max_ratio = 0.0; // sup |coef| / mu(u) over sampled spheres
    double worst_radius = 0.0;
    bool holds = true;
};

/// Spot-check of the mu envelope: samples states on spheres of the given
/// radii and compares sup(|f|, |g_j|, |G_j^l|) against mu(radius).
EnvelopeReport check_mu_envelope(const SdeSystem& system, const TruncationPolicy& policy,
                                 std::span<const double> radii,
                                 std::size_t samples_per_radius, std::uint64_t seed);

} // namespace truncmil
