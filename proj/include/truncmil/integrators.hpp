#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "truncmil/brownian.hpp"
#include "truncmil/sde_system.hpp"
#include "truncmil/truncation.hpp"

namespace truncmil {

enum class Scheme {
    TruncatedMilstein,
    ClassicalMilstein,
    TruncatedEuler,
    EulerMaruyama,
};

/// Stable identifiers used by configs and CSV output.
std::string_view scheme_name(Scheme s);
Scheme scheme_from_name(std::string_view name);
bool scheme_uses_truncation(Scheme s);

/// States produced by one scheme along one path. Row k is Y_k. If a
/// non-finite coordinate ever appears, the offending row is kept, its index
/// recorded in blow_up_index, and the simulation stops there.
struct Trajectory {
    PathGrid grid;
    std::size_t state_dim = 1;
    Scheme scheme = Scheme::TruncatedMilstein;
    std::vector<double> states; // row-major, rows() x state_dim
    std::optional<std::size_t> blow_up_index;
    /// Present exactly for the truncated schemes.
    std::optional<TruncationContext> ctx;

    std::size_t rows() const { return states.size() / state_dim; }
    bool blown_up() const { return blow_up_index.has_value(); }
    std::span<const double> state(std::size_t k) const {
        return {states.data() + k * state_dim, state_dim};
    }
    /// Terminal state Y_N; only meaningful when the trajectory is finite.
    std::span<const double> terminal() const { return state(rows() - 1); }
};

/// One step of the truncated Milstein scheme (commutative form):
///   y + f~ dt + sum_j g~_j dB^j
///     + 1/2 sum_{j1,j2} L^{j1} g~_{j2} (dB^{j1} dB^{j2} - delta_{j1,j2} dt),
/// every truncated coefficient evaluated at the single projected point.
StateVector truncated_milstein_step(const SdeSystem& system, const TruncationContext& ctx,
                                    const StateVector& y, std::span<const double> dB,
                                    double dt);

/// Same update with the raw coefficients (requires commutative noise).
StateVector classical_milstein_step(const SdeSystem& system, const StateVector& y,
                                    std::span<const double> dB, double dt);

StateVector truncated_euler_step(const SdeSystem& system, const TruncationContext& ctx,
                                 const StateVector& y, std::span<const double> dB, double dt);

StateVector euler_maruyama_step(const SdeSystem& system, const StateVector& y,
                                std::span<const double> dB, double dt);

/// Value of the continuous-time scheme at t_k + s_minus_tk, given the partial
/// increment B(s) - B(t_k). At (dt, dB_k) this reproduces the one-step map
/// bit for bit: both go through the same update kernel.
StateVector interpolate_within_step(const SdeSystem& system, const TruncationContext& ctx,
                                    const StateVector& y_k, std::span<const double> dB_partial,
                                    double s_minus_tk);

/// Folds the scheme's step map over all increments of the path.
/// ctx is required for the truncated schemes and must match grid.step();
/// it is forbidden for the untruncated ones.
Trajectory simulate(const SdeSystem& system, Scheme scheme, const PathGrid& grid,
                    const BrownianPath& path, const TruncationContext* ctx = nullptr);

} // namespace truncmil
