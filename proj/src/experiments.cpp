#include "truncmil/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "truncmil/parallel.hpp"
#include "truncmil/rng.hpp"

namespace truncmil {

namespace {
constexpr std::size_t kChunk = 256;
constexpr std::uint32_t kTagMidstep = 0x30u;
} // namespace

SdeSystem make_model(const ModelConfig& cfg) {
    if (cfg.name == "paper-example") return make_quintic_example();
    if (cfg.name == "gbm") return make_gbm(cfg.a, cfg.sigma, cfg.x0);
    if (cfg.name == "linear-2d-diagonal")
        return make_linear_2d_diagonal(cfg.a, cfg.sigma, cfg.x0);
    return builtin_model(cfg.name); // throws with the list of known names
}

TruncationPolicy make_policy(const PolicyConfig& cfg) {
    if (cfg.family != "power")
        throw std::invalid_argument("unknown policy family \"" + cfg.family +
                                    "\"; available: power");
    return power_policy(cfg.a, cfg.epsilon, cfg.delta_star);
}

std::size_t steps_for_exponent(double t_end, int exponent) {
    const double raw = t_end * std::ldexp(1.0, exponent);
    const double rounded = std::round(raw);
    if (!(rounded >= 1.0) || std::fabs(raw - rounded) > 1e-9)
        throw std::invalid_argument(
            "t_end * 2^exponent must be a positive integer step count");
    return static_cast<std::size_t>(rounded);
}

FitResult fit_order(std::span<const std::pair<double, double>> pts) {
    if (pts.size() < 3)
        throw std::invalid_argument("fit_order: need at least 3 points");
    const std::size_t n = pts.size();
    double sx = 0.0, sy = 0.0;
    for (const auto& [delta, err] : pts) {
        if (!(delta > 0.0) || !(err > 0.0))
            throw std::invalid_argument("fit_order: deltas and errors must be positive");
        sx += std::log2(delta);
        sy += std::log2(err);
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [delta, err] : pts) {
        const double dx = std::log2(delta) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log2(err) - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_order: deltas must be distinct");

    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double ssr = 0.0;
    for (const auto& [delta, err] : pts) {
        const double resid = std::log2(err) - (fit.intercept + fit.slope * std::log2(delta));
        ssr += resid * resid;
    }
    const double sigma2 = ssr / static_cast<double>(n - 2);
    fit.half_width = 1.959963984540054 * std::sqrt(sigma2 / sxx);
    return fit;
}

namespace {

TheoremGuard rate_condition_guard(const ExperimentSpec& spec) {
    TheoremGuard guard;
    if (spec.policy.family != "power") {
        guard.message = "rate condition unchecked: non-power policy family";
        return guard;
    }
    const double p = spec.error_power / 2.0;
    const double a = spec.policy.a;
    const double eps = spec.policy.epsilon;
    // h(delta) >= mu((delta^p h(delta)^{2p})^{-1/(q-p)}) for the power family
    // reduces to q >= p + a p (1 - 2 eps) / eps.
    guard.q_min = p + a * p * (1.0 - 2.0 * eps) / eps;
    std::ostringstream os;
    if (spec.theorem_q) {
        guard.checked = true;
        guard.satisfied = *spec.theorem_q > p && *spec.theorem_q >= guard.q_min;
        os << "rate condition with q=" << *spec.theorem_q
           << (guard.satisfied ? " holds" : " FAILS") << " (needs q >= " << guard.q_min << ")";
    } else {
        os << "rate condition unchecked: no q supplied; any q >= " << guard.q_min
           << " satisfies it";
    }
    if (p < 1.0) os << "; note error_power < 2 sits below the p >= 1 regime of the rate bound";
    guard.message = os.str();
    return guard;
}

double norm_of_difference(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

} // namespace

ConvergenceReport strong_error(const ExperimentSpec& spec) {
    if (spec.samples < 2) throw std::invalid_argument("strong_error: samples must be >= 2");
    if (spec.schemes.empty()) throw std::invalid_argument("strong_error: no schemes given");
    if (spec.coarse_exponents.empty())
        throw std::invalid_argument("strong_error: no coarse exponents given");
    if (!(spec.error_power > 0.0))
        throw std::invalid_argument("strong_error: error_power must be positive");

    const SdeSystem system = make_model(spec.model);
    const TruncationPolicy policy = make_policy(spec.policy);
    validate_policy(policy);

    const bool exact_ref = spec.reference == ReferenceKind::ExactGbm;
    if (exact_ref && spec.model.name != "gbm")
        throw std::invalid_argument("strong_error: exact reference is only defined for gbm");

    const int base_exponent =
        exact_ref ? *std::max_element(spec.coarse_exponents.begin(), spec.coarse_exponents.end())
                  : spec.reference_exponent;
    for (int e : spec.coarse_exponents) {
        if (e > base_exponent)
            throw std::invalid_argument(
                "strong_error: coarse exponents must not exceed the reference exponent");
        steps_for_exponent(spec.t_end, e); // validates integrality
    }

    const PathGrid base_grid(spec.t_end, steps_for_exponent(spec.t_end, base_exponent));
    const std::size_t n_levels = spec.coarse_exponents.size();
    const std::size_t n_schemes = spec.schemes.size();
    const std::size_t M = spec.samples;

    std::vector<PathGrid> level_grids;
    std::vector<TruncationContext> level_ctx;
    level_grids.reserve(n_levels);
    level_ctx.reserve(n_levels);
    for (int e : spec.coarse_exponents) {
        level_grids.emplace_back(spec.t_end, steps_for_exponent(spec.t_end, e));
        level_ctx.emplace_back(policy, level_grids.back().step());
    }
    std::optional<TruncationContext> ref_ctx;
    if (!exact_ref) ref_ctx.emplace(policy, base_grid.step());

    const double two_p = spec.error_power;
    std::vector<double> powered((n_schemes * n_levels) * M, 0.0);
    std::vector<std::uint8_t> excluded((n_schemes * n_levels) * M, 0);
    std::vector<std::uint8_t> ref_blown(M, 0);

    parallel_chunks(M, kChunk, spec.workers, [&](std::size_t, std::size_t begin,
                                                 std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const BrownianPath path =
                BrownianPath::sample(base_grid, system.noise_dim, spec.master_seed, i);

            StateVector x_ref;
            if (exact_ref) {
                const double bt = path.total_displacement(0);
                x_ref = {spec.model.x0 *
                         std::exp((spec.model.a - 0.5 * spec.model.sigma * spec.model.sigma) *
                                      spec.t_end +
                                  spec.model.sigma * bt)};
            } else {
                const Trajectory ref = simulate(system, Scheme::TruncatedMilstein, base_grid,
                                                path, &*ref_ctx);
                if (ref.blown_up()) {
                    ref_blown[i] = 1;
                    continue;
                }
                x_ref.assign(ref.terminal().begin(), ref.terminal().end());
            }

            for (std::size_t l = 0; l < n_levels; ++l) {
                const std::size_t factor = base_grid.steps / level_grids[l].steps;
                const BrownianPath cpath = path.coarsened(factor);
                for (std::size_t s = 0; s < n_schemes; ++s) {
                    const Scheme scheme = spec.schemes[s];
                    const TruncationContext* ctx =
                        scheme_uses_truncation(scheme) ? &level_ctx[l] : nullptr;
                    const Trajectory traj =
                        simulate(system, scheme, level_grids[l], cpath, ctx);
                    const std::size_t slot = (s * n_levels + l) * M + i;
                    if (traj.blown_up()) {
                        excluded[slot] = 1;
                    } else {
                        const double diff = norm_of_difference(x_ref, traj.terminal());
                        powered[slot] = (two_p == 1.0) ? diff : std::pow(diff, two_p);
                    }
                }
            }
        }
    });

    for (std::size_t i = 0; i < M; ++i)
        if (ref_blown[i])
            throw std::runtime_error("strong_error: reference solver blew up at sample " +
                                     std::to_string(i) + "; the experiment is invalid");

    ConvergenceReport report;
    report.master_seed = spec.master_seed;
    report.samples = M;
    report.guard = rate_condition_guard(spec);

    for (std::size_t s = 0; s < n_schemes; ++s) {
        std::vector<std::pair<double, double>> fit_points;
        for (std::size_t l = 0; l < n_levels; ++l) {
            ErrorRow row;
            row.scheme = spec.schemes[s];
            row.delta = level_grids[l].step();
            row.samples = M;

            const std::size_t base = (s * n_levels + l) * M;
            std::size_t included = 0;
            double sum = 0.0;
            for (std::size_t i = 0; i < M; ++i) {
                if (excluded[base + i]) continue;
                sum += powered[base + i];
                ++included;
            }
            row.excluded = M - included;
            if (included == 0) {
                row.error = std::numeric_limits<double>::quiet_NaN();
                row.std_error = std::numeric_limits<double>::quiet_NaN();
            } else {
                const double mean = sum / static_cast<double>(included);
                double var = 0.0;
                for (std::size_t i = 0; i < M; ++i) {
                    if (excluded[base + i]) continue;
                    const double dev = powered[base + i] - mean;
                    var += dev * dev;
                }
                var = (included > 1) ? var / static_cast<double>(included - 1) : 0.0;
                const double se_mean = std::sqrt(var / static_cast<double>(included));
                row.error = (two_p == 1.0) ? mean : std::pow(mean, 1.0 / two_p);
                if (two_p == 1.0 || mean == 0.0) {
                    row.std_error = se_mean;
                } else {
                    // delta method through x -> x^{1/(2p)}
                    row.std_error =
                        se_mean * std::pow(mean, 1.0 / two_p - 1.0) / two_p;
                }
                if (mean > 0.0) fit_points.emplace_back(row.delta, row.error);
            }
            report.rows.push_back(row);
        }

        SlopeFit fit;
        fit.scheme = spec.schemes[s];
        fit.points = fit_points.size();
        if (fit_points.size() >= 3 && fit_points.size() == n_levels) {
            const FitResult r = fit_order(fit_points);
            fit.slope = r.slope;
            fit.intercept = r.intercept;
            fit.half_width = r.half_width;
        } else {
            fit.degenerate = true;
            report.degenerate = true;
        }
        report.fits.push_back(fit);
    }
    return report;
}

MomentTable moment_sweep(const ModelConfig& model, Scheme scheme, const PolicyConfig& policy_cfg,
                         double t_end, std::span<const double> p_list,
                         std::span<const int> delta_exponents, std::size_t samples,
                         std::uint64_t master_seed, std::size_t workers) {
    if (samples < 100) throw std::invalid_argument("moment_sweep: samples must be >= 100");
    if (p_list.empty() || delta_exponents.empty())
        throw std::invalid_argument("moment_sweep: p_list and delta_exponents must be nonempty");

    const SdeSystem system = make_model(model);
    const TruncationPolicy policy = make_policy(policy_cfg);
    validate_policy(policy);

    MomentTable table;
    const std::size_t n_p = p_list.size();

    for (int e : delta_exponents) {
        const PathGrid grid(t_end, steps_for_exponent(t_end, e));
        if (scheme_uses_truncation(scheme) && grid.step() > policy.delta_star)
            throw std::invalid_argument("moment_sweep: step exceeds delta_star");
        std::optional<TruncationContext> ctx;
        if (scheme_uses_truncation(scheme)) ctx.emplace(policy, grid.step());

        const std::size_t n_times = grid.steps + 1;
        const std::size_t n_chunks = (samples + kChunk - 1) / kChunk;
        // per-chunk accumulators, reduced in chunk order for determinism
        std::vector<double> acc(n_chunks * n_p * n_times, 0.0);
        std::vector<std::size_t> chunk_excluded(n_chunks, 0);

        parallel_chunks(samples, kChunk, workers, [&](std::size_t chunk, std::size_t begin,
                                                      std::size_t end) {
            double* chunk_acc = acc.data() + chunk * n_p * n_times;
            for (std::size_t i = begin; i < end; ++i) {
                const BrownianPath path =
                    BrownianPath::sample(grid, system.noise_dim, master_seed, i);
                const Trajectory traj =
                    simulate(system, scheme, grid, path, ctx ? &*ctx : nullptr);
                if (traj.blown_up()) {
                    ++chunk_excluded[chunk];
                    continue;
                }
                for (std::size_t k = 0; k < n_times; ++k) {
                    const double v2 = squared_norm(traj.state(k));
                    for (std::size_t pi = 0; pi < n_p; ++pi)
                        chunk_acc[pi * n_times + k] +=
                            (p_list[pi] == 1.0) ? v2 : std::pow(v2, p_list[pi]);
                }
            }
        });

        std::size_t excluded_total = 0;
        for (std::size_t c = 0; c < n_chunks; ++c) excluded_total += chunk_excluded[c];
        const std::size_t included = samples - excluded_total;

        for (std::size_t pi = 0; pi < n_p; ++pi) {
            double sup = 0.0;
            for (std::size_t k = 0; k < n_times; ++k) {
                double sum = 0.0;
                for (std::size_t c = 0; c < n_chunks; ++c)
                    sum += acc[(c * n_p + pi) * n_times + k];
                if (included > 0) sup = std::max(sup, sum / static_cast<double>(included));
            }
            MomentRow row;
            row.p = p_list[pi];
            row.delta = grid.step();
            row.sup_moment = sup;
            row.samples = samples;
            row.excluded = excluded_total;
            table.rows.push_back(row);
        }
    }

    // plain-axis OLS of sup_moment against delta, one trend per p
    for (std::size_t pi = 0; pi < n_p; ++pi) {
        double sx = 0.0, sy = 0.0;
        std::size_t n = 0;
        for (const MomentRow& row : table.rows) {
            if (row.p != p_list[pi]) continue;
            sx += row.delta;
            sy += row.sup_moment;
            ++n;
        }
        MomentTrend trend;
        trend.p = p_list[pi];
        if (n >= 2) {
            const double mx = sx / static_cast<double>(n);
            const double my = sy / static_cast<double>(n);
            double sxx = 0.0, sxy = 0.0;
            for (const MomentRow& row : table.rows) {
                if (row.p != p_list[pi]) continue;
                sxx += (row.delta - mx) * (row.delta - mx);
                sxy += (row.delta - mx) * (row.sup_moment - my);
            }
            trend.slope = (sxx > 0.0) ? sxy / sxx : 0.0;
            trend.intercept = my - trend.slope * mx;
        }
        table.trends.push_back(trend);
    }
    return table;
}

std::vector<MidstepRow> midstep_second_moment(const ModelConfig& model,
                                              const PolicyConfig& policy_cfg, double t_end,
                                              std::span<const int> delta_exponents,
                                              std::size_t samples, std::uint64_t master_seed,
                                              std::size_t workers) {
    const SdeSystem system = make_model(model);
    const TruncationPolicy policy = make_policy(policy_cfg);
    validate_policy(policy);

    std::vector<MidstepRow> rows;
    for (int e : delta_exponents) {
        const PathGrid grid(t_end, steps_for_exponent(t_end, e));
        if (grid.steps % 2 != 0)
            throw std::invalid_argument("midstep_second_moment: even step count required");
        const TruncationContext ctx(policy, grid.step());
        const std::size_t k_mid = grid.steps / 2;
        const double half = 0.5 * grid.step();
        const double root_half = std::sqrt(half);
        const std::size_t m = system.noise_dim;

        std::vector<double> sq(samples, 0.0);
        parallel_chunks(samples, kChunk, workers, [&](std::size_t, std::size_t begin,
                                                      std::size_t end) {
            StateVector partial(m);
            for (std::size_t i = begin; i < end; ++i) {
                const BrownianPath path = BrownianPath::sample(grid, m, master_seed, i);
                const Trajectory traj =
                    simulate(system, Scheme::TruncatedMilstein, grid, path, &ctx);
                if (traj.blown_up() && *traj.blow_up_index <= k_mid) continue;
                const StateVector y_k(traj.state(k_mid).begin(), traj.state(k_mid).end());
                for (std::size_t j = 0; j < m; ++j)
                    partial[j] = root_half *
                                 normal_draw(master_seed, static_cast<std::uint32_t>(i),
                                             static_cast<std::uint32_t>(e),
                                             static_cast<std::uint32_t>(j), kTagMidstep);
                const StateVector y_mid =
                    interpolate_within_step(system, ctx, y_k, partial, half);
                sq[i] = norm_of_difference(y_mid, y_k);
                sq[i] *= sq[i];
            }
        });

        double sum = 0.0;
        for (double v : sq) sum += v;
        rows.push_back({grid.step(), sum / static_cast<double>(samples)});
    }
    return rows;
}

} // namespace truncmil
