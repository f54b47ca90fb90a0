#include "truncmil/assumption_checks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "truncmil/rng.hpp"

namespace truncmil {

namespace {

// Distinct c3 tags keep the diagnostic streams disjoint from path sampling
// (which uses tag 0) and from each other.
constexpr std::uint32_t kTagCommutativity = 0x10u;
constexpr std::uint32_t kTagAssumptionX = 0x11u;
constexpr std::uint32_t kTagAssumptionY = 0x12u;
constexpr std::uint32_t kTagDerivative = 0x13u;

StateVector box_sample(std::size_t dim, double halfwidth, std::uint64_t seed,
                       std::size_t sample, std::uint32_t tag) {
    StateVector x(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const double u = uniform_draw(seed, static_cast<std::uint32_t>(sample),
                                      static_cast<std::uint32_t>(i), 0u, tag);
        x[i] = halfwidth * (2.0 * u - 1.0);
    }
    return x;
}

StateVector sub(const StateVector& a, const StateVector& b) {
    StateVector d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

double dot(const StateVector& a, const StateVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

CommutativityResult check_commutativity(const SdeSystem& system, std::size_t samples,
                                        std::uint64_t seed, double tol,
                                        double box_halfwidth) {
    if (samples == 0) throw std::invalid_argument("check_commutativity: samples must be >= 1");
    CommutativityResult res;
    for (std::size_t s = 0; s < samples; ++s) {
        const StateVector x = box_sample(system.state_dim, box_halfwidth, seed, s,
                                         kTagCommutativity);
        for (std::size_t j1 = 0; j1 < system.noise_dim; ++j1) {
            for (std::size_t j2 = j1 + 1; j2 < system.noise_dim; ++j2) {
                const StateVector a = eval_L_operator(system, x, j1, j2);
                const StateVector b = eval_L_operator(system, x, j2, j1);
                for (std::size_t l = 0; l < system.state_dim; ++l)
                    res.worst_residual = std::max(res.worst_residual, std::fabs(a[l] - b[l]));
            }
        }
    }
    res.commutative = res.worst_residual <= tol;
    return res;
}

AssumptionReport check_assumptions(const SdeSystem& system, const CandidateConstants& c,
                                   double p, std::size_t samples, std::uint64_t seed,
                                   double box_halfwidth) {
    if (!(c.k1 > 0.0) || !(c.k2 > 0.0) || !(c.alpha3 > 0.0))
        throw std::invalid_argument("check_assumptions: candidate constants must be positive");
    if (p < 1.0) throw std::invalid_argument("check_assumptions: p must be >= 1");

    AssumptionReport rep;
    rep.sample_seed = seed;
    rep.checked_pairs = samples;

    const std::size_t d = system.state_dim;
    const std::size_t m = system.noise_dim;
    const double fd = 1e-5;

    for (std::size_t s = 0; s < samples; ++s) {
        const StateVector x = box_sample(d, box_halfwidth, seed, s, kTagAssumptionX);
        const StateVector y = box_sample(d, box_halfwidth, seed, s, kTagAssumptionY);
        const double dist = euclidean_norm(sub(x, y));
        if (dist == 0.0) continue;

        // polynomial Lipschitz: |F(x)-F(y)| <= k2 (1 + |x|^r + |y|^r) |x-y|
        const double poly =
            c.k2 * (1.0 + std::pow(euclidean_norm(x), c.r) + std::pow(euclidean_norm(y), c.r)) *
            dist;
        double worst_diff = euclidean_norm(sub(system.drift(x), system.drift(y)));
        for (std::size_t j = 0; j < m; ++j)
            worst_diff = std::max(
                worst_diff,
                euclidean_norm(sub(system.diffusion_col(x, j), system.diffusion_col(y, j))));
        for (std::size_t j1 = 0; j1 < m; ++j1)
            for (std::size_t j2 = 0; j2 < m; ++j2)
                worst_diff = std::max(worst_diff,
                                      euclidean_norm(sub(eval_L_operator(system, x, j1, j2),
                                                         eval_L_operator(system, y, j1, j2))));
        rep.lipschitz_ratio = std::max(rep.lipschitz_ratio, worst_diff / poly);

        // one-sided condition:
        // <x-y, f(x)-f(y)> + (2p-1) sum_j |g_j(x)-g_j(y)|^2 <= k1 |x-y|^2
        double lhs = dot(sub(x, y), sub(system.drift(x), system.drift(y)));
        for (std::size_t j = 0; j < m; ++j)
            lhs += (2.0 * p - 1.0) *
                   squared_norm(sub(system.diffusion_col(x, j), system.diffusion_col(y, j)));
        rep.khasminskii_ratio = std::max(rep.khasminskii_ratio, lhs / (c.k1 * dist * dist));

        // derivative growth at both sampled points:
        // |f_l'| v |f_l''| v |g_{l,n}'| v |g_{l,n}''| <= alpha3 (1 + |point|^{r+1})
        // Gradients of f and all second derivatives come from central
        // differences (diagonal stencil for the second-order terms);
        // gradients of g come from the analytic derivative columns.
        for (const StateVector* pt : {&x, &y}) {
            const StateVector& z = *pt;
            std::vector<double> grad_f(d, 0.0), hess_f(d, 0.0), hess_g(m * d, 0.0);
            const StateVector f0 = system.drift(z);
            StateVector zp = z, zm = z;
            for (std::size_t i = 0; i < d; ++i) {
                zp[i] = z[i] + fd;
                zm[i] = z[i] - fd;
                const StateVector fp = system.drift(zp);
                const StateVector fm = system.drift(zm);
                for (std::size_t l = 0; l < d; ++l) {
                    const double g1 = (fp[l] - fm[l]) / (2.0 * fd);
                    const double g2 = (fp[l] - 2.0 * f0[l] + fm[l]) / (fd * fd);
                    grad_f[l] += g1 * g1;
                    hess_f[l] += g2 * g2;
                }
                for (std::size_t n = 0; n < m; ++n) {
                    const StateVector gp = system.diffusion_col(zp, n);
                    const StateVector gm = system.diffusion_col(zm, n);
                    const StateVector g0 = system.diffusion_col(z, n);
                    for (std::size_t l = 0; l < d; ++l) {
                        const double g2 = (gp[l] - 2.0 * g0[l] + gm[l]) / (fd * fd);
                        hess_g[n * d + l] += g2 * g2;
                    }
                }
                zp[i] = z[i];
                zm[i] = z[i];
            }
            double worst = 0.0;
            for (std::size_t l = 0; l < d; ++l)
                worst = std::max({worst, std::sqrt(grad_f[l]), std::sqrt(hess_f[l])});
            for (double v : hess_g) worst = std::max(worst, std::sqrt(v));
            // |g'_{l,n}|: row l of the Jacobian of g_n, component i = (G_n^i)_l
            for (std::size_t n = 0; n < m; ++n)
                for (std::size_t l = 0; l < d; ++l) {
                    double row2 = 0.0;
                    for (std::size_t i = 0; i < d; ++i) {
                        const StateVector col = system.diffusion_deriv(z, n, i);
                        row2 += col[l] * col[l];
                    }
                    worst = std::max(worst, std::sqrt(row2));
                }
            const double rhs = c.alpha3 * (1.0 + std::pow(euclidean_norm(z), c.r + 1.0));
            rep.derivative_growth_ratio = std::max(rep.derivative_growth_ratio, worst / rhs);
        }
    }

    rep.lipschitz_violated = rep.lipschitz_ratio > 1.0;
    rep.khasminskii_violated = rep.khasminskii_ratio > 1.0;
    rep.derivative_growth_violated = rep.derivative_growth_ratio > 1.0;
    return rep;
}

DerivativeConsistency check_derivative_consistency(const SdeSystem& system,
                                                   std::size_t samples, std::uint64_t seed,
                                                   double fd_step, double tol,
                                                   double box_halfwidth) {
    DerivativeConsistency res;
    const std::size_t d = system.state_dim;
    for (std::size_t s = 0; s < samples; ++s) {
        const StateVector x = box_sample(d, box_halfwidth, seed, s, kTagDerivative);
        StateVector xp = x, xm = x;
        for (std::size_t l = 0; l < d; ++l) {
            xp[l] = x[l] + fd_step;
            xm[l] = x[l] - fd_step;
            for (std::size_t j = 0; j < system.noise_dim; ++j) {
                const StateVector gp = system.diffusion_col(xp, j);
                const StateVector gm = system.diffusion_col(xm, j);
                const StateVector analytic = system.diffusion_deriv(x, j, l);
                double diff2 = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    const double fd_val = (gp[i] - gm[i]) / (2.0 * fd_step);
                    diff2 += (fd_val - analytic[i]) * (fd_val - analytic[i]);
                }
                const double rel =
                    std::sqrt(diff2) / (1.0 + euclidean_norm(analytic));
                res.max_relative_deviation = std::max(res.max_relative_deviation, rel);
            }
            xp[l] = x[l];
            xm[l] = x[l];
        }
    }
    res.consistent = res.max_relative_deviation <= tol;
    return res;
}

} // namespace truncmil
