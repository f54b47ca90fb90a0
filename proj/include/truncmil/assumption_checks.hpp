#pragma once

#include <cstdint>

#include "truncmil/sde_system.hpp"

namespace truncmil {

/// Candidate constants for the growth/monotonicity conditions under test.
/// They are user-supplied guesses being falsified, never derived.
struct CandidateConstants {
    double k1 = 1.0;     // one-sided Lipschitz (Khasminskii-type) constant
    double k2 = 1.0;     // polynomial Lipschitz constant
    double r = 1.0;      // polynomial growth exponent
    double alpha3 = 1.0; // first/second derivative growth constant
};

/// Sampling-based falsification report. A condition is `violated` iff its
/// worst sampled ratio lhs/rhs exceeded 1; passing is evidence, not proof.
struct AssumptionReport {
    std::size_t checked_pairs = 0;
    double lipschitz_ratio = 0.0;
    double khasminskii_ratio = 0.0;
    double derivative_growth_ratio = 0.0;
    bool lipschitz_violated = false;
    bool khasminskii_violated = false;
    bool derivative_growth_violated = false;
    std::uint64_t sample_seed = 0;
};

struct CommutativityResult {
    bool commutative = true;
    double worst_residual = 0.0;
};

/// Max over sampled states, column pairs j1 < j2 and coordinates l of
/// |L^{j1} g_{l,j2} - L^{j2} g_{l,j1}|. States are drawn uniformly from
/// [-box_halfwidth, box_halfwidth]^d, deterministically from the seed.
CommutativityResult check_commutativity(const SdeSystem& system, std::size_t samples,
                                        std::uint64_t seed, double tol = 1e-9,
                                        double box_halfwidth = 3.0);

/// Samples (x, y) pairs from the box and evaluates three ratio families:
///   - polynomial Lipschitz bound on f, g_j and L^{j1} g_{j2} differences,
///   - one-sided monotonicity condition at the given p,
///   - growth of first/second coefficient derivatives (g' taken from the
///     model's analytic columns, the rest by central finite differences).
AssumptionReport check_assumptions(const SdeSystem& system, const CandidateConstants& c,
                                   double p, std::size_t samples, std::uint64_t seed,
                                   double box_halfwidth = 3.0);

struct DerivativeConsistency {
    double max_relative_deviation = 0.0;
    bool consistent = true;
};

/// Central finite differences of g_j in coordinate l against the model's
/// analytic G_j^l on sampled points; deviation measured relative to
/// 1 + |G_j^l(x)|.
DerivativeConsistency check_derivative_consistency(const SdeSystem& system,
                                                   std::size_t samples, std::uint64_t seed,
                                                   double fd_step = 1e-6, double tol = 1e-5,
                                                   double box_halfwidth = 3.0);

} // namespace truncmil
