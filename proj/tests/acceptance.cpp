// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Every tolerance is pinned here, in code; the harness parameters match the
// documented experiment profiles in the README.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "truncmil/config.hpp"
#include "truncmil/csv.hpp"
#include "truncmil/experiments.hpp"
#include "truncmil/integrators.hpp"
#include "truncmil/rng.hpp"

using namespace truncmil;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20170829;
constexpr std::size_t kWorkers = 4;
int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str());
    if (!pass) ++failures;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// 1. Strong-convergence slope of the truncated Milstein method on the
//    quintic benchmark, reference step 2^-13, coarse steps 2^-10..2^-7,
//    T=2, M=1000, L1 errors. Asserted band: [0.75, 1.25].
void criterion1() {
    ExperimentSpec spec;
    spec.model.name = "paper-example";
    spec.policy = {.family = "power", .a = 5.0, .epsilon = 0.1, .delta_star = 1.0};
    spec.schemes = {Scheme::TruncatedMilstein};
    spec.t_end = 2.0;
    spec.reference_exponent = 13;
    spec.coarse_exponents = {10, 9, 8, 7};
    spec.samples = 1000;
    spec.master_seed = kSeed;
    spec.error_power = 1.0;
    spec.workers = kWorkers;

    const ConvergenceReport rep = strong_error(spec);
    const SlopeFit& fit = rep.fits.at(0);
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i)
        monotone = monotone && rep.rows[i].error < rep.rows[i + 1].error;

    std::ostringstream os;
    os << "quintic benchmark slope " << format_double(fit.slope) << " +/- "
       << format_double(fit.half_width) << " (band [0.75, 1.25]); errors "
       << (monotone ? "shrink monotonically with the step" : "NOT monotone");
    const bool pass = !fit.degenerate && fit.slope >= 0.75 && fit.slope <= 1.25 && monotone;
    report(1, pass, os.str());
}

// 2. gbm: truncated and classical Milstein bitwise identical while the
//    barrier is never hit; L1 slope vs the closed form in [0.85, 1.15].
void criterion2() {
    const ModelConfig model{.name = "gbm", .a = 0.05, .sigma = 0.2, .x0 = 1.0};
    const PolicyConfig policy{.family = "power", .a = 1.0, .epsilon = 0.25,
                              .delta_star = 1.0};
    const SdeSystem system = make_model(model);
    const TruncationPolicy pol = make_policy(policy);

    bool bitwise = true, barrier_clear = true;
    for (int e : {9, 8, 7, 6}) {
        const PathGrid grid(1.0, steps_for_exponent(1.0, e));
        const TruncationContext ctx(pol, grid.step());
        for (std::uint64_t i = 0; i < 2000 && bitwise; ++i) {
            const BrownianPath path = sample_path(grid, 1, kSeed, i);
            const Trajectory a = simulate(system, Scheme::TruncatedMilstein, grid, path, &ctx);
            const Trajectory b = simulate(system, Scheme::ClassicalMilstein, grid, path, nullptr);
            for (std::size_t k = 0; k < a.rows(); ++k) {
                if (a.state(k)[0] != b.state(k)[0]) bitwise = false;
                if (std::fabs(b.state(k)[0]) > ctx.barrier()) barrier_clear = false;
            }
        }
    }

    ExperimentSpec spec;
    spec.model = model;
    spec.policy = policy;
    spec.schemes = {Scheme::ClassicalMilstein};
    spec.t_end = 1.0;
    spec.coarse_exponents = {9, 8, 7, 6};
    spec.samples = 2000;
    spec.master_seed = kSeed;
    spec.reference = ReferenceKind::ExactGbm;
    spec.workers = kWorkers;
    const ConvergenceReport rep = strong_error(spec);
    const double slope = rep.fits.at(0).slope;

    std::ostringstream os;
    os << "gbm trajectories " << (bitwise ? "bitwise identical" : "DIFFER") << ", barrier "
       << (barrier_clear ? "never hit" : "HIT") << ", exact-solution slope "
       << format_double(slope) << " (band [0.85, 1.15])";
    report(2, bitwise && barrier_clear && slope >= 0.85 && slope <= 1.15, os.str());
}

// 3. Truncated coefficient envelope |f~| v |g~| v |G~| <= h(delta)(1+1e-12)
//    over 1e5 random states and 8 step sizes. The u^5 envelope dominates
//    |g'| = 2u only for u >= 2^(1/4), so the compliant dyadic steps start at
//    2^-13 under h(delta) = delta^-0.1; the grid is 2^-13..2^-20.
void criterion3() {
    const SdeSystem system = builtin_model("paper-example");
    const TruncationPolicy pol = power_policy(5.0, 0.1, 1.0);
    std::size_t violations = 0;
    double worst = 0.0;
    for (int e = 13; e <= 20; ++e) {
        const TruncationContext ctx(pol, std::ldexp(1.0, -e));
        const double cap = ctx.bound() * (1.0 + 1e-12);
        for (std::size_t i = 0; i < 100000; ++i) {
            const double x = 6.0 * (2.0 * uniform_draw(kSeed, static_cast<std::uint32_t>(i),
                                                       static_cast<std::uint32_t>(e), 0,
                                                       0x40u) -
                                    1.0);
            const double sup = std::max({std::fabs(truncated_drift(ctx, system, {x})[0]),
                                         std::fabs(truncated_diffusion(ctx, system, {x}, 0)[0]),
                                         std::fabs(truncated_deriv(ctx, system, {x}, 0, 0)[0])});
            worst = std::max(worst, sup / ctx.bound());
            if (sup > cap) ++violations;
        }
    }
    std::ostringstream os;
    os << "coefficient envelope: " << violations << " violations over 8x1e5 samples, worst "
       << format_double(worst) << " of h(delta)";
    report(3, violations == 0, os.str());
}

// 4. One-sided growth bound of the truncated pair at p=1, alpha1=1:
//    <x, f~(x)> + |g~(x)|^2 <= 2 (1 + |x|^2), zero violations.
void criterion4() {
    const SdeSystem system = builtin_model("paper-example");
    const TruncationPolicy pol = power_policy(5.0, 0.1, 1.0);
    std::size_t violations = 0;
    for (int e = 6; e <= 13; ++e) {
        const TruncationContext ctx(pol, std::ldexp(1.0, -e));
        for (std::size_t i = 0; i < 100000; ++i) {
            const double x = 3.0 * (2.0 * uniform_draw(kSeed, static_cast<std::uint32_t>(i),
                                                       static_cast<std::uint32_t>(e), 1,
                                                       0x40u) -
                                    1.0);
            const double lhs = x * truncated_drift(ctx, system, {x})[0] +
                               std::pow(truncated_diffusion(ctx, system, {x}, 0)[0], 2);
            if (lhs > 2.0 * (1.0 + x * x)) ++violations;
        }
    }
    std::ostringstream os;
    os << "one-sided growth bound (p=1, alpha1=1): " << violations
       << " violations over 8x1e5 samples";
    report(4, violations == 0, os.str());
}

// 5. Moment boundedness: sup_t E|Y(t)|^2 <= 10 across delta in 2^-12..2^-6,
//    M=1e4, T=2, and no growth trend as delta -> 0 (slope >= -0.5).
void criterion5() {
    const int exponents[] = {12, 11, 10, 9, 8, 7, 6};
    const double ps[] = {1.0};
    const MomentTable table =
        moment_sweep(ModelConfig{}, Scheme::TruncatedMilstein, PolicyConfig{}, 2.0, ps,
                     exponents, 10000, kSeed, kWorkers);
    double worst = 0.0;
    for (const MomentRow& row : table.rows) worst = std::max(worst, row.sup_moment);
    const double trend = table.trends.at(0).slope;
    std::ostringstream os;
    os << "second-moment table max " << format_double(worst)
       << " (cap 10), trend slope vs delta " << format_double(trend) << " (floor -0.5)";
    report(5, worst <= 10.0 && trend >= -0.5, os.str());
}

// 6. Mid-step closeness: E|Y(t+delta/2) - Y_k|^2 shrinks by >= 1.7x per
//    halving of delta across 2^-10..2^-7, 1e4 paths.
void criterion6() {
    const int exponents[] = {10, 9, 8, 7}; // ascending delta
    const auto rows =
        midstep_second_moment(ModelConfig{}, PolicyConfig{}, 2.0, exponents, 10000, kSeed,
                              kWorkers);
    bool pass = true;
    std::ostringstream os;
    os << "mid-step closeness ratios per halving:";
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const double ratio = rows[i + 1].mean_square / rows[i].mean_square;
        os << ' ' << format_double(ratio);
        pass = pass && ratio >= 1.7;
    }
    os << " (floor 1.7)";
    report(6, pass, os.str());
}

// 7. Mechanical invariants: exact coarsening, exact interpolant endpoint,
//    worker-count-independent bytes, validator boundary behavior.
void criterion7() {
    std::ostringstream detail;
    bool pass = true;

    { // coarsening telescopes bitwise, in stages or in one go
        const PathGrid grid(2.0, 256);
        const BrownianPath p = sample_path(grid, 2, kSeed, 17);
        const BrownianPath one = coarsen(p, 8);
        const BrownianPath two = coarsen(coarsen(p, 2), 4);
        bool ok = one.total_displacement(0) == p.total_displacement(0);
        for (std::size_t i = 0; i < one.increments().size(); ++i)
            ok = ok && one.increments()[i] == two.increments()[i];
        pass = pass && ok;
        detail << "coarsening " << (ok ? "exact" : "INEXACT");
    }

    { // interpolant endpoint equals the one-step map bitwise
        const SdeSystem system = builtin_model("paper-example");
        const double dt = std::ldexp(1.0, -9);
        const TruncationContext ctx(power_policy(5.0, 0.1, 1.0), dt);
        bool ok = true;
        for (std::size_t i = 0; i < 5000; ++i) {
            const double y = 5.0 * (2.0 * uniform_draw(kSeed, static_cast<std::uint32_t>(i),
                                                       0, 2, 0x40u) -
                                    1.0);
            const double dB[] = {std::sqrt(dt) *
                                 normal_draw(kSeed, static_cast<std::uint32_t>(i), 1, 2,
                                             0x40u)};
            ok = ok && interpolate_within_step(system, ctx, {y}, dB, dt)[0] ==
                           truncated_milstein_step(system, ctx, {y}, dB, dt)[0];
        }
        pass = pass && ok;
        detail << ", endpoint " << (ok ? "exact" : "INEXACT");
    }

    { // identical configs give identical bytes at any worker count
        const fs::path base = fs::temp_directory_path() / "truncmil_acceptance7";
        fs::remove_all(base);
        RunConfig c;
        c.kind = "convergence";
        c.t_end = 2.0;
        c.reference_exponent = 10;
        c.coarse_exponents = {8, 7, 6};
        c.samples = 200;
        c.master_seed = kSeed;
        std::ostringstream log;
        c.out_dir = (base / "w1").string();
        c.workers = 1;
        run(c, log);
        c.out_dir = (base / "w3").string();
        c.workers = 3;
        run(c, log);
        const bool ok =
            slurp(base / "w1" / "errors.csv") == slurp(base / "w3" / "errors.csv") &&
            slurp(base / "w1" / "slopes.csv") == slurp(base / "w3" / "slopes.csv");
        fs::remove_all(base);
        pass = pass && ok;
        detail << ", worker-independent bytes " << (ok ? "yes" : "NO");
    }

    { // validator: epsilon = 0.3 rejected; epsilon = 0.1 with h(1)=mu(1) accepted
        bool rejected = false;
        try {
            validate_policy(power_policy(5.0, 0.3, 1.0));
        } catch (const PolicyRejected&) {
            rejected = true;
        }
        bool accepted = false;
        try {
            accepted = validate_policy(power_policy(5.0, 0.1, 1.0)).passed();
        } catch (const PolicyRejected&) {
        }
        pass = pass && rejected && accepted;
        detail << ", validator " << (rejected && accepted ? "correct" : "WRONG");
    }

    report(7, pass, detail.str());
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    std::printf("%d of 7 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
