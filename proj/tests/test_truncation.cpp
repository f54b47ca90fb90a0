#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "truncmil/rng.hpp"
#include "truncmil/truncation.hpp"

using namespace truncmil;

namespace {
// quintic example policy from the experiments: mu(u)=u^5, h(d)=d^-0.1
TruncationPolicy quintic_policy() { return power_policy(5.0, 0.1, 1.0); }
} // namespace

TEST_CASE("quintic policy validates; h(1)=mu(1) boundary counts as admissible") {
    const PolicyValidation rep = validate_policy(quintic_policy());
    CHECK(rep.passed());
    CHECK(rep.admissible_at_delta_star); // h(1) = 1 = mu(1), equality allowed
    CHECK(rep.worst_inverse_rel <= 1e-10);
}

TEST_CASE("epsilon beyond 1/4 is rejected with the offending delta") {
    try {
        validate_policy(power_policy(5.0, 0.3, 1.0));
        FAIL("expected PolicyRejected");
    } catch (const PolicyRejected& e) {
        CHECK_FALSE(e.report.step_bound_ok);
        CHECK(e.report.worst_step_bound > 1.0);
        CHECK(e.report.worst_step_bound_delta < 1.0);
        CHECK(std::string(e.what()).find("delta^{1/4} h(delta) <= 1") != std::string::npos);
    }
}

TEST_CASE("power family admissibility matches the epsilon <= 1/4 rule") {
    for (double eps : {0.01, 0.05, 0.1, 0.2, 0.25}) CHECK(validate_policy(power_policy(5.0, eps)).passed());
    for (double eps : {0.2500001, 0.26, 0.3, 0.5}) CHECK_THROWS_AS(validate_policy(power_policy(5.0, eps)), PolicyRejected);
}

TEST_CASE("policy with non-decreasing h is rejected") {
    TruncationPolicy p = quintic_policy();
    p.h = [](double) { return 2.0; };
    CHECK_THROWS_AS(validate_policy(p), PolicyRejected);
}

TEST_CASE("context caches barrier and bound consistently") {
    const double dt = std::ldexp(1.0, -10);
    const TruncationContext ctx(quintic_policy(), dt);
    CHECK(ctx.step() == dt);
    CHECK(ctx.bound() == doctest::Approx(std::pow(2.0, 1.0)).epsilon(1e-14)); // h = 2
    CHECK(ctx.barrier() == doctest::Approx(1.148698354997035).epsilon(1e-14)); // 2^0.2
    CHECK(std::fabs(ctx.policy().mu(ctx.barrier()) - ctx.bound()) <= 1e-10 * ctx.bound());

    CHECK_THROWS_AS(TruncationContext(quintic_policy(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(TruncationContext(quintic_policy(), 1.5), std::invalid_argument);
}

TEST_CASE("truncate_point: identity region, scaling, zero") {
    const TruncationContext ctx(quintic_policy(), std::ldexp(1.0, -10)); // barrier 2^0.2
    CHECK(truncate_point(ctx, {0.5})[0] == 0.5); // bitwise untouched
    CHECK(truncate_point(ctx, {2.0})[0] ==
          doctest::Approx(1.148698354997035).epsilon(1e-14));
    CHECK(truncate_point(ctx, {0.0})[0] == 0.0);
    CHECK(truncate_point(ctx, {-3.0})[0] ==
          doctest::Approx(-1.148698354997035).epsilon(1e-14));
}

TEST_CASE("truncate_point is an exact retraction") {
    const TruncationContext ctx(quintic_policy(), std::ldexp(1.0, -12));
    const double b = ctx.barrier();
    for (int i = 0; i < 2000; ++i) {
        StateVector x(3);
        for (std::size_t c = 0; c < 3; ++c)
            x[c] = 10.0 * (2.0 * uniform_draw(17, static_cast<std::uint32_t>(i),
                                              static_cast<std::uint32_t>(c), 0, 2) -
                           1.0);
        const StateVector once = truncate_point(ctx, x);
        const StateVector twice = truncate_point(ctx, once);
        for (std::size_t c = 0; c < 3; ++c) CHECK(once[c] == twice[c]); // bitwise
        CHECK(euclidean_norm(once) <= b + 1e-12);
        if (euclidean_norm(x) <= b)
            for (std::size_t c = 0; c < 3; ++c) CHECK(once[c] == x[c]);
    }
}

TEST_CASE("barrier grows as the step shrinks") {
    const TruncationPolicy pol = quintic_policy();
    double prev = 0.0;
    for (int e = 2; e <= 20; ++e) {
        const TruncationContext ctx(pol, std::ldexp(1.0, -e));
        CHECK(ctx.barrier() >= prev);
        prev = ctx.barrier();
    }
}

TEST_CASE("truncated coefficient maps at the quintic example") {
    const SdeSystem s = builtin_model("paper-example");
    const TruncationContext ctx(quintic_policy(), std::ldexp(1.0, -10));
    // barrier b = 2^0.2, b^5 = 2 exactly in the reals
    CHECK(truncated_drift(ctx, s, {2.0})[0] ==
          doctest::Approx(-0.85130164500296499).epsilon(1e-13)); // b - b^5
    CHECK(truncated_diffusion(ctx, s, {2.0}, 0)[0] ==
          doctest::Approx(1.3195079107728943).epsilon(1e-13)); // b^2
    CHECK(truncated_drift(ctx, s, {1.0})[0] == 0.0);           // inside the barrier
    CHECK(truncated_deriv(ctx, s, {2.0}, 0, 0)[0] ==
          doctest::Approx(2.0 * 1.148698354997035).epsilon(1e-13));
}

TEST_CASE("truncated coefficients respect the h(delta) bound where the envelope holds") {
    const SdeSystem s = builtin_model("paper-example");
    const TruncationPolicy pol = quintic_policy();
    // The u^5 envelope dominates |g'| = 2u only for u >= 2^(1/4), i.e. for
    // steps at most ~2^-12.5 under this policy; probe the compliant range.
    for (int e = 13; e <= 20; ++e) {
        const TruncationContext ctx(pol, std::ldexp(1.0, -e));
        const double cap = ctx.bound() * (1.0 + 1e-12);
        for (int i = 0; i < 3000; ++i) {
            const double x =
                6.0 * (2.0 * uniform_draw(23, static_cast<std::uint32_t>(i),
                                          static_cast<std::uint32_t>(e), 0, 3) -
                       1.0);
            CHECK(std::fabs(truncated_drift(ctx, s, {x})[0]) <= cap);
            CHECK(std::fabs(truncated_diffusion(ctx, s, {x}, 0)[0]) <= cap);
            CHECK(std::fabs(truncated_deriv(ctx, s, {x}, 0, 0)[0]) <= cap);
        }
    }
}

TEST_CASE("one-sided growth bound survives truncation (p=1, alpha1=1)") {
    // <x, f~(x)> + |g~(x)|^2 <= 2 (1 + |x|^2); x^4 - x^6 <= 4/27 < 1 makes
    // alpha1 = 1 valid for the untruncated pair already.
    const SdeSystem s = builtin_model("paper-example");
    const TruncationPolicy pol = quintic_policy();
    for (int e = 6; e <= 13; ++e) {
        const TruncationContext ctx(pol, std::ldexp(1.0, -e));
        for (int i = 0; i < 3000; ++i) {
            const double x =
                3.0 * (2.0 * uniform_draw(29, static_cast<std::uint32_t>(i),
                                          static_cast<std::uint32_t>(e), 0, 4) -
                       1.0);
            const double lhs = x * truncated_drift(ctx, s, {x})[0] +
                               std::pow(truncated_diffusion(ctx, s, {x}, 0)[0], 2);
            CHECK(lhs <= 2.0 * (1.0 + x * x));
        }
    }
}

TEST_CASE("mu envelope spot check") {
    const SdeSystem quintic = builtin_model("paper-example");
    const double radii[] = {2.0, 4.0, 8.0};
    const EnvelopeReport ok = check_mu_envelope(quintic, quintic_policy(), radii, 200, 31);
    CHECK(ok.holds);

    // mu(u) = u does not dominate |f| = |x - x^5| on radius-2 spheres
    const EnvelopeReport bad =
        check_mu_envelope(quintic, power_policy(1.0, 0.25, 1.0), radii, 200, 37);
    CHECK_FALSE(bad.holds);
    CHECK(bad.max_ratio > 1.0);
}

TEST_CASE("power_policy rejects bad parameters") {
    CHECK_THROWS_AS(power_policy(0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(power_policy(5.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(power_policy(5.0, 0.1, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(validate_policy(quintic_policy(), 1), std::invalid_argument);
}
