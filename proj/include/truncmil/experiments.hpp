#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "truncmil/integrators.hpp"
#include "truncmil/sde_system.hpp"
#include "truncmil/truncation.hpp"

namespace truncmil {

/// Registry name plus the parameters the parametric models accept.
/// "paper-example" ignores the parameters (the benchmark is fixed).
struct ModelConfig {
    std::string name = "paper-example";
    double a = 0.05;
    double sigma = 0.2;
    double x0 = 1.0;
};

SdeSystem make_model(const ModelConfig& cfg);

/// Policy family plus parameters; only the power family is built in.
struct PolicyConfig {
    std::string family = "power";
    double a = 5.0;
    double epsilon = 0.1;
    double delta_star = 1.0;
};

TruncationPolicy make_policy(const PolicyConfig& cfg);

/// Step count for step size 2^-exponent on [0, t_end]; t_end * 2^exponent
/// must be a positive integer (so the mesh closes exactly at t_end).
std::size_t steps_for_exponent(double t_end, int exponent);

enum class ReferenceKind {
    Simulated, // truncated Milstein at the reference grid
    ExactGbm,  // closed form x0 exp((a - sigma^2/2) T + sigma B(T)); gbm only
};

struct ExperimentSpec {
    ModelConfig model;
    PolicyConfig policy;
    std::vector<Scheme> schemes{Scheme::TruncatedMilstein};
    double t_end = 2.0;
    int reference_exponent = 13;
    std::vector<int> coarse_exponents{10, 9, 8, 7};
    std::size_t samples = 1000;
    std::uint64_t master_seed = 20170829;
    /// Exponent 2p of the error moment; 1 gives the plain L^1 error.
    double error_power = 1.0;
    ReferenceKind reference = ReferenceKind::Simulated;
    /// Optional q for the rate-condition check of the power family.
    std::optional<double> theorem_q;
    std::size_t workers = 1;
};

struct ErrorRow {
    Scheme scheme;
    double delta = 0.0;
    double error = 0.0;     // (mean |x_ref(T) - Y_N|^{2p})^{1/(2p)}
    double std_error = 0.0; // delta-method standard error of `error`
    std::size_t samples = 0;
    std::size_t excluded = 0; // blown-up samples, dropped from the mean
};

struct SlopeFit {
    Scheme scheme;
    double slope = 0.0;
    double intercept = 0.0;
    double half_width = 0.0; // 95% confidence half-width of the slope
    bool degenerate = false; // zero errors or too few usable points
    std::size_t points = 0;
};

struct TheoremGuard {
    bool checked = false;   // an explicit q was supplied and tested
    bool satisfied = false;
    double q_min = 0.0;     // smallest q making the rate condition hold
    std::string message;
};

struct ConvergenceReport {
    std::vector<ErrorRow> rows; // one per (scheme, delta), spec order
    std::vector<SlopeFit> fits; // one per scheme
    TheoremGuard guard;
    std::uint64_t master_seed = 0;
    std::size_t samples = 0;
    bool degenerate = false; // any fit degenerate
};

/// Couples every scheme/step-size combination to one Brownian path per
/// sample: the path is generated at the finest level and coarsened by exact
/// increment sums. Deterministic in (spec, master_seed); the worker count
/// changes nothing but wall time.
///
/// Throws std::runtime_error if the reference solver blows up (it should
/// never, for truncated schemes); blow-ups of a scheme under test are
/// excluded per sample and counted in the report.
ConvergenceReport strong_error(const ExperimentSpec& spec);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double half_width = 0.0;
};

/// Ordinary least squares of log2(error) on log2(delta). Needs at least
/// three points with positive errors; throws std::invalid_argument otherwise.
FitResult fit_order(std::span<const std::pair<double, double>> delta_error_points);

struct MomentRow {
    double p = 1.0;
    double delta = 0.0;
    double sup_moment = 0.0; // max over grid times of mean |Y(t_k)|^{2p}
    std::size_t samples = 0;
    std::size_t excluded = 0;
};

struct MomentTrend {
    double p = 1.0;
    double slope = 0.0; // OLS slope of sup_moment against delta
    double intercept = 0.0;
};

struct MomentTable {
    std::vector<MomentRow> rows;
    std::vector<MomentTrend> trends;
};

MomentTable moment_sweep(const ModelConfig& model, Scheme scheme, const PolicyConfig& policy,
                         double t_end, std::span<const double> p_list,
                         std::span<const int> delta_exponents, std::size_t samples,
                         std::uint64_t master_seed, std::size_t workers = 1);

struct MidstepRow {
    double delta = 0.0;
    double mean_square = 0.0; // E |Y(t_k + delta/2) - Y_k|^2 at t_k = t_end/2
};

/// Mid-step closeness of the continuous scheme to its grid skeleton,
/// estimated with an independent half-step partial increment per sample.
std::vector<MidstepRow> midstep_second_moment(const ModelConfig& model,
                                              const PolicyConfig& policy, double t_end,
                                              std::span<const int> delta_exponents,
                                              std::size_t samples, std::uint64_t master_seed,
                                              std::size_t workers = 1);

} // namespace truncmil
