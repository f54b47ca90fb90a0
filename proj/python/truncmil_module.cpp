#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "truncmil/assumption_checks.hpp"
#include "truncmil/config.hpp"
#include "truncmil/csv.hpp"
#include "truncmil/experiments.hpp"
#include "truncmil/integrators.hpp"
#include "truncmil/rng.hpp"

namespace py = pybind11;
using namespace truncmil;

namespace {

py::array_t<double> matrix_copy(std::span<const double> data, std::size_t rows,
                                std::size_t cols) {
    py::array_t<double> out({rows, cols});
    std::copy(data.begin(), data.end(), out.mutable_data());
    return out;
}

Scheme as_scheme(const std::string& name) { return scheme_from_name(name); }

} // namespace

PYBIND11_MODULE(truncmil, m) {
    m.doc() = "Truncated Milstein SDE integration toolkit";
    m.attr("__version__") = kVersion;

    py::register_exception<PolicyRejected>(m, "PolicyRejected");

    py::class_<SdeSystem>(m, "SdeSystem")
        .def(py::init([](std::size_t state_dim, std::size_t noise_dim,
                         std::function<StateVector(const StateVector&)> drift,
                         std::function<StateVector(const StateVector&, std::size_t)> diffusion,
                         std::function<StateVector(const StateVector&, std::size_t,
                                                   std::size_t)>
                             diffusion_deriv,
                         StateVector initial_state, std::string label) {
                 SdeSystem s;
                 s.state_dim = state_dim;
                 s.noise_dim = noise_dim;
                 s.drift = std::move(drift);
                 s.diffusion_col = std::move(diffusion);
                 s.diffusion_deriv = std::move(diffusion_deriv);
                 s.initial_state = std::move(initial_state);
                 s.label = std::move(label);
                 return s;
             }),
             py::arg("state_dim"), py::arg("noise_dim"), py::arg("drift"),
             py::arg("diffusion"), py::arg("diffusion_deriv"), py::arg("initial_state"),
             py::arg("label") = "custom")
        .def_readonly("state_dim", &SdeSystem::state_dim)
        .def_readonly("noise_dim", &SdeSystem::noise_dim)
        .def_readonly("initial_state", &SdeSystem::initial_state)
        .def_readonly("label", &SdeSystem::label)
        .def("drift_at", [](const SdeSystem& s, const StateVector& x) { return s.drift(x); })
        .def("diffusion_at",
             [](const SdeSystem& s, const StateVector& x, std::size_t j) {
                 return s.diffusion_col(x, j);
             })
        .def("diffusion_deriv_at",
             [](const SdeSystem& s, const StateVector& x, std::size_t j, std::size_t l) {
                 return s.diffusion_deriv(x, j, l);
             });

    m.def("builtin_model", &builtin_model, py::arg("name"));
    m.def("builtin_model_names", &builtin_model_names);
    m.def("make_gbm", &make_gbm, py::arg("a"), py::arg("sigma"), py::arg("x0"));
    m.def("eval_L_operator", &eval_L_operator, py::arg("system"), py::arg("x"),
          py::arg("j1"), py::arg("j2"));

    py::class_<CommutativityResult>(m, "CommutativityResult")
        .def_readonly("commutative", &CommutativityResult::commutative)
        .def_readonly("worst_residual", &CommutativityResult::worst_residual);
    m.def("check_commutativity", &check_commutativity, py::arg("system"),
          py::arg("samples"), py::arg("seed"), py::arg("tol") = 1e-9,
          py::arg("box_halfwidth") = 3.0);

    py::class_<CandidateConstants>(m, "CandidateConstants")
        .def(py::init([](double k1, double k2, double r, double alpha3) {
                 return CandidateConstants{k1, k2, r, alpha3};
             }),
             py::arg("k1"), py::arg("k2"), py::arg("r"), py::arg("alpha3"))
        .def_readwrite("k1", &CandidateConstants::k1)
        .def_readwrite("k2", &CandidateConstants::k2)
        .def_readwrite("r", &CandidateConstants::r)
        .def_readwrite("alpha3", &CandidateConstants::alpha3);

    py::class_<AssumptionReport>(m, "AssumptionReport")
        .def_readonly("checked_pairs", &AssumptionReport::checked_pairs)
        .def_readonly("lipschitz_ratio", &AssumptionReport::lipschitz_ratio)
        .def_readonly("khasminskii_ratio", &AssumptionReport::khasminskii_ratio)
        .def_readonly("derivative_growth_ratio", &AssumptionReport::derivative_growth_ratio)
        .def_readonly("lipschitz_violated", &AssumptionReport::lipschitz_violated)
        .def_readonly("khasminskii_violated", &AssumptionReport::khasminskii_violated)
        .def_readonly("derivative_growth_violated",
                      &AssumptionReport::derivative_growth_violated)
        .def_readonly("sample_seed", &AssumptionReport::sample_seed);
    m.def("check_assumptions", &check_assumptions, py::arg("system"), py::arg("constants"),
          py::arg("p"), py::arg("samples"), py::arg("seed"), py::arg("box_halfwidth") = 3.0);

    py::class_<TruncationPolicy>(m, "TruncationPolicy")
        .def_readonly("delta_star", &TruncationPolicy::delta_star)
        .def_readonly("label", &TruncationPolicy::label)
        .def("mu", [](const TruncationPolicy& p, double u) { return p.mu(u); })
        .def("mu_inv", [](const TruncationPolicy& p, double v) { return p.mu_inv(v); })
        .def("h", [](const TruncationPolicy& p, double dt) { return p.h(dt); });
    m.def("power_policy", &power_policy, py::arg("a"), py::arg("epsilon"),
          py::arg("delta_star") = 1.0);

    py::class_<PolicyValidation>(m, "PolicyValidation")
        .def_readonly("admissible_at_delta_star", &PolicyValidation::admissible_at_delta_star)
        .def_readonly("step_bound_ok", &PolicyValidation::step_bound_ok)
        .def_readonly("inverse_consistent", &PolicyValidation::inverse_consistent)
        .def_readonly("mu_increasing", &PolicyValidation::mu_increasing)
        .def_readonly("h_decreasing", &PolicyValidation::h_decreasing)
        .def_readonly("worst_step_bound", &PolicyValidation::worst_step_bound)
        .def_readonly("worst_step_bound_delta", &PolicyValidation::worst_step_bound_delta)
        .def("passed", &PolicyValidation::passed)
        .def("summary", &PolicyValidation::summary);
    m.def("validate_policy", &validate_policy, py::arg("policy"),
          py::arg("grid_points") = 64);

    py::class_<TruncationContext>(m, "TruncationContext")
        .def(py::init<TruncationPolicy, double>(), py::arg("policy"), py::arg("step"))
        .def_property_readonly("step", &TruncationContext::step)
        .def_property_readonly("barrier", &TruncationContext::barrier)
        .def_property_readonly("bound", &TruncationContext::bound);
    m.def("truncate_point", &truncate_point, py::arg("ctx"), py::arg("x"));
    m.def("truncated_drift", &truncated_drift, py::arg("ctx"), py::arg("system"),
          py::arg("x"));
    m.def("truncated_diffusion", &truncated_diffusion, py::arg("ctx"), py::arg("system"),
          py::arg("x"), py::arg("j"));
    m.def("truncated_deriv", &truncated_deriv, py::arg("ctx"), py::arg("system"),
          py::arg("x"), py::arg("j"), py::arg("l"));

    py::class_<PathGrid>(m, "PathGrid")
        .def(py::init<double, std::size_t>(), py::arg("t_end"), py::arg("steps"))
        .def_readonly("t_end", &PathGrid::t_end)
        .def_readonly("steps", &PathGrid::steps)
        .def_property_readonly("step", &PathGrid::step);

    py::class_<BrownianPath>(m, "BrownianPath")
        .def_property_readonly("grid", &BrownianPath::grid)
        .def_property_readonly("noise_dim", &BrownianPath::noise_dim)
        .def("increments",
             [](const BrownianPath& p) {
                 return matrix_copy(p.increments(), p.grid().steps, p.noise_dim());
             })
        .def("total_displacement", &BrownianPath::total_displacement, py::arg("j") = 0);
    m.def("sample_path", &sample_path, py::arg("grid"), py::arg("noise_dim"),
          py::arg("master_seed"), py::arg("sample_index"));
    m.def("coarsen", &coarsen, py::arg("path"), py::arg("factor"));

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("scheme",
                               [](const Trajectory& t) {
                                   return std::string(scheme_name(t.scheme));
                               })
        .def_property_readonly("blow_up_index",
                               [](const Trajectory& t) { return t.blow_up_index; })
        .def_property_readonly("blown_up", &Trajectory::blown_up)
        .def("states",
             [](const Trajectory& t) { return matrix_copy(t.states, t.rows(), t.state_dim); })
        .def("terminal", [](const Trajectory& t) {
            return StateVector(t.terminal().begin(), t.terminal().end());
        });
    m.def(
        "simulate",
        [](const SdeSystem& system, const std::string& scheme, const PathGrid& grid,
           const BrownianPath& path, const TruncationContext* ctx) {
            return simulate(system, as_scheme(scheme), grid, path, ctx);
        },
        py::arg("system"), py::arg("scheme"), py::arg("grid"), py::arg("path"),
        py::arg("ctx") = nullptr);

    m.def(
        "truncated_milstein_step",
        [](const SdeSystem& s, const TruncationContext& ctx, const StateVector& y,
           const StateVector& dB, double dt) {
            return truncated_milstein_step(s, ctx, y, dB, dt);
        },
        py::arg("system"), py::arg("ctx"), py::arg("y"), py::arg("dB"), py::arg("dt"));
    m.def(
        "classical_milstein_step",
        [](const SdeSystem& s, const StateVector& y, const StateVector& dB, double dt) {
            return classical_milstein_step(s, y, dB, dt);
        },
        py::arg("system"), py::arg("y"), py::arg("dB"), py::arg("dt"));
    m.def(
        "interpolate_within_step",
        [](const SdeSystem& s, const TruncationContext& ctx, const StateVector& y,
           const StateVector& dB_partial, double s_minus_tk) {
            return interpolate_within_step(s, ctx, y, dB_partial, s_minus_tk);
        },
        py::arg("system"), py::arg("ctx"), py::arg("y_k"), py::arg("dB_partial"),
        py::arg("s_minus_tk"));

    py::class_<ModelConfig>(m, "ModelConfig")
        .def(py::init([](std::string name, double a, double sigma, double x0) {
                 return ModelConfig{std::move(name), a, sigma, x0};
             }),
             py::arg("name") = "paper-example", py::arg("a") = 0.05,
             py::arg("sigma") = 0.2, py::arg("x0") = 1.0)
        .def_readwrite("name", &ModelConfig::name)
        .def_readwrite("a", &ModelConfig::a)
        .def_readwrite("sigma", &ModelConfig::sigma)
        .def_readwrite("x0", &ModelConfig::x0);

    py::class_<PolicyConfig>(m, "PolicyConfig")
        .def(py::init([](std::string family, double a, double epsilon, double delta_star) {
                 return PolicyConfig{std::move(family), a, epsilon, delta_star};
             }),
             py::arg("family") = "power", py::arg("a") = 5.0, py::arg("epsilon") = 0.1,
             py::arg("delta_star") = 1.0)
        .def_readwrite("family", &PolicyConfig::family)
        .def_readwrite("a", &PolicyConfig::a)
        .def_readwrite("epsilon", &PolicyConfig::epsilon)
        .def_readwrite("delta_star", &PolicyConfig::delta_star);

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("model", &ExperimentSpec::model)
        .def_readwrite("policy", &ExperimentSpec::policy)
        .def_property(
            "schemes",
            [](const ExperimentSpec& s) {
                std::vector<std::string> names;
                for (Scheme sc : s.schemes) names.emplace_back(scheme_name(sc));
                return names;
            },
            [](ExperimentSpec& s, const std::vector<std::string>& names) {
                s.schemes.clear();
                for (const std::string& n : names) s.schemes.push_back(as_scheme(n));
            })
        .def_readwrite("t_end", &ExperimentSpec::t_end)
        .def_readwrite("reference_exponent", &ExperimentSpec::reference_exponent)
        .def_readwrite("coarse_exponents", &ExperimentSpec::coarse_exponents)
        .def_readwrite("samples", &ExperimentSpec::samples)
        .def_readwrite("master_seed", &ExperimentSpec::master_seed)
        .def_readwrite("error_power", &ExperimentSpec::error_power)
        .def_property(
            "reference",
            [](const ExperimentSpec& s) {
                return s.reference == ReferenceKind::ExactGbm ? "exact-gbm" : "simulated";
            },
            [](ExperimentSpec& s, const std::string& name) {
                if (name == "simulated") s.reference = ReferenceKind::Simulated;
                else if (name == "exact-gbm") s.reference = ReferenceKind::ExactGbm;
                else throw std::invalid_argument("reference must be simulated or exact-gbm");
            })
        .def_readwrite("theorem_q", &ExperimentSpec::theorem_q)
        .def_readwrite("workers", &ExperimentSpec::workers);

    py::class_<ErrorRow>(m, "ErrorRow")
        .def_property_readonly("scheme",
                               [](const ErrorRow& r) {
                                   return std::string(scheme_name(r.scheme));
                               })
        .def_readonly("delta", &ErrorRow::delta)
        .def_readonly("error", &ErrorRow::error)
        .def_readonly("std_error", &ErrorRow::std_error)
        .def_readonly("samples", &ErrorRow::samples)
        .def_readonly("excluded", &ErrorRow::excluded);

    py::class_<SlopeFit>(m, "SlopeFit")
        .def_property_readonly("scheme",
                               [](const SlopeFit& f) {
                                   return std::string(scheme_name(f.scheme));
                               })
        .def_readonly("slope", &SlopeFit::slope)
        .def_readonly("intercept", &SlopeFit::intercept)
        .def_readonly("half_width", &SlopeFit::half_width)
        .def_readonly("degenerate", &SlopeFit::degenerate)
        .def_readonly("points", &SlopeFit::points);

    py::class_<TheoremGuard>(m, "TheoremGuard")
        .def_readonly("checked", &TheoremGuard::checked)
        .def_readonly("satisfied", &TheoremGuard::satisfied)
        .def_readonly("q_min", &TheoremGuard::q_min)
        .def_readonly("message", &TheoremGuard::message);

    py::class_<ConvergenceReport>(m, "ConvergenceReport")
        .def_readonly("rows", &ConvergenceReport::rows)
        .def_readonly("fits", &ConvergenceReport::fits)
        .def_readonly("guard", &ConvergenceReport::guard)
        .def_readonly("master_seed", &ConvergenceReport::master_seed)
        .def_readonly("samples", &ConvergenceReport::samples)
        .def_readonly("degenerate", &ConvergenceReport::degenerate);
    m.def("strong_error", &strong_error, py::arg("spec"),
          py::call_guard<py::gil_scoped_release>());

    m.def("fit_order", [](const std::vector<std::pair<double, double>>& pts) {
        const FitResult fit = fit_order(pts);
        return py::make_tuple(fit.slope, fit.intercept, fit.half_width);
    });

    py::class_<MomentRow>(m, "MomentRow")
        .def_readonly("p", &MomentRow::p)
        .def_readonly("delta", &MomentRow::delta)
        .def_readonly("sup_moment", &MomentRow::sup_moment)
        .def_readonly("samples", &MomentRow::samples)
        .def_readonly("excluded", &MomentRow::excluded);
    py::class_<MomentTrend>(m, "MomentTrend")
        .def_readonly("p", &MomentTrend::p)
        .def_readonly("slope", &MomentTrend::slope)
        .def_readonly("intercept", &MomentTrend::intercept);
    py::class_<MomentTable>(m, "MomentTable")
        .def_readonly("rows", &MomentTable::rows)
        .def_readonly("trends", &MomentTable::trends);
    m.def(
        "moment_sweep",
        [](const ModelConfig& model, const std::string& scheme, const PolicyConfig& policy,
           double t_end, const std::vector<double>& p_list, const std::vector<int>& exps,
           std::size_t samples, std::uint64_t seed, std::size_t workers) {
            return moment_sweep(model, as_scheme(scheme), policy, t_end, p_list, exps,
                                samples, seed, workers);
        },
        py::arg("model"), py::arg("scheme"), py::arg("policy"), py::arg("t_end"),
        py::arg("p_list"), py::arg("delta_exponents"), py::arg("samples"), py::arg("seed"),
        py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());

    py::class_<MidstepRow>(m, "MidstepRow")
        .def_readonly("delta", &MidstepRow::delta)
        .def_readonly("mean_square", &MidstepRow::mean_square);
    m.def(
        "midstep_second_moment",
        [](const ModelConfig& model, const PolicyConfig& policy, double t_end,
           const std::vector<int>& exps, std::size_t samples, std::uint64_t seed,
           std::size_t workers) {
            return midstep_second_moment(model, policy, t_end, exps, samples, seed, workers);
        },
        py::arg("model"), py::arg("policy"), py::arg("t_end"), py::arg("delta_exponents"),
        py::arg("samples"), py::arg("seed"), py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>());

    m.def("normal_inverse_cdf", &normal_inverse_cdf, py::arg("p"));
}
