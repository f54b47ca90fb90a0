import math

import numpy as np
import pytest

import truncmil as tm


def test_builtin_models():
    names = tm.builtin_model_names()
    assert "paper-example" in names and "gbm" in names
    model = tm.builtin_model("paper-example")
    assert model.state_dim == 1
    assert model.drift_at([1.0]) == [0.0]
    assert model.diffusion_at([2.0], 0) == [4.0]
    with pytest.raises(ValueError):
        tm.builtin_model("nope")


def test_L_operator_closed_form():
    model = tm.builtin_model("paper-example")
    for x in (-1.5, -0.3, 0.7, 2.0):
        got = tm.eval_L_operator(model, [x], 0, 0)[0]
        assert got == pytest.approx(2.0 * x**3, rel=1e-12)


def test_policy_and_truncation():
    pol = tm.power_policy(a=5.0, epsilon=0.1)
    assert tm.validate_policy(pol).passed()
    ctx = tm.TruncationContext(pol, step=2.0**-10)
    assert ctx.barrier == pytest.approx(2.0**0.2, rel=1e-14)
    assert tm.truncate_point(ctx, [0.5]) == [0.5]
    assert tm.truncate_point(ctx, [2.0])[0] == pytest.approx(2.0**0.2, rel=1e-13)
    with pytest.raises(tm.PolicyRejected):
        tm.validate_policy(tm.power_policy(a=5.0, epsilon=0.3))


def test_path_sampling_and_coarsening():
    grid = tm.PathGrid(t_end=1.0, steps=8)
    path = tm.sample_path(grid, noise_dim=1, master_seed=42, sample_index=0)
    inc = path.increments()
    assert inc.shape == (8, 1)
    again = tm.sample_path(grid, noise_dim=1, master_seed=42, sample_index=0)
    assert np.array_equal(inc, again.increments())
    coarse = tm.coarsen(path, 2)
    assert coarse.increments()[0, 0] == inc[0, 0] + inc[1, 0]
    assert coarse.total_displacement(0) == path.total_displacement(0)


def test_simulate_gbm_tracks_exact_solution():
    a, sigma = 0.05, 0.2
    model = tm.builtin_model("gbm")
    grid = tm.PathGrid(t_end=1.0, steps=2**10)
    path = tm.sample_path(grid, noise_dim=1, master_seed=7, sample_index=3)
    traj = tm.simulate(model, "classical-milstein", grid, path)
    assert not traj.blown_up
    exact = math.exp((a - sigma**2 / 2) * 1.0 + sigma * path.total_displacement(0))
    assert traj.terminal()[0] == pytest.approx(exact, abs=5e-3)


def test_step_and_interpolant_consistency():
    model = tm.builtin_model("paper-example")
    ctx = tm.TruncationContext(tm.power_policy(5.0, 0.1), step=0.25)
    step = tm.truncated_milstein_step(model, ctx, [1.0], [0.5], 0.25)
    assert step[0] == pytest.approx(1.5, rel=1e-15)
    interp = tm.interpolate_within_step(model, ctx, [1.0], [0.5], 0.25)
    assert interp[0] == step[0]


def test_custom_python_model():
    model = tm.SdeSystem(
        state_dim=1,
        noise_dim=1,
        drift=lambda x: [0.0],
        diffusion=lambda x, j: [1.0],
        diffusion_deriv=lambda x, j, l: [0.0],
        initial_state=[0.0],
        label="additive",
    )
    grid = tm.PathGrid(t_end=1.0, steps=4)
    path = tm.sample_path(grid, noise_dim=1, master_seed=5, sample_index=0)
    traj = tm.simulate(model, "euler-maruyama", grid, path)
    assert traj.terminal()[0] == pytest.approx(path.total_displacement(0), rel=1e-12)


def test_fit_order_exact_line():
    pts = [(2.0**-e, 3.0 * 2.0**-e) for e in range(4, 9)]
    slope, intercept, half_width = tm.fit_order(pts)
    assert slope == pytest.approx(1.0, abs=1e-12)
    assert half_width == pytest.approx(0.0, abs=1e-9)


def test_strong_error_report():
    spec = tm.ExperimentSpec()
    spec.model = tm.ModelConfig(name="gbm")
    spec.policy = tm.PolicyConfig(family="power", a=1.0, epsilon=0.25)
    spec.schemes = ["classical-milstein"]
    spec.t_end = 1.0
    spec.reference = "exact-gbm"
    spec.coarse_exponents = [8, 7, 6]
    spec.samples = 400
    spec.master_seed = 20170829
    spec.workers = 2
    report = tm.strong_error(spec)
    assert len(report.rows) == 3
    assert all(r.error > 0 for r in report.rows)
    fit = report.fits[0]
    assert not fit.degenerate
    assert 0.7 < fit.slope < 1.3


def test_moment_sweep_frozen_model():
    table = tm.moment_sweep(
        tm.ModelConfig(name="gbm", a=0.0, sigma=0.0, x0=1.0),
        "truncated-milstein",
        tm.PolicyConfig(family="power", a=1.0, epsilon=0.25),
        t_end=1.0,
        p_list=[1.0],
        delta_exponents=[5],
        samples=120,
        seed=3,
    )
    assert table.rows[0].sup_moment == 1.0


def test_commutativity_and_assumptions():
    model = tm.builtin_model("linear-2d-diagonal")
    res = tm.check_commutativity(model, samples=100, seed=1)
    assert res.commutative and res.worst_residual == 0.0

    quintic = tm.builtin_model("paper-example")
    rep = tm.check_assumptions(
        quintic, tm.CandidateConstants(k1=5.0, k2=20.0, r=4.0, alpha3=20.0),
        p=1.0, samples=2000, seed=2,
    )
    assert not rep.khasminskii_violated
    assert not rep.lipschitz_violated
