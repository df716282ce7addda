"""Fixed-point driver: trivial solution, convergence, symmetry, diagnostics."""

import dataclasses

import numpy as np
import pytest

from dropsteady.driver import (
    SolveConfig,
    diagnostics,
    mirror_defect,
    picard_solve,
    reconstruct_physical,
)
from dropsteady.operators import DropState, apply_L, assemble_N, invert_L_with_tail, norm_X, norm_Y
from dropsteady.sphere import SphereField, project_kernel, sobolev_norm


CFG = SolveConfig(rho_tilde=1e-3, band_limit=12, n_r_int=20, n_r_ext=32, r_inf=64.0)


@pytest.fixture(scope="module")
def solved():
    return picard_solve(CFG)


@pytest.fixture(scope="module")
def solved_mirror():
    return picard_solve(dataclasses.replace(CFG, rho_tilde=-CFG.rho_tilde))


def test_config_validation():
    with pytest.raises(ValueError):
        SolveConfig(alpha=0.5)
    with pytest.raises(ValueError):
        SolveConfig(q=1.5)
    with pytest.raises(ValueError):
        SolveConfig(r=2.0)


def test_trivial_solution_zero_density_contrast():
    cfg = dataclasses.replace(CFG, rho_tilde=0.0)
    b = picard_solve(cfg)
    assert b.converged
    assert len(b.history) == 0  # no iterations needed
    assert b.lam == 0.0
    assert norm_X(b.state, 0.0)["total"] == 0.0
    rep = diagnostics(b)
    assert rep["volume_defect"] == 0.0
    assert rep["force_e3_defect_rel"] == 0.0


def test_convergence_and_ball(solved):
    b = solved
    assert b.converged
    ratios = b.report["contraction_ratios"]
    assert ratios and all(r < 1 for r in ratios)
    assert b.report["ball_norm"] <= b.report["ball_radius"]
    assert b.report["fixed_point_residual"] < 1e-8
    assert b.report["lambda_nonzero"]


def test_first_iterate_structure():
    """One hand iteration from zero: the leading deformation is degree-1."""
    import dropsteady.operators as op

    ctx = op.build_context(CFG.build_grid(), CFG.params(), alpha=CFG.alpha)
    x0 = DropState.zeros(ctx.grid)
    y0 = assemble_N(x0, ctx)
    x1 = invert_L_with_tail(y0, ctx.lambda0, ctx)
    eta1 = x1.eta
    par = project_kernel(eta1)
    total = sobolev_norm(eta1, 2.75)
    if total > 0:
        assert sobolev_norm(par, 2.75) <= total + 1e-15
    # the response scales linearly with rho_tilde at leading order
    params2 = dataclasses.replace(CFG, rho_tilde=CFG.rho_tilde / 2).params()
    ctx2 = op.build_context(ctx.grid, params2, alpha=CFG.alpha, R=ctx.trunc.R)
    y02 = assemble_N(DropState.zeros(ctx.grid), ctx2)
    x12 = invert_L_with_tail(y02, ctx2.lambda0, ctx2)
    # compare with a common weight so the scaling is meaningful
    r = norm_X(x12, ctx.lambda0)["total"] / norm_X(x1, ctx.lambda0)["total"]
    assert abs(r - 0.5) < 0.02


def test_contraction_improves_with_smaller_rho():
    b1 = picard_solve(CFG)
    b2 = picard_solve(dataclasses.replace(CFG, rho_tilde=CFG.rho_tilde / 2))
    r1 = b1.report["contraction_ratios"][0]
    r2 = b2.report["contraction_ratios"][0]
    assert r2 < r1


def test_uniqueness_in_ball(solved):
    """A different admissible initial guess lands on the same fixed point."""
    b = solved
    ctx = b.ctx
    guess = DropState.zeros(ctx.grid)
    guess.eta = 1e-4 * SphereField.constant(ctx.grid.sphere, 1.0)
    guess.kappa = 1e-5
    b2 = picard_solve(CFG, ctx=ctx, initial=guess)
    diff = b2.state.combine(b.state, 1.0, -1.0)
    assert norm_X(diff, b.lambda0)["total"] < 10 * CFG.tol_fixed_point


def test_reconstruction_residual(solved):
    phys = reconstruct_physical(solved)
    assert phys["midshell_residual"] < 1e-6
    assert phys["lam"] == solved.lam
    # at the fixed point the physical field on the sphere satisfies the
    # kinematic condition w.n = -lam e3.n
    w = phys["w"]
    g = solved.ctx.grid.sphere
    rhat = g.unit_vectors()[0]
    wn = np.einsum("iab,iab->ab", w.trace(0), rhat)
    assert np.max(np.abs(wn + solved.lam * rhat[2])) < 1e-9


def test_diagnostics_report(solved):
    rep = diagnostics(solved)
    assert abs(rep["volume_defect"]) < 1e-8
    assert rep["force_e3_defect_rel"] < 1e-6
    assert rep["force_transverse_max"] < 1e-9
    assert rep["axisym_leakage"] < 1e-9
    assert rep["wake_rel_error"] < 0.10
    assert rep["wake_remainder_slope"] < -1.0
    assert np.max(np.abs(rep["barycenter"])) < 1e-9


def test_mirror_symmetry(solved, solved_mirror):
    d = mirror_defect(solved, solved_mirror)
    assert d["eta"] < 1e-8
    assert d["lambda"] < 1e-8
    assert d["velocity"] < 1e-8


def test_fixed_point_residual_direct(solved):
    """Direct substitution into the operator equation."""
    b = solved
    res = apply_L(b.state, b.ctx).combine(assemble_N(b.state, b.ctx), 1.0, -1.0)
    assert norm_Y(res)["total"] < 1e-8


def test_probe_epsilon_smoke():
    from dropsteady.driver import probe_epsilon

    cfg = SolveConfig(rho_tilde=1e-3, band_limit=8, n_r_int=14, n_r_ext=22, r_inf=64.0)
    eps = probe_epsilon(cfg, lo=1e-3, hi=4e-3, steps=1)
    assert eps >= 1e-3
