"""Linear operator rows, constructive inverse, nonlinear assembly."""

import numpy as np
import pytest

from dropsteady.operators import (
    DropState,
    YElement,
    apply_L,
    assemble_N,
    build_context,
    invert_L,
    norm_X,
    norm_Y,
)
from dropsteady.sphere import (
    SphereField,
    TangentField,
    integrate_sphere,
    normal_component_fields,
    sobolev_norm,
)
from dropsteady.stokes import PhysicalParams
from dropsteady.volume import (
    EXTERIOR,
    INTERIOR,
    VolumeField,
    VolumeGrid,
    integrate_phase,
)

L_TEST = 10


@pytest.fixture(scope="module")
def vg():
    return VolumeGrid.build(band_limit=L_TEST, n_r_int=18, n_r_ext=28, r_inf=64.0)


@pytest.fixture(scope="module")
def ctx(vg):
    return build_context(vg, PhysicalParams(mu1=1.0, mu2=1.0, rho_tilde=1e-3))


@pytest.fixture(scope="module")
def ctx0(vg):
    return build_context(vg, PhysicalParams(mu1=1.0, mu2=1.0, rho_tilde=0.0))


def random_sphere_field(g, seed, amp=1.0, damp=2.0, band=None):
    rng = np.random.default_rng(seed)
    L = g.band_limit if band is None else band
    c = np.zeros((L + 1, 2 * L + 1))
    for l in range(L + 1):
        w = amp * (1.0 + l * (l + 1.0)) ** (-damp)
        c[l, L - l : L + l + 1] = w * rng.standard_normal(2 * l + 1)
    return SphereField(g, coeffs=c, band=L)


def random_tangent_field(g, seed, amp=1.0, damp=2.0):
    rng = np.random.default_rng(seed)
    L = g.band_limit
    s = np.zeros((L + 1, 2 * L + 1))
    t = np.zeros((L + 1, 2 * L + 1))
    for l in range(1, L + 1):
        w = amp * (1.0 + l * (l + 1.0)) ** (-damp)
        s[l, L - l : L + l + 1] = w * rng.standard_normal(2 * l + 1)
        t[l, L - l : L + l + 1] = w * rng.standard_normal(2 * l + 1)
    return TangentField(g, spec=(s, t), band=L)


def random_volume_scalar(vg, seed, amp=1.0):
    """Smooth decaying scalar: interior polynomial, exterior O(1/r^2)."""
    rng = np.random.default_rng(seed)

    def fn(x, y, z):
        r2 = x * x + y * y + z * z
        a, b, c = rng.standard_normal(3)
        inner = a + b * z + c * (x * y + z * z)
        return amp * inner * np.where(r2 <= 1.0 + 1e-12, 1.0, 1.0 / r2**2)

    # sample per phase with the same coefficients
    rng = np.random.default_rng(seed)
    return VolumeField.from_function(vg, fn)


def random_volume_vector(vg, seed, amp=1.0):
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal((3, 4))

    def fn(x, y, z):
        r2 = x * x + y * y + z * z
        decay = np.where(r2 <= 1.0 + 1e-12, 1.0, 1.0 / r2**2)
        comps = [
            (coef[i, 0] + coef[i, 1] * x + coef[i, 2] * z + coef[i, 3] * x * y) * decay
            for i in range(3)
        ]
        return amp * np.stack(comps)

    return VolumeField.from_function(vg, fn, rank=1)


def random_state(vg, seed, amp=1.0) -> DropState:
    """Random state in the discrete solution class: in-basis radial
    profiles, no velocity jump, decay at infinity."""
    rng = np.random.default_rng(seed)
    g = vg.sphere
    L = g.band_limit
    Mi, Me = vg.interior.n, vg.exterior.n
    ri, se = vg.interior.r, vg.exterior.s

    def rand_modes(n_r, kmax, scale):
        out = np.zeros((n_r, L + 1, 2 * L + 1))
        for l in range(L + 1):
            damp = scale * (1.0 + l * (l + 1.0)) ** -2.0
            out[:, l, L - l : L + l + 1] = damp * rng.standard_normal((n_r, 2 * l + 1))
        return out

    def smooth_interior(kmax, parity_base):
        coef = rand_modes(kmax, L, amp)
        prof = np.zeros((Mi, L + 1, 2 * L + 1))
        for k in range(kmax):
            rho = 2.0 * ri**2 - 1.0
            Tk = np.cos(k * np.arccos(np.clip(rho, -1, 1)))
            prof += Tk[:, None, None] * coef[k] * 0.5**k
        for l in range(L + 1):
            par = (l + parity_base) % 2
            prof[:, l, :] *= ri[:, None] ** par
        return prof

    def smooth_exterior(kmax):
        coef = rand_modes(kmax, L, amp)
        prof = np.zeros((Me, L + 1, 2 * L + 1))
        for k in range(kmax):
            prof += (se**(k + 1))[:, None, None] * coef[k] * 0.5**k
        return prof

    from dropsteady.volume import vsh_assemble
    from dropsteady.sphere import synthesis_batch

    Pi, vi, wi = (smooth_interior(4, 1) for _ in range(3))
    pi = smooth_interior(4, 0)
    Pe, ve, we, pe = (smooth_exterior(4) for _ in range(4))
    # remove the velocity jump by shifting the exterior with a decaying shape
    shape = (se**2)[:, None, None] / 1.0
    for inner, outer in ((Pi, Pe), (vi, ve), (wi, we)):
        outer += (inner[vg.interior.i_surface] - outer[vg.exterior.i_surface])[None] * shape
    u = VolumeField(
        vg,
        vsh_assemble(vg, INTERIOR, Pi, vi, wi, L),
        vsh_assemble(vg, EXTERIOR, Pe, ve, we, L),
    )
    p = VolumeField(
        vg, synthesis_batch(g, pi, L), synthesis_batch(g, pe, L)
    )
    eta = random_sphere_field(g, seed + 9, amp=amp, damp=2.0)
    return DropState(u, p, float(rng.normal()) * amp, eta)


def random_Y(vg, ctx, seed, amp=1.0) -> YElement:
    """Random element of the attainable data space: the image under the
    operator of a random discrete state (plus that construction is what
    makes the 1e-7 round-trip tolerance meaningful at fixed resolution)."""
    return apply_L(random_state(vg, seed, amp), ctx)


# ---------------------------------------------------------------------------


def test_apply_zero(ctx):
    y = apply_L(DropState.zeros(ctx.grid), ctx)
    assert norm_Y(y)["total"] < 1e-12


def test_apply_kappa_only(ctx):
    st = DropState.zeros(ctx.grid)
    st.kappa = 1.0
    y = apply_L(st, ctx)
    assert abs(y.a1 - ctx.e3_drag) < 1e-12
    assert np.max(np.abs(y.h3.values + ctx.jumpU_n.values)) < 1e-12
    assert norm_Y(y)["f"] < 1e-12 and abs(y.a2) < 1e-14


def test_apply_eta_n3(ctx):
    _, _, n3 = normal_component_fields(ctx.grid.sphere)
    st = DropState.zeros(ctx.grid)
    st.eta = n3.copy()
    y = apply_L(st, ctx)
    # sigma (lap+2) n3 = 0 and the kernel term gives n3 / 3
    assert np.max(np.abs(y.h3.values - n3.values / 3.0)) < 1e-11
    assert abs(y.a2) < 1e-12


def test_invert_zero(ctx):
    st = invert_L(YElement.zeros(ctx.grid), ctx)
    assert norm_X(st, ctx.lambda0)["total"] < 1e-11


def test_invert_a1_only(ctx):
    y = YElement.zeros(ctx.grid)
    y.a1 = 0.7
    st = invert_L(y, ctx)
    assert abs(st.kappa - 0.7 / ctx.e3_drag) < 1e-10
    assert st.u.max_abs() < 1e-10
    # eta solves the kappa-stress term equation; row 7 must close
    back = apply_L(st, ctx)
    assert abs(back.a1 - 0.7) < 1e-9
    assert np.max(np.abs(back.h3.values)) < 1e-9


@pytest.mark.parametrize("lam0", [1e-3, 1e-2])
def test_round_trip_random(vg, lam0):
    params = PhysicalParams(mu1=1.0, mu2=1.0, rho_tilde=1e-3)
    ctx = build_context(vg, params)
    ctx.lambda0 = lam0
    errs = []
    a2_errs = []
    state_errs = []
    for seed in range(3):
        x0 = random_state(vg, 100 + 17 * seed)
        y = apply_L(x0, ctx)
        st = invert_L(y, ctx)
        back = apply_L(st, ctx)
        diff = back.combine(y, 1.0, -1.0)
        errs.append(norm_Y(diff)["total"] / norm_Y(y)["total"])
        a2_errs.append(abs(integrate_sphere(st.eta) - y.a2))
        # injectivity surrogate: the generating state is recovered
        dx = st.combine(x0, 1.0, -1.0)
        state_errs.append(
            norm_X(dx, lam0)["total"] / max(norm_X(x0, lam0)["total"], 1e-30)
        )
    assert max(errs) < 1e-7
    # row 6 reproduced without direct imposition
    assert max(a2_errs) < 1e-9
    assert max(state_errs) < 1e-6


def test_N_zero_state_zero_rho(ctx0):
    y = assemble_N(DropState.zeros(ctx0.grid), ctx0)
    assert norm_Y(y)["total"] < 1e-10


def test_N_zero_state_nonzero_rho(ctx):
    st = DropState.zeros(ctx.grid)
    y = assemble_N(st, ctx)
    g = ctx.grid.sphere
    rhat = g.unit_vectors()[0]
    lam0 = ctx.lambda0
    # N7 = lambda0 n.[[T(U,P)n]] - rho~ e3.n at the zero state
    expect = lam0 * ctx.jumpU_n.values - ctx.params.rho_tilde * rhat[2]
    assert np.max(np.abs(y.h3.values - expect)) < 1e-10
    assert abs(y.a2) < 1e-14  # N6 = 0
    assert np.max(np.abs(y.h1.values)) < 1e-12  # N3 = 0 at eta = 0
    # lambda0-scaled truncation terms are present in row 1
    assert norm_Y(y)["f"] > 0


def test_N_constant_eta_row6(ctx):
    c = 5e-3
    st = DropState.zeros(ctx.grid)
    st.eta = SphereField.constant(ctx.grid.sphere, c)
    y = assemble_N(st, ctx)
    expect = -4.0 * np.pi * (c**2 + c**3 / 3.0)
    assert abs(y.a2 - expect) < 1e-14


def test_N_compatibility_and_tangency(ctx):
    g = ctx.grid.sphere
    st = DropState.zeros(ctx.grid)
    st.u = random_volume_vector(ctx.grid, 7, amp=1e-3)
    st.p = random_volume_scalar(ctx.grid, 8, amp=1e-3)
    st.kappa = 1e-3
    st.eta = random_sphere_field(g, 9, amp=2e-3, damp=2.5)
    y = assemble_N(st, ctx)
    scale = max(norm_Y(y)["total"], 1e-30)
    assert abs(y.compatibility_defect()) < 1e-10 * max(1.0, scale)
    # N4 is tangential by construction of the returned TangentField; check
    # the discarded normal component was negligible
    from dropsteady.operators import _traction_jump_eta  # noqa: F401

    # equivariance-lite: N of the zero state is axisymmetric
    st0 = DropState.zeros(ctx.grid)
    y0 = assemble_N(st0, ctx)
    c3 = y0.h3.coeffs
    Lb = y0.h3.band
    m_leak = np.max(np.abs(np.delete(c3, Lb, axis=1)))
    assert m_leak < 1e-12


def test_N_lipschitz_fit(ctx):
    g = ctx.grid.sphere

    def mk(seed, amp):
        st = DropState.zeros(ctx.grid)
        st.u = random_volume_vector(ctx.grid, seed, amp=amp)
        st.p = random_volume_scalar(ctx.grid, seed + 1, amp=amp)
        st.kappa = amp * 0.3
        st.eta = random_sphere_field(g, seed + 2, amp=amp, damp=2.5)
        return st

    s1, s2 = mk(20, 2e-3), mk(30, 1e-3)
    y1, y2 = assemble_N(s1, ctx), assemble_N(s2, ctx)
    dy = norm_Y(y1.combine(y2, 1.0, -1.0))["total"]
    dx = norm_X(s1.combine(s2, 1.0, -1.0), ctx.lambda0)["total"]
    C = dy / dx
    assert np.isfinite(C) and C > 0


def test_rotation_equivariance_of_L_and_N(ctx):
    """Both operators commute with rotations about e3 (grid-aligned angle)."""
    vg = ctx.grid
    g = vg.sphere
    k = 3
    beta = 2 * np.pi * k / g.n_phi
    cb, sb = np.cos(beta), np.sin(beta)
    R = np.array([[cb, -sb, 0.0], [sb, cb, 0.0], [0.0, 0.0, 1.0]])

    def rot_scalar_vol(f):
        return VolumeField(vg, np.roll(f.blocks[0], -k, axis=-1), np.roll(f.blocks[1], -k, axis=-1))

    def rot_vector_vol(f):
        out = []
        for ph in (0, 1):
            rolled = np.roll(f.blocks[ph], -k, axis=-1)
            out.append(np.einsum("ji,jrab->irab", R, rolled))
        return VolumeField(vg, out[0], out[1])

    def rot_sphere(fvals):
        return np.roll(fvals, -k, axis=-1)

    st = DropState.zeros(vg)
    st.u = random_volume_vector(vg, 61, amp=1e-3)
    st.p = random_volume_scalar(vg, 62, amp=1e-3)
    st.kappa = 1e-3
    st.eta = random_sphere_field(g, 63, amp=2e-3, damp=2.5)

    from dropsteady.sphere import rotate_about_z

    st_rot = DropState.zeros(vg)
    st_rot.u = rot_vector_vol(st.u)
    st_rot.p = rot_scalar_vol(st.p)
    st_rot.kappa = st.kappa
    st_rot.eta = rotate_about_z(st.eta, beta)

    for op in (apply_L, assemble_N):
        y1 = op(st, ctx)
        y2 = op(st_rot, ctx)
        scale = max(norm_Y(y1)["total"], 1e-30)
        assert (y2.f - rot_vector_vol(y1.f)).max_abs() < 1e-10 * max(1.0, scale)
        assert (y2.g - rot_scalar_vol(y1.g)).max_abs() < 1e-10 * max(1.0, scale)
        assert np.max(np.abs(y2.h1.values - rot_sphere(y1.h1.values))) < 1e-10
        assert np.max(np.abs(y2.h3.values - rot_sphere(y1.h3.values))) < 1e-9
        t1, p1 = y1.h2.components
        t2, p2 = y2.h2.components
        assert np.max(np.abs(t2 - rot_sphere(t1))) < 1e-10
        assert np.max(np.abs(p2 - rot_sphere(p1))) < 1e-10
        assert abs(y2.a1 - y1.a1) < 1e-12 and abs(y2.a2 - y1.a2) < 1e-12


def test_norm_homogeneity(ctx):
    st = DropState.zeros(ctx.grid)
    st.u = random_volume_vector(ctx.grid, 50, amp=1.0)
    st.p = random_volume_scalar(ctx.grid, 51, amp=1.0)
    st.kappa = 0.3
    st.eta = random_sphere_field(ctx.grid.sphere, 52, amp=1e-3)
    n1 = norm_X(st, ctx.lambda0)["total"]
    n2 = norm_X(st.combine(DropState.zeros(ctx.grid), 2.0, 0.0), ctx.lambda0)["total"]
    assert abs(n2 - 2 * n1) < 1e-9 * n1
    # pure-eta state: only the height component contributes
    st_eta = DropState.zeros(ctx.grid)
    st_eta.eta = st.eta
    comps = norm_X(st_eta, ctx.lambda0)
    assert comps["total"] == pytest.approx(sobolev_norm(st.eta, 2.75))
