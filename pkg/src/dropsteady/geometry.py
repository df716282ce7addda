"""Interface geometry: height function, coordinate map and curvature.

The interface is the graph {(1 + eta(zeta)) zeta : zeta on S^2}.  A
harmonic extension of eta (ball + annulus with outer Dirichlet zero),
cut off between radii 2 and 3, defines the displacement field E and the
map Phi(x) = x + E(x).  All pullback tensors (F, J, A = J F^{-1},
F^{-1}) are evaluated pointwise from analytic radial profiles, so no
spectral differentiation of the cutoff is involved.

Curvature of the deformed interface splits as
``(H + 2) o Phi = lap_S eta + 2 eta - G(eta)`` with G collecting every
term beyond linear order; H(unit sphere) = -2 in this sign convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sphere import (
    SphereField,
    TangentField,
    laplace_beltrami,
    sobolev_norm,
    surface_gradient,
    integrate_sphere,
)
from .volume import (
    EXTERIOR,
    INTERIOR,
    VolumeField,
    VolumeGrid,
    grid_points,
    synthesis_batch,
    tangent_synthesis_batch,
)

__all__ = [
    "HeightFunction",
    "MapData",
    "smoothstep",
    "cutoff_ext",
    "cutoff_unit",
    "harmonic_extension_profiles",
    "harmonic_extension",
    "build_map",
    "transformed_stress",
    "transformed_normal_projection",
    "curvature_linear",
    "curvature_nonlinear",
    "curvature_total",
]

ADMISSIBLE_NORM = 0.1  # surrogate-norm threshold keeping det(F) > 1/2
ETA_SOBOLEV_ORDER = 2.75  # 3 - 1/r at the nominal r = 4


class HeightFunction:
    """Interface displacement with cached surrogate norm and admissibility."""

    def __init__(self, eta: SphereField, check: bool = True):
        self.eta = eta
        self.norm_bound = sobolev_norm(eta, ETA_SOBOLEV_ORDER)
        if check:
            if self.norm_bound >= ADMISSIBLE_NORM:
                raise ValueError(
                    f"height function norm {self.norm_bound:.3e} exceeds "
                    f"admissibility threshold {ADMISSIBLE_NORM}"
                )
            if np.min(1.0 + eta.values) <= 0.0:
                raise ValueError("1 + eta must be positive")

    @property
    def grid(self):
        return self.eta.grid


def smoothstep(t: np.ndarray) -> np.ndarray:
    """Quintic C^2 smoothstep: 0 at t<=0, 1 at t>=1."""
    t = np.clip(t, 0.0, 1.0)
    return t**3 * (10.0 - 15.0 * t + 6.0 * t * t)


def smoothstep_d1(t: np.ndarray) -> np.ndarray:
    tt = np.clip(t, 0.0, 1.0)
    out = 30.0 * tt**2 * (tt - 1.0) ** 2
    return np.where((t > 0) & (t < 1), out, 0.0)


def smoothstep_d2(t: np.ndarray) -> np.ndarray:
    tt = np.clip(t, 0.0, 1.0)
    out = 60.0 * tt * (2.0 * tt - 1.0) * (tt - 1.0)
    return np.where((t > 0) & (t < 1), out, 0.0)


def cutoff_ext(r):
    """Extension cutoff: 1 for r <= 2, 0 for r >= 3 (quintic transition)."""
    return 1.0 - smoothstep(np.asarray(r, float) - 2.0)


def cutoff_ext_d1(r):
    return -smoothstep_d1(np.asarray(r, float) - 2.0)


def cutoff_unit(t):
    """Truncation cutoff: 1 for t <= 1, 0 for t >= 2."""
    return 1.0 - smoothstep(np.asarray(t, float) - 1.0)


def cutoff_unit_d1(t):
    return -smoothstep_d1(np.asarray(t, float) - 1.0)


def cutoff_unit_d2(t):
    return -smoothstep_d2(np.asarray(t, float) - 1.0)


# ---------------------------------------------------------------------------
# harmonic extension of the height function
# ---------------------------------------------------------------------------


def harmonic_extension_profiles(eta: SphereField):
    """Per-degree radial solutions of the two Dirichlet problems.

    Interior ball: a_l r^l with a_l = eta_lm.  Annulus 1 < r < 4:
    alpha_l r^l + beta_l r^{-l-1} with trace eta at r = 1 and zero at
    r = 4.  Returns (coeffs, alpha, beta) with alpha/beta the per-degree
    scalars multiplying the coefficient array.
    """
    L = eta.band
    l = np.arange(L + 1, dtype=float)
    damp = 4.0 ** (-(2.0 * l + 1.0))
    beta = 1.0 / (1.0 - damp)
    alpha = 1.0 - beta  # alpha + beta = 1, alpha 4^l + beta 4^{-l-1} = 0
    return eta.coeffs, alpha, beta


def _extension_scalar_at(eta: SphereField, r: np.ndarray, phase: int):
    """H, dH/dr and the tangential gradient of H at radii r of one phase.

    Returns nodal arrays H (n_r, nth, nph), dHdr, and (tth, tph) of
    grad_S H per shell (without the 1/r factor).  The phase selects the
    branch at r = 1, where dH/dr jumps.  Radii beyond the annulus edge
    r = 4 get zeros (the annulus problem ends there and the extension
    cutoff already vanishes for r >= 3).
    """
    g = eta.grid
    L = eta.band
    C, alpha, beta = harmonic_extension_profiles(eta)
    r = np.asarray(r, float)
    l = np.arange(L + 1, dtype=float)
    rl = r[:, None] ** l[None, :]
    if phase == INTERIOR:
        prof = rl
        dprof = l[None, :] * r[:, None] ** np.maximum(l[None, :] - 1.0, 0.0) * (l > 0)
    else:
        rml = r[:, None] ** -(l[None, :] + 1.0)
        prof = alpha[None, :] * rl + beta[None, :] * rml
        dprof = (
            alpha * l * r[:, None] ** np.maximum(l - 1.0, 0.0) * (l > 0)
            - beta * (l + 1.0) * r[:, None] ** -(l + 2.0)
        )
        mask = (r <= 4.0 + 1e-12)[:, None]
        prof = np.where(mask, prof, 0.0)
        dprof = np.where(mask, dprof, 0.0)
    modes = prof[:, :, None] * C[None, :, :]
    dmodes = dprof[:, :, None] * C[None, :, :]
    H = synthesis_batch(g, modes, L)
    dHdr = synthesis_batch(g, dmodes, L)
    tth, tph = tangent_synthesis_batch(g, modes, np.zeros_like(modes), L)
    return H, dHdr, tth, tph


def harmonic_extension(eta_h: HeightFunction, grid: VolumeGrid) -> VolumeField:
    """The scalar harmonic extension H_eta sampled on the volume grid."""
    eta = eta_h.eta
    out = VolumeField.zeros(grid, rank=0)
    for ph in (INTERIOR, EXTERIOR):
        H, _, _, _ = _extension_scalar_at(eta, grid.radial(ph).r, ph)
        out.blocks[ph] = H
    return out


@dataclass
class MapData:
    """Pullback tensors of Phi(x) = x + E(x) and interface quantities."""

    eta: HeightFunction
    grid: VolumeGrid
    E: VolumeField  # rank 1
    jacE: VolumeField  # rank 2, (i, j) = d_j E_i
    F: VolumeField  # rank 2
    J: VolumeField  # rank 0
    A: VolumeField  # rank 2, A = J F^{-1} (so A^T n is the Nanson vector)
    F_inv: VolumeField  # rank 2
    # single-valued interface fields (n_theta, n_phi)-shaped
    Ntil: np.ndarray  # A^T n on S^2
    Ntil_norm: np.ndarray
    n_gamma: np.ndarray  # unit normal of the deformed interface (pulled back)
    P_eta: np.ndarray  # tangential projector of the deformed interface
    A_surf: np.ndarray  # drop-side trace of A
    J_surf: np.ndarray  # drop-side trace of J


def build_map(eta_h: HeightFunction, grid: VolumeGrid) -> MapData:
    """Assemble E, F, J, A, F^{-1} and interface quantities for eta."""
    eta = eta_h.eta
    g = grid.sphere
    E = VolumeField.zeros(grid, rank=1)
    jacE = VolumeField.zeros(grid, rank=2)
    rhat, that, phat = g.unit_vectors()
    for ph in (INTERIOR, EXTERIOR):
        rad = grid.radial(ph)
        r = rad.r
        H, dHdr, tth, tph = _extension_scalar_at(eta, r, ph)
        chi = cutoff_ext(r)[:, None, None]
        dchi = cutoff_ext_d1(r)[:, None, None]
        x = np.stack(grid_points(grid, ph))  # (3, n_r, nth, nph)
        rinv = 1.0 / r[:, None, None]
        gradH = (
            dHdr[None] * rhat[:, None]
            + rinv[None] * (tth[None] * that[:, None] + tph[None] * phat[:, None])
        )
        E.blocks[ph] = chi[None] * H[None] * x
        # d_j (chi H x_i) = chi' rhat_j H x_i + chi (d_j H) x_i + chi H d_ij
        jac = (
            (dchi * H)[None, None] * np.einsum("irab,jrab->ijrab", x, rhat[:, None] * np.ones_like(H)[None])
            + chi[None, None] * np.einsum("irab,jrab->ijrab", x, gradH)
        )
        diag = chi[None, None] * H[None, None] * np.eye(3)[:, :, None, None, None]
        jacE.blocks[ph] = jac + diag

    F = VolumeField.zeros(grid, rank=2)
    J = VolumeField.zeros(grid, rank=0)
    A = VolumeField.zeros(grid, rank=2)
    F_inv = VolumeField.zeros(grid, rank=2)
    eye = np.eye(3)
    for ph in (INTERIOR, EXTERIOR):
        Fb = jacE.blocks[ph] + eye[:, :, None, None, None]
        Fm = np.moveaxis(Fb, (0, 1), (-2, -1))
        Jb = np.linalg.det(Fm)
        if np.min(Jb) <= 0.5:
            raise ValueError(
                f"inadmissible height function: min det(F) = {np.min(Jb):.4f} <= 1/2"
            )
        Fi = np.linalg.inv(Fm)
        Ab = Jb[..., None, None] * Fi
        F.blocks[ph] = Fb
        J.blocks[ph] = Jb
        A.blocks[ph] = np.moveaxis(Ab, (-2, -1), (0, 1))
        F_inv.blocks[ph] = np.moveaxis(Fi, (-2, -1), (0, 1))

    A_surf = A.trace(INTERIOR)
    J_surf = J.trace(INTERIOR)
    n = rhat
    Ntil = np.einsum("jiab,jab->iab", A_surf, n)
    Ntil_norm = np.sqrt(np.einsum("iab,iab->ab", Ntil, Ntil))
    n_gamma = Ntil / Ntil_norm[None]
    P_eta = np.eye(3)[:, :, None, None] - np.einsum(
        "iab,jab->ijab", Ntil, Ntil
    ) / (Ntil_norm**2)[None, None]
    return MapData(
        eta_h, grid, E, jacE, F, J, A, F_inv, Ntil, Ntil_norm, n_gamma, P_eta, A_surf, J_surf
    )


def identity_map(grid: VolumeGrid) -> MapData:
    zero = SphereField.zeros(grid.sphere)
    return build_map(HeightFunction(zero), grid)


def transformed_stress(
    jac_w: VolumeField, q: VolumeField, mp: MapData, mu1: float, mu2: float
) -> VolumeField:
    """T^eta(w, q) = [mu (grad w F^{-1} + F^{-T} grad w^T) - q I] A^T.

    ``jac_w`` is the Jacobian field (d_j w_i); at eta = 0 this reduces to
    the Cauchy stress 2 mu S(w) - q I.
    """
    out = VolumeField.zeros(mp.grid, rank=2)
    eye = np.eye(3)
    for ph, mu in ((INTERIOR, mu1), (EXTERIOR, mu2)):
        Jw = jac_w.blocks[ph]
        Fi = mp.F_inv.blocks[ph]
        G = np.einsum("ikrab,kjrab->ijrab", Jw, Fi)
        inner = mu * (G + np.einsum("jirab->ijrab", G)) - q.blocks[ph][None, None] * eye[
            :, :, None, None, None
        ]
        out.blocks[ph] = np.einsum("ikrab,jkrab->ijrab", inner, mp.A.blocks[ph])
    return out


def transformed_normal_projection(mp: MapData):
    """(pulled-back unit normal, tangential projector) of the interface."""
    return mp.n_gamma, mp.P_eta


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------


def _metric_pieces(eta: SphereField):
    g = eta.grid
    vals = eta.values
    if np.min(1.0 + vals) <= 0.0:
        raise ValueError("1 + eta must be positive")
    grad = surface_gradient(eta)
    tth, tph = grad.components
    metric = (1.0 + vals) ** 2 + tth**2 + tph**2
    if np.min(metric) <= 0.0:
        raise ValueError("degenerate interface metric")
    return vals, tth, tph, metric


def curvature_linear(eta: SphereField) -> SphereField:
    """lap_S eta + 2 eta."""
    return laplace_beltrami(eta) + 2.0 * eta


def curvature_nonlinear(eta: SphereField) -> SphereField:
    """All terms of (H+2) o Phi beyond the linearization (with its sign:
    (H+2) o Phi = curvature_linear - curvature_nonlinear)."""
    g = eta.grid
    vals, tth, tph, metric = _metric_pieces(eta)
    sg = np.sqrt(metric)
    lap = laplace_beltrami(eta).values
    inv_sg = SphereField(g, values=1.0 / sg, band=g.pad_limit)
    gth, gph = surface_gradient(inv_sg).components
    one_p = 1.0 + vals
    term1 = -(1.0 / one_p) * ((1.0 - one_p * sg) / sg) * lap
    term2 = -(1.0 / one_p) * (gth * tth + gph * tph)
    term3 = (2.0 - 2.0 * (1.0 - vals) * sg) / sg
    return SphereField(g, values=term1 + term2 + term3, band=g.pad_limit)


def curvature_total(eta: SphereField) -> SphereField:
    """(H + 2) o Phi, vanishing on the unit sphere."""
    lin = curvature_linear(eta)
    return SphereField(
        eta.grid, values=lin.values - curvature_nonlinear(eta).values, band=eta.grid.pad_limit
    )


# ---------------------------------------------------------------------------
# integral identities used as diagnostics
# ---------------------------------------------------------------------------


def volume_identity_defect(mp: MapData) -> float:
    """int_{B1} J dx - (4 pi/3 + (1/3) int ((1+eta)^3 - 1) dS)."""
    from .volume import integrate_phase

    lhs = integrate_phase(mp.J, INTERIOR)
    g = mp.grid.sphere
    eta_vals = mp.eta.eta.values
    surf = g.quad((1.0 + eta_vals) ** 3 - 1.0)
    return lhs - (4.0 * np.pi / 3.0 + surf / 3.0)


def lipschitz_fit_A(grid: VolumeGrid, pairs) -> float:
    """Fitted constant C in |A(eta1) - A(eta2)|_inf <= C |eta1 - eta2|."""
    best = 0.0
    for eta1, eta2 in pairs:
        m1 = build_map(HeightFunction(eta1), grid)
        m2 = build_map(HeightFunction(eta2), grid)
        num = (m1.A - m2.A).max_abs()
        den = sobolev_norm(eta1 - eta2, ETA_SOBOLEV_ORDER)
        if den > 0:
            best = max(best, num / den)
    return best
