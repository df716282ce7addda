"""Spherical-harmonic calculus on the unit sphere.

Real orthonormal harmonics (int Y_lm Y_l'm' dS = delta) on a
Gauss-Legendre (colatitude) x equispaced (azimuth) grid.  Provides the
scalar transform pair, tangent-field (spheroidal/toroidal) transforms,
Laplace-Beltrami, surface gradient, quadrature, the projection onto the
degree-1 subspace and the inversion of the shifted operator
``lap_S + 2`` on its complement.

Conventions
-----------
* ``Y_{l,0} = Pbar_l^0(cos th)``,
  ``Y_{l,m>0} = sqrt(2) Pbar_l^m(cos th) cos(m ph)``,
  ``Y_{l,-m}  = sqrt(2) Pbar_l^m(cos th) sin(m ph)``,
  with ``Pbar`` the fully normalized associated Legendre functions
  (Condon-Shortley phase included).
* Coefficients are stored in a dense ``(L+1, 2L+1)`` array ``a[l, m+L]``.
* A constant field c has ``a[0,0] = c*sqrt(4 pi)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "SphereGrid",
    "SphereField",
    "TangentField",
    "default_padded_grid",
    "integrate_sphere",
    "laplace_beltrami",
    "surface_gradient",
    "surface_divergence",
    "project_kernel",
    "project_complement",
    "solve_shifted",
    "sobolev_norm",
    "normal_component_fields",
    "rotate_about_z",
]


def _legendre_tables(lmax: int, x: np.ndarray):
    """Normalized associated Legendre Pbar_l^m(x), d/dtheta and m/sin tables.

    Returns three arrays of shape (lmax+1, lmax+1, len(x)) indexed [m, l, i];
    entries with l < m are zero.
    """
    x = np.asarray(x, dtype=float)
    sin_th = np.sqrt(1.0 - x * x)
    n = x.size
    P = np.zeros((lmax + 1, lmax + 1, n))
    P[0, 0] = np.sqrt(1.0 / (4.0 * np.pi))
    for m in range(1, lmax + 1):
        P[m, m] = -np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_th * P[m - 1, m - 1]
    for m in range(lmax + 1):
        if m + 1 <= lmax:
            P[m, m + 1] = np.sqrt(2.0 * m + 3.0) * x * P[m, m]
        for l in range(m + 2, lmax + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(
                ((2.0 * l + 1.0) * ((l - 1.0) ** 2 - m * m))
                / ((2.0 * l - 3.0) * (l * l - m * m))
            )
            P[m, l] = a * x * P[m, l - 1] - b * P[m, l - 2]

    # d Pbar_l^m / dtheta = (l x Pbar_l^m - c_lm Pbar_{l-1}^m) / sin(theta)
    dP = np.zeros_like(P)
    for m in range(lmax + 1):
        for l in range(m, lmax + 1):
            c = 0.0
            low = np.zeros(n)
            if l - 1 >= m:
                c = np.sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0)) * np.sqrt(
                    float(l * l - m * m)
                )
                low = P[m, l - 1]
            dP[m, l] = (l * x * P[m, l] - c * low) / sin_th

    # m Pbar_l^m / sin(theta); safe on a Gauss grid (no poles)
    mP = np.zeros_like(P)
    for m in range(1, lmax + 1):
        mP[m] = m * P[m] / sin_th
    return P, dP, mP


@dataclass(frozen=True)
class SphereGrid:
    """Gauss-Legendre x equispaced-azimuth quadrature grid.

    ``band_limit`` is the working band limit L_max; ``pad_limit`` is the
    largest degree the grid can transform exactly (used to dealias
    quadratic and cubic products).
    """

    band_limit: int
    pad_limit: int
    theta: np.ndarray  # (n_theta,)
    phi: np.ndarray  # (n_phi,)
    x: np.ndarray  # cos(theta)
    wx: np.ndarray  # Gauss-Legendre weights for int dx
    n_theta: int
    n_phi: int

    @classmethod
    def build(cls, band_limit: int = 32, pad: float = 1.5) -> "SphereGrid":
        pad_limit = int(np.ceil(pad * band_limit)) + 1
        n_theta = pad_limit + 2
        n_phi = 2 * pad_limit + 2
        if n_phi % 2:
            n_phi += 1
        x, wx = np.polynomial.legendre.leggauss(n_theta)
        order = np.argsort(-x)  # theta increasing from the north pole
        x, wx = x[order], wx[order]
        theta = np.arccos(x)
        phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
        return cls(band_limit, pad_limit, theta, phi, x, wx, n_theta, n_phi)

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights per node (n_theta, n_phi); sum to 4 pi."""
        return np.outer(self.wx, np.full(self.n_phi, 2.0 * np.pi / self.n_phi))

    @property
    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        th, ph = np.meshgrid(self.theta, self.phi, indexing="ij")
        return th, ph

    def unit_vectors(self):
        """Cartesian components of (r_hat, theta_hat, phi_hat) on the grid."""
        th, ph = self.nodes
        st, ct = np.sin(th), np.cos(th)
        sp, cp = np.sin(ph), np.cos(ph)
        rhat = np.stack([st * cp, st * sp, ct])
        that = np.stack([ct * cp, ct * sp, -st])
        phat = np.stack([-sp, cp, np.zeros_like(sp)])
        return rhat, that, phat

    # -- cached Legendre tables ------------------------------------------
    def _tables(self):
        return _cached_tables(self.pad_limit, self.x.tobytes(), self.x.size)

    def quad(self, values: np.ndarray) -> float:
        """Surface quadrature of nodal values (n_theta, n_phi)."""
        return float(np.einsum("ij,ij->", self.weights, values))


@lru_cache(maxsize=8)
def _cached_tables(lmax: int, xbytes: bytes, n: int):
    x = np.frombuffer(xbytes, dtype=float, count=n)
    return _legendre_tables(lmax, x)


def default_padded_grid(band_limit: int) -> SphereGrid:
    return SphereGrid.build(band_limit)


# ---------------------------------------------------------------------------
# scalar fields
# ---------------------------------------------------------------------------


class SphereField:
    """Scalar function on the sphere, dual grid-values / coefficients storage."""

    def __init__(self, grid: SphereGrid, values=None, coeffs=None, band=None):
        self.grid = grid
        self.band = grid.band_limit if band is None else int(band)
        if self.band > grid.pad_limit:
            raise ValueError("band limit exceeds grid capacity")
        self._values = None if values is None else np.asarray(values, dtype=float)
        self._coeffs = None if coeffs is None else np.asarray(coeffs, dtype=float)
        if self._values is None and self._coeffs is None:
            raise ValueError("need values or coeffs")
        if self._values is not None and self._values.shape != (
            grid.n_theta,
            grid.n_phi,
        ):
            raise ValueError("grid/values shape mismatch")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zeros(cls, grid: SphereGrid, band=None) -> "SphereField":
        band = grid.band_limit if band is None else band
        return cls(grid, coeffs=np.zeros((band + 1, 2 * band + 1)), band=band)

    @classmethod
    def constant(cls, grid: SphereGrid, c: float) -> "SphereField":
        f = cls.zeros(grid)
        f._coeffs[0, f.band] = c * np.sqrt(4.0 * np.pi)
        return f

    @classmethod
    def from_function(cls, grid: SphereGrid, fn, band=None) -> "SphereField":
        th, ph = grid.nodes
        return cls(grid, values=fn(th, ph), band=band)

    # -- storage sync ------------------------------------------------------
    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            self._values = _synthesis(self.grid, self._coeffs, self.band)
        return self._values

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            self._coeffs = _analysis(self.grid, self._values, self.band)
        return self._coeffs

    def with_band(self, band: int) -> "SphereField":
        """Project onto the first ``band`` degrees."""
        c = self.coeffs
        L, Lb = self.band, band
        out = np.zeros((Lb + 1, 2 * Lb + 1))
        lo = min(L, Lb)
        out[: lo + 1, Lb - lo : Lb + lo + 1] = c[: lo + 1, L - lo : L + lo + 1]
        return SphereField(self.grid, coeffs=out, band=Lb)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, SphereField):
            b = max(self.band, other.band)
            return SphereField(
                self.grid,
                coeffs=self.with_band(b).coeffs + other.with_band(b).coeffs,
                band=b,
            )
        return SphereField(self.grid, values=self.values + other, band=self.band)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (other * -1.0 if isinstance(other, SphereField) else -other)

    def __mul__(self, a):
        if isinstance(a, SphereField):
            return SphereField(self.grid, values=self.values * a.values)
        return SphereField(
            self.grid,
            coeffs=None if self._coeffs is None else a * self._coeffs,
            values=None if self._coeffs is not None else a * self._values,
            band=self.band,
        )

    __rmul__ = __mul__

    def copy(self) -> "SphereField":
        return SphereField(self.grid, coeffs=self.coeffs.copy(), band=self.band)

    def l2(self) -> float:
        c = self.coeffs
        return float(np.sqrt(np.sum(c * c)))


def analysis_batch(grid: SphereGrid, values: np.ndarray, band: int) -> np.ndarray:
    """Scalar analysis on arrays shaped (..., n_theta, n_phi)."""
    P, _, _ = grid._tables()
    F = np.fft.rfft(values, axis=-1)
    nphi = grid.n_phi
    L = band
    lead = values.shape[:-2]
    coeffs = np.zeros(lead + (L + 1, 2 * L + 1))
    w = grid.wx
    A0 = F[..., 0].real / nphi
    coeffs[..., :, L] = 2.0 * np.pi * np.einsum("li,...i->...l", P[0, : L + 1] * w, A0)
    sq2pi = np.sqrt(2.0) * np.pi
    for m in range(1, L + 1):
        Am = 2.0 * F[..., m].real / nphi
        Bm = -2.0 * F[..., m].imag / nphi
        Pm = P[m, : L + 1] * w
        coeffs[..., :, L + m] = sq2pi * np.einsum("li,...i->...l", Pm, Am)
        coeffs[..., :, L - m] = sq2pi * np.einsum("li,...i->...l", Pm, Bm)
    return coeffs


def synthesis_batch(grid: SphereGrid, coeffs: np.ndarray, band: int) -> np.ndarray:
    """Scalar synthesis to arrays shaped (..., n_theta, n_phi)."""
    P, _, _ = grid._tables()
    L = band
    nphi = grid.n_phi
    lead = coeffs.shape[:-2]
    F = np.zeros(lead + (grid.n_theta, nphi // 2 + 1), dtype=complex)
    F[..., 0] = np.einsum("li,...l->...i", P[0, : L + 1], coeffs[..., :, L]) * nphi
    s2 = np.sqrt(2.0)
    for m in range(1, L + 1):
        Pm = P[m, : L + 1]
        Am = s2 * np.einsum("li,...l->...i", Pm, coeffs[..., :, L + m])
        Bm = s2 * np.einsum("li,...l->...i", Pm, coeffs[..., :, L - m])
        F[..., m] = (Am - 1j * Bm) * (nphi / 2.0)
    return np.fft.irfft(F, n=nphi, axis=-1)


def tangent_analysis_batch(grid: SphereGrid, tth: np.ndarray, tph: np.ndarray, band: int):
    """Spheroidal/toroidal analysis on component arrays (..., n_theta, n_phi)."""
    _, D, E = grid._tables()
    L = band
    nphi = grid.n_phi
    w = grid.wx
    Fth = np.fft.rfft(tth, axis=-1)
    Fph = np.fft.rfft(tph, axis=-1)
    lead = tth.shape[:-2]
    s = np.zeros(lead + (L + 1, 2 * L + 1))
    t = np.zeros(lead + (L + 1, 2 * L + 1))
    ll = np.arange(L + 1, dtype=float)
    fac = np.where(ll > 0, ll * (ll + 1.0), 1.0)
    Ath0 = Fth[..., 0].real / nphi
    Aph0 = Fph[..., 0].real / nphi
    D0 = D[0, : L + 1] * w
    s[..., :, L] = 2.0 * np.pi * np.einsum("li,...i->...l", D0, Ath0) / fac
    t[..., :, L] = 2.0 * np.pi * np.einsum("li,...i->...l", D0, Aph0) / fac
    sq2pi = np.sqrt(2.0) * np.pi
    for m in range(1, L + 1):
        Ath = 2.0 * Fth[..., m].real / nphi
        Bth = -2.0 * Fth[..., m].imag / nphi
        Aph = 2.0 * Fph[..., m].real / nphi
        Bph = -2.0 * Fph[..., m].imag / nphi
        Dm = D[m, : L + 1] * w
        Em = E[m, : L + 1] * w
        dot = lambda M, a: np.einsum("li,...i->...l", M, a)
        s[..., :, L + m] = sq2pi * (dot(Dm, Ath) - dot(Em, Bph)) / fac
        s[..., :, L - m] = sq2pi * (dot(Dm, Bth) + dot(Em, Aph)) / fac
        t[..., :, L + m] = sq2pi * (dot(Em, Bth) + dot(Dm, Aph)) / fac
        t[..., :, L - m] = sq2pi * (-dot(Em, Ath) + dot(Dm, Bph)) / fac
    s[..., 0, :] = 0.0
    t[..., 0, :] = 0.0
    return s, t


def tangent_synthesis_batch(grid: SphereGrid, s: np.ndarray, t: np.ndarray, band: int):
    """Inverse of tangent_analysis_batch; returns (t_theta, t_phi)."""
    _, D, E = grid._tables()
    L = band
    nphi = grid.n_phi
    lead = s.shape[:-2]
    Fth = np.zeros(lead + (grid.n_theta, nphi // 2 + 1), dtype=complex)
    Fph = np.zeros_like(Fth)
    dot = lambda M, a: np.einsum("li,...l->...i", M, a)
    Fth[..., 0] = dot(D[0, : L + 1], s[..., :, L]) * nphi
    Fph[..., 0] = dot(D[0, : L + 1], t[..., :, L]) * nphi
    s2 = np.sqrt(2.0)
    for m in range(1, L + 1):
        Dm, Em = D[m, : L + 1], E[m, : L + 1]
        Ath = s2 * (dot(Dm, s[..., :, L + m]) - dot(Em, t[..., :, L - m]))
        Bth = s2 * (dot(Dm, s[..., :, L - m]) + dot(Em, t[..., :, L + m]))
        Aph = s2 * (dot(Em, s[..., :, L - m]) + dot(Dm, t[..., :, L + m]))
        Bph = s2 * (-dot(Em, s[..., :, L + m]) + dot(Dm, t[..., :, L - m]))
        Fth[..., m] = (Ath - 1j * Bth) * (nphi / 2.0)
        Fph[..., m] = (Aph - 1j * Bph) * (nphi / 2.0)
    return np.fft.irfft(Fth, n=nphi, axis=-1), np.fft.irfft(Fph, n=nphi, axis=-1)


def _analysis(grid: SphereGrid, values: np.ndarray, band: int) -> np.ndarray:
    return analysis_batch(grid, values, band)


def _synthesis(grid: SphereGrid, coeffs: np.ndarray, band: int) -> np.ndarray:
    return synthesis_batch(grid, coeffs, band)


# ---------------------------------------------------------------------------
# tangent vector fields
# ---------------------------------------------------------------------------


class TangentField:
    """Tangent vector field, stored as (theta, phi) components on the grid.

    Spectral form: ``t = sum s_lm grad_S Y_lm + t_lm (rhat x grad_S Y_lm)``
    (spheroidal / toroidal split, l >= 1).
    """

    def __init__(self, grid: SphereGrid, t_theta=None, t_phi=None, spec=None, band=None):
        self.grid = grid
        self.band = grid.band_limit if band is None else int(band)
        self._tth = None if t_theta is None else np.asarray(t_theta, float)
        self._tph = None if t_phi is None else np.asarray(t_phi, float)
        self._spec = spec  # (s_coeffs, t_coeffs) as (L+1, 2L+1) arrays

    @classmethod
    def zeros(cls, grid: SphereGrid, band=None) -> "TangentField":
        band = grid.band_limit if band is None else band
        z = np.zeros((band + 1, 2 * band + 1))
        return cls(grid, spec=(z, z.copy()), band=band)

    @property
    def components(self):
        if self._tth is None:
            self._tth, self._tph = _tangent_synthesis(self.grid, *self._spec, self.band)
        return self._tth, self._tph

    @property
    def spec(self):
        if self._spec is None:
            self._spec = _tangent_analysis(self.grid, self._tth, self._tph, self.band)
        return self._spec

    def cartesian(self) -> np.ndarray:
        """Cartesian components, shape (3, n_theta, n_phi)."""
        _, that, phat = self.grid.unit_vectors()
        tth, tph = self.components
        return tth * that + tph * phat

    def dot_normal(self) -> float:
        return 0.0  # tangent by construction

    def __add__(self, other):
        a, b = self.components, other.components
        return TangentField(self.grid, a[0] + b[0], a[1] + b[1], band=max(self.band, other.band))

    def __mul__(self, a):
        tth, tph = self.components
        return TangentField(self.grid, a * tth, a * tph, band=self.band)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + other * -1.0

    def l2(self) -> float:
        s, t = self.spec
        l = np.arange(self.band + 1)[:, None]
        w = l * (l + 1.0)
        return float(np.sqrt(np.sum(w * (s * s + t * t))))


def _tangent_analysis(grid: SphereGrid, tth, tph, band):
    return tangent_analysis_batch(grid, tth, tph, band)


def _tangent_synthesis(grid: SphereGrid, s, t, band):
    return tangent_synthesis_batch(grid, s, t, band)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def integrate_sphere(f: SphereField) -> float:
    """Quadrature-exact surface integral of a band-limited field."""
    return float(f.coeffs[0, f.band] * np.sqrt(4.0 * np.pi))


def laplace_beltrami(f: SphereField) -> SphereField:
    c = f.coeffs.copy()
    l = np.arange(f.band + 1, dtype=float)[:, None]
    return SphereField(f.grid, coeffs=-l * (l + 1.0) * c, band=f.band)


def surface_gradient(f: SphereField) -> TangentField:
    """grad_S f as a tangent field (spheroidal coefficients = f coefficients)."""
    s = f.coeffs.copy()
    s[0, :] = 0.0  # constants have no gradient
    return TangentField(f.grid, spec=(s, np.zeros_like(s)), band=f.band)


def surface_divergence(t: TangentField) -> SphereField:
    s, _ = t.spec
    l = np.arange(t.band + 1, dtype=float)[:, None]
    return SphereField(t.grid, coeffs=-l * (l + 1.0) * s, band=t.band)


def project_kernel(f: SphereField) -> SphereField:
    """Orthogonal projection onto the l = 1 subspace (span of n_1, n_2, n_3)."""
    c = np.zeros_like(f.coeffs)
    L = f.band
    c[1, L - 1 : L + 2] = f.coeffs[1, L - 1 : L + 2]
    return SphereField(f.grid, coeffs=c, band=L)


def project_complement(f: SphereField) -> SphereField:
    c = f.coeffs.copy()
    L = f.band
    c[1, L - 1 : L + 2] = 0.0
    return SphereField(f.grid, coeffs=c, band=L)


def kernel_obstruction(f: SphereField) -> float:
    """Relative l = 1 content of f (must vanish for solve_shifted)."""
    L = f.band
    num = np.linalg.norm(f.coeffs[1, L - 1 : L + 2])
    den = np.linalg.norm(f.coeffs)
    return float(num / den) if den > 0 else 0.0


def solve_shifted(f: SphereField, tol: float = 1e-10) -> SphereField:
    """Solve (lap_S + 2) eta = f on the complement of the l = 1 kernel.

    Coefficient-wise division by (2 - l(l+1)); rejects data with
    non-negligible l = 1 content and reports the offending residual.
    """
    obs = kernel_obstruction(f)
    if obs > tol:
        raise ValueError(
            f"shifted solve: data has l=1 content (relative residual {obs:.3e})"
        )
    c = f.coeffs.copy()
    L = f.band
    l = np.arange(L + 1, dtype=float)[:, None]
    denom = 2.0 - l * (l + 1.0)
    denom[1] = 1.0  # masked below
    out = c / denom
    out[1, :] = 0.0
    return SphereField(f.grid, coeffs=out, band=L)


def sobolev_norm(f: SphereField, s: float) -> float:
    """Coefficient surrogate for the W^{s,2} norm: (sum (1+l(l+1))^s a^2)^{1/2}."""
    c = f.coeffs
    l = np.arange(f.band + 1, dtype=float)[:, None]
    w = (1.0 + l * (l + 1.0)) ** s
    return float(np.sqrt(np.sum(w * c * c)))


def normal_component_fields(grid: SphereGrid):
    """The three components of the outward normal as SphereFields.

    Built from their exact degree-1 coefficients so that kernel identities
    hold to machine precision:
    ``n1 = -c Y_{1,1}``, ``n2 = -c Y_{1,-1}``, ``n3 = c Y_{1,0}`` with
    ``c = sqrt(4 pi / 3)`` (the sign carries the Condon-Shortley phase).
    """
    L = grid.band_limit
    c = np.sqrt(4.0 * np.pi / 3.0)
    out = []
    for col, amp in ((L + 1, -c), (L - 1, -c), (L, c)):
        a = np.zeros((L + 1, 2 * L + 1))
        a[1, col] = amp
        out.append(SphereField(grid, coeffs=a, band=L))
    return tuple(out)


def rotate_about_z(f: SphereField, beta: float) -> SphereField:
    """Coefficients of x -> f(R_beta x), R_beta the rotation by beta about e3.

    For real harmonics the (m, -m) pair rotates by the 2x2 rotation of
    angle m*beta.
    """
    c = f.coeffs.copy()
    L = f.band
    out = c.copy()
    for m in range(1, L + 1):
        cm, sm = np.cos(m * beta), np.sin(m * beta)
        a, b = c[:, L + m].copy(), c[:, L - m].copy()
        out[:, L + m] = cm * a + sm * b
        out[:, L - m] = -sm * a + cm * b
    return SphereField(f.grid, coeffs=out, band=L)
