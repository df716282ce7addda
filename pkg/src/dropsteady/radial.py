"""Radial spectral bases for the two-phase ball/exterior geometry.

Interior (drop) phase: r in (0, 1], Chebyshev in rho = 2 r^2 - 1 with an
optional odd-parity prefactor r, so smooth fields (whose per-degree radial
profiles behave like r^l x even polynomial) are represented exactly.

Exterior (reservoir) phase: the algebraic map s = 1/r, s in [1/R_inf, 1],
Chebyshev in the affine image of s.  Polynomial decay in r is polynomial
in s, so the decaying exterior (Lamb) solutions lie in the trial space
while the growing ones do not.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import chebyshev as ncheb

__all__ = ["InteriorRadial", "ExteriorRadial"]


def _cheb_tables(t: np.ndarray, n: int):
    """T_k, T'_k, T''_k at points t (any real), k = 0..n-1; shape (len(t), n)."""
    V = ncheb.chebvander(t, n - 1)
    eye = np.eye(n)
    D1 = np.zeros((n, n))
    D2 = np.zeros((n, n))
    for k in range(n):
        c1 = ncheb.chebder(eye[:, k])
        c2 = ncheb.chebder(c1) if c1.size else np.zeros(1)
        D1[: c1.size, k] = c1
        D2[: c2.size, k] = c2 if c2.size else 0.0
    V1 = ncheb.chebvander(t, n - 1) @ D1
    V2 = ncheb.chebvander(t, n - 1) @ D2
    return V, V1, V2


def _moment_weights(V: np.ndarray, t_g: np.ndarray, w_g: np.ndarray) -> np.ndarray:
    """Nodal quadrature weights matching the Chebyshev moments sum(w_g T_k(t_g)).

    ``t_g``/``w_g`` is a reference quadrature (in the basis variable, weight
    function folded into w_g) that integrates the target measure accurately.
    """
    n = V.shape[1]
    Tg = ncheb.chebvander(t_g, n - 1)
    mu = Tg.T @ w_g
    return np.linalg.solve(V.T, mu)


class InteriorRadial:
    """Nodal Chebyshev discretization of the unit ball's radial direction."""

    def __init__(self, n: int):
        self.n = n
        j = np.arange(n)
        self.rho = np.cos(j * np.pi / n)  # (-1, 1], excludes the center
        self.r = np.sqrt((1.0 + self.rho) / 2.0)
        self.V, self.V1, self.V2 = _cheb_tables(self.rho, n)
        self.Vinv = np.linalg.inv(self.V)
        # weights for int_0^1 f(r) r^2 dr; the reference rule works in r where
        # T_k(2r^2-1) r^2 is a polynomial, so the moments are Gauss-exact
        xg, wg = np.polynomial.legendre.leggauss(2 * n + 4)
        rg = (xg + 1.0) / 2.0
        self.wq = _moment_weights(self.V, 2.0 * rg**2 - 1.0, (wg / 2.0) * rg**2)
        self.i_surface = 0  # rho = 1 -> r = 1

    # profiles: arrays (n, ...) over radial nodes
    def deriv(self, prof: np.ndarray, parity: int, order: int = 1) -> np.ndarray:
        """d^order/dr^order of profiles with radial parity (0 even, 1 odd)."""
        p = parity & 1
        r = self.r.reshape((-1,) + (1,) * (prof.ndim - 1))
        g = prof / r if p else prof
        a = np.tensordot(self.Vinv, g, axes=(1, 0))
        g1 = np.tensordot(self.V1, a, axes=(1, 0))
        if order == 1:
            d = 4.0 * r ** (p + 1) * g1
            if p:
                d = d + g
            return d
        if order == 2:
            g2 = np.tensordot(self.V2, a, axes=(1, 0))
            d = 4.0 * (2 * p + 1) * r**p * g1 + 16.0 * r ** (p + 2) * g2
            return d
        raise ValueError("order must be 1 or 2")

    def fit(self, prof: np.ndarray, parity: int) -> np.ndarray:
        """Chebyshev coefficients of prof / r^parity."""
        p = parity & 1
        r = self.r.reshape((-1,) + (1,) * (prof.ndim - 1))
        g = prof / r if p else prof
        return np.tensordot(self.Vinv, g, axes=(1, 0))

    def eval_at(self, coef: np.ndarray, r: np.ndarray, parity: int) -> np.ndarray:
        p = parity & 1
        rho = 2.0 * np.asarray(r) ** 2 - 1.0
        T = ncheb.chebvander(rho, self.n - 1)
        out = np.tensordot(T, coef, axes=(1, 0))
        if p:
            out = out * np.asarray(r).reshape(
                (-1,) + (1,) * (out.ndim - 1)
            )
        return out

    def integrate(self, prof: np.ndarray) -> np.ndarray:
        """int_0^1 prof r^2 dr (profiles sampled at the nodes)."""
        return np.tensordot(self.wq, prof, axes=(1, 0)) if prof.ndim > 1 else float(
            self.wq @ prof
        )


class ExteriorRadial:
    """Nodal Chebyshev discretization of [1, R_inf] in the map s = 1/r."""

    def __init__(self, n: int, r_inf: float):
        self.n = n
        self.r_inf = float(r_inf)
        self.s_min = 1.0 / self.r_inf
        j = np.arange(n)
        self.xi = np.cos(j * np.pi / (n - 1))  # [1, -1], full Lobatto
        self.c_xi = 2.0 / (1.0 - self.s_min)  # d xi / d s
        self.s = self.s_min + (self.xi + 1.0) / self.c_xi
        self.r = 1.0 / self.s
        self.V, self.V1, self.V2 = _cheb_tables(self.xi, n)
        self.Vinv = np.linalg.inv(self.V)
        # weights for int_1^R f r^2 dr = int_{s_min}^1 f s^{-4} ds; the s^{-4}
        # pole at s = 0 sits close to s_min, so use geometric Gauss panels
        s_pts, s_wts = [], []
        edges = np.geomspace(self.s_min, 1.0, 9)
        xg, wg = np.polynomial.legendre.leggauss(24)
        for a, b in zip(edges[:-1], edges[1:]):
            sg = a + (xg + 1.0) * (b - a) / 2.0
            s_pts.append(sg)
            s_wts.append(wg * (b - a) / 2.0 * sg ** (-4.0))
        s_pts = np.concatenate(s_pts)
        s_wts = np.concatenate(s_wts)
        self.wq = _moment_weights(self.V, self.c_xi * (s_pts - self.s_min) - 1.0, s_wts)
        self.i_surface = 0  # xi = 1 -> s = 1 -> r = 1
        self.i_far = n - 1  # r = R_inf
        self.xi_infinity = self.c_xi * (0.0 - self.s_min) - 1.0  # image of s = 0

    def deriv(self, prof: np.ndarray, parity: int = 0, order: int = 1) -> np.ndarray:
        """d^order/dr^order; parity is ignored (kept for interface symmetry)."""
        a = np.tensordot(self.Vinv, prof, axes=(1, 0))
        g1 = np.tensordot(self.V1, a, axes=(1, 0))
        s = self.s.reshape((-1,) + (1,) * (prof.ndim - 1))
        if order == 1:
            return -self.c_xi * s**2 * g1
        if order == 2:
            g2 = np.tensordot(self.V2, a, axes=(1, 0))
            return 2.0 * self.c_xi * s**3 * g1 + self.c_xi**2 * s**4 * g2
        raise ValueError("order must be 1 or 2")

    def fit(self, prof: np.ndarray, parity: int = 0) -> np.ndarray:
        return np.tensordot(self.Vinv, prof, axes=(1, 0))

    def eval_at(self, coef: np.ndarray, r: np.ndarray, parity: int = 0) -> np.ndarray:
        s = 1.0 / np.asarray(r, dtype=float)
        xi = self.c_xi * (s - self.s_min) - 1.0
        T = ncheb.chebvander(xi, self.n - 1)
        return np.tensordot(T, coef, axes=(1, 0))

    def integrate(self, prof: np.ndarray) -> np.ndarray:
        """int_1^{R_inf} prof r^2 dr."""
        return np.tensordot(self.wq, prof, axes=(1, 0)) if prof.ndim > 1 else float(
            self.wq @ prof
        )

    def gauss_tail_nodes(self, n_gauss: int = 64):
        """Gauss nodes/weights for int_1^infinity f r^2 dr = int_0^1 f s^-4 ds.

        Returns radii and weights; the integrand f must decay at least like
        r^-4 for the weighted values to stay bounded.
        """
        xg, wg = np.polynomial.legendre.leggauss(n_gauss)
        sg = (xg + 1.0) / 2.0
        wg = wg / 2.0
        return 1.0 / sg, wg * sg ** (-4.0)
