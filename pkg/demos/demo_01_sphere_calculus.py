"""Spherical-harmonic calculus on the unit sphere.

Walks through the spectral toolbox the solver is built on: the transform
pair, quadrature, the Laplace-Beltrami operator, the degree-1 kernel of
(lap_S + 2) and the inversion of that shifted operator on the kernel's
complement.
"""

import numpy as np

from dropsteady.sphere import (
    SphereField,
    SphereGrid,
    integrate_sphere,
    kernel_obstruction,
    laplace_beltrami,
    normal_component_fields,
    project_complement,
    project_kernel,
    sobolev_norm,
    solve_shifted,
    surface_gradient,
)

grid = SphereGrid.build(16)
print(f"grid: {grid.n_theta} x {grid.n_phi} nodes, band limit {grid.band_limit}")
print(f"quadrature weights sum to 4*pi within {abs(grid.weights.sum()-4*np.pi):.2e}")

# a random band-limited field, round-tripped through the transform
rng = np.random.default_rng(0)
L = grid.band_limit
coeffs = np.zeros((L + 1, 2 * L + 1))
for l in range(L + 1):
    coeffs[l, L - l : L + l + 1] = rng.standard_normal(2 * l + 1) / (1 + l * (l + 1))
f = SphereField(grid, coeffs=coeffs, band=L)
f2 = SphereField(grid, values=f.values.copy())
print(f"transform round trip error: {np.max(np.abs(f2.coeffs - f.coeffs)):.2e}")

# Parseval under the orthonormal convention
print(f"Parseval defect: {abs(grid.quad(f.values**2) - np.sum(f.coeffs**2)):.2e}")

# surface integrals
one = SphereField.constant(grid, 1.0)
n1, n2, n3 = normal_component_fields(grid)
print(f"int 1 dS = {integrate_sphere(one):.12f}  (4 pi = {4*np.pi:.12f})")
print(f"int n3^2 dS = {integrate_sphere(n3 * n3):.12f}  (4 pi/3 = {4*np.pi/3:.12f})")

# the normal components span the kernel of (lap_S + 2)
for name, nk in (("n1", n1), ("n2", n2), ("n3", n3)):
    resid = np.max(np.abs((laplace_beltrami(nk) + 2.0 * nk).values))
    print(f"(lap_S + 2) {name} = {resid:.2e}")

# solve the shifted operator on the complement of that kernel
data = project_complement(f)
eta = solve_shifted(data)
back = laplace_beltrami(eta) + 2.0 * eta
print(f"shifted-solve round trip: {np.max(np.abs(back.values - data.values)):.2e}")
print(f"kernel content of the solution: {kernel_obstruction(eta + 1e-30 * one):.2e}")

# the kernel projection is the one the height equation needs
p = project_kernel(f)
print(f"projector idempotency: {np.max(np.abs(project_kernel(p).values - p.values)):.2e}")

# surface gradient is tangential
grad = surface_gradient(f)
cart = grad.cartesian()
rhat = grid.unit_vectors()[0]
print(f"n . grad_S f (pointwise): {np.max(np.abs(np.einsum('kij,kij->ij', cart, rhat))):.2e}")

print(f"Sobolev surrogate |f|_{{2.75}} = {sobolev_norm(f, 2.75):.6f}")
