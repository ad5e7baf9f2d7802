"""Exterior harmonic fields for the Dirichlet, Neumann and Robin problems.

Outside the unit ball each problem has the solution

    w(phi, theta, r) = sum_k gamma_k r^{-(k+1)} sum_m h(m, k) Y_k^m(phi, theta)

with ``gamma_k = 1`` (Dirichlet), ``-1/(k+1)`` (Neumann) and
``1/(a - b(k+1))`` (Robin).  The radius enters the operator calculus only
through ``t = log r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, TruncationMismatchError
from .operators import ProblemKind, ProblemSpec, trace_family
from .sphharm import GridSamples, SphereGrid, SphericalSpectrum, parseval_norm, synthesize

__all__ = [
    "ExteriorField",
    "solve",
    "eval_field",
    "boundary_error",
    "laplace_residual",
]


def _check_radius(r: float):
    if not r > 1:
        raise DomainError(f"the exterior domain needs r > 1, got {r}")


@dataclass(frozen=True, eq=False)
class ExteriorField:
    """Harmonic field outside the unit ball with boundary data ``boundary_spectrum``."""

    spec: ProblemSpec
    boundary_spectrum: SphericalSpectrum

    @property
    def k_max(self) -> int:
        return self.boundary_spectrum.k_max

    def mode_constants(self) -> np.ndarray:
        """gamma_k such that the (k, m) field coefficient is gamma_k h(m, k) r^{-(k+1)}."""
        kp1 = np.arange(1, self.k_max + 2, dtype=float)
        if self.spec.kind is ProblemKind.DIRICHLET:
            return np.ones_like(kp1)
        if self.spec.kind is ProblemKind.NEUMANN:
            return -1.0 / kp1
        return 1.0 / (self.spec.a - self.spec.b * kp1)

    def _scaled(self, profile: np.ndarray) -> SphericalSpectrum:
        per_degree = self.mode_constants() * profile
        expanded = np.repeat(per_degree, 2 * np.arange(self.k_max + 1) + 1)
        return SphericalSpectrum(self.k_max, self.boundary_spectrum.coeffs * expanded)

    def coefficients(self, r: float) -> SphericalSpectrum:
        """Spectrum of w(., ., r) on the sphere of radius r."""
        kp1 = np.arange(1, self.k_max + 2, dtype=float)
        return self._scaled(np.exp(-kp1 * math.log(r)))

    def radial_derivative(self, r: float) -> SphericalSpectrum:
        """Spectrum of dw/dr on the sphere of radius r."""
        kp1 = np.arange(1, self.k_max + 2, dtype=float)
        return self._scaled(-kp1 * np.exp(-(kp1 + 1) * math.log(r)))

    def boundary_trace(self, r: float) -> SphericalSpectrum:
        """Spectrum of a w + b dw/dr at radius r, from the field itself."""
        return self.coefficients(r) * self.spec.a + self.radial_derivative(r) * self.spec.b


def solve(spec: ProblemSpec, h: SphericalSpectrum) -> ExteriorField:
    """Solution of the exterior problem ``spec`` with boundary data ``h``."""
    if h.k_max > spec.k_max:
        raise TruncationMismatchError(
            f"boundary data has degree {h.k_max} but the problem is truncated at {spec.k_max}"
        )
    return ExteriorField(spec, h)


def eval_field(field: ExteriorField, grid: SphereGrid, r: float) -> GridSamples:
    _check_radius(r)
    return synthesize(field.coefficients(r), grid)


def boundary_error(spec: ProblemSpec, h: SphericalSpectrum, r: float) -> float:
    """L2(S) distance between the boundary trace at radius r and the data h."""
    _check_radius(r)
    if h.k_max > spec.k_max:
        raise TruncationMismatchError(
            f"boundary data has degree {h.k_max} but the problem is truncated at {spec.k_max}"
        )
    trace = trace_family(spec.with_k_max(h.k_max), math.log(r))
    return parseval_norm(trace.apply(h) - h)


def laplace_residual(field: ExteriorField, grid: SphereGrid, r: float, dr: float) -> float:
    """Max over grid nodes of |Laplacian w| at radius r.

    The radial part is taken by centred second differences with step ``dr``
    on the synthesized field; the angular part uses the exact eigenvalue
    -k(k+1) of each harmonic.  The result is O(dr^2).
    """
    if not dr > 0:
        raise DomainError(f"step dr must be positive, got {dr}")
    if not r - dr > 1:
        raise DomainError(f"stencil leaves the exterior domain: r - dr = {r - dr} <= 1")
    w_minus = synthesize(field.coefficients(r - dr), grid).values
    w_mid = synthesize(field.coefficients(r), grid).values
    w_plus = synthesize(field.coefficients(r + dr), grid).values
    d2 = (w_plus - 2 * w_mid + w_minus) / dr**2
    d1 = (w_plus - w_minus) / (2 * dr)

    k = np.arange(field.k_max + 1, dtype=float)
    eig = np.repeat(-k * (k + 1), 2 * np.arange(field.k_max + 1) + 1)
    mid = field.coefficients(r)
    angular = synthesize(SphericalSpectrum(mid.k_max, mid.coeffs * eig), grid).values / r**2

    return float(np.max(np.abs(d2 + 2 * d1 / r + angular), initial=0.0))
