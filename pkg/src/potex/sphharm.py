"""Spherical harmonics on the unit sphere S.

Conventions
-----------
Points on S are given by a latitude ``phi`` in [0, pi] (measured from the
north pole) and a longitude ``theta`` in (-pi, pi]::

    x = sin(phi) cos(theta),  y = sin(phi) sin(theta),  z = cos(phi)

The complex harmonics are

    Y_k^m(phi, theta) = sqrt((2k+1) (k-|m|)! / (4 pi (k+|m|)!)) P_k^|m|(cos phi) e^{i m theta}

with ``P_k^m(t) = (1-t^2)^{m/2} d^m/dt^m P_k(t)``.  No Condon-Shortley
factor (-1)^m is applied, so Y_1^1 is positive on the positive x axis;
this differs from the convention of e.g. ``scipy.special.sph_harm``.  With
this phase a real function has coefficients ``g(-m, k) = conj(g(m, k))``.

Spectra are stored packed, degree by degree, with the linear index
``idx(k, m) = k**2 + k + m``; degree k occupies ``[k**2, (k+1)**2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import DomainError, GridTooCoarseError

__all__ = [
    "SphericalSpectrum",
    "SphereGrid",
    "GridSamples",
    "packed_index",
    "legendre_p",
    "assoc_legendre",
    "normalized_legendre",
    "ynm_eval",
    "make_grid",
    "analyze",
    "synthesize",
    "parseval_norm",
    "grid_norm",
]


def packed_index(k: int, m: int) -> int:
    """Linear position of coefficient (k, m) in a packed spectrum."""
    if k < 0 or abs(m) > k:
        raise DomainError(f"invalid harmonic index (k={k}, m={m})")
    return k * k + k + m


@lru_cache(maxsize=32)
def _degree_order_table(k_max: int) -> tuple[np.ndarray, np.ndarray]:
    ks = np.repeat(np.arange(k_max + 1), 2 * np.arange(k_max + 1) + 1)
    ms = np.arange(ks.size) - ks * ks - ks
    ks.setflags(write=False)
    ms.setflags(write=False)
    return ks, ms


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SphericalSpectrum:
    """Coefficients g(m, k) of a function on S, 0 <= k <= k_max, |m| <= k."""

    k_max: int
    coeffs: np.ndarray

    def __post_init__(self):
        if int(self.k_max) != self.k_max or self.k_max < 0:
            raise DomainError(f"k_max must be a non-negative integer, got {self.k_max}")
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size != (self.k_max + 1) ** 2:
            raise ValueError(
                f"expected {(self.k_max + 1) ** 2} coefficients for k_max={self.k_max}, got {c.size}"
            )
        object.__setattr__(self, "k_max", int(self.k_max))
        object.__setattr__(self, "coeffs", _readonly(c))

    @classmethod
    def zeros(cls, k_max: int) -> SphericalSpectrum:
        return cls(k_max, np.zeros((k_max + 1) ** 2, dtype=complex))

    @classmethod
    def from_modes(cls, k_max: int, modes: dict[tuple[int, int], complex]) -> SphericalSpectrum:
        """Build a spectrum from a ``{(k, m): value}`` mapping; missing modes are zero."""
        c = np.zeros((k_max + 1) ** 2, dtype=complex)
        for (k, m), v in modes.items():
            if k > k_max:
                raise DomainError(f"mode (k={k}, m={m}) exceeds k_max={k_max}")
            c[packed_index(k, m)] += v
        return cls(k_max, c)

    @classmethod
    def unit(cls, k_max: int, k: int, m: int) -> SphericalSpectrum:
        return cls.from_modes(k_max, {(k, m): 1.0})

    @property
    def degrees(self) -> np.ndarray:
        """Degree k of every packed entry."""
        return _degree_order_table(self.k_max)[0]

    @property
    def orders(self) -> np.ndarray:
        """Order m of every packed entry."""
        return _degree_order_table(self.k_max)[1]

    def __getitem__(self, km: tuple[int, int]) -> complex:
        k, m = km
        if k > self.k_max:
            raise DomainError(f"mode (k={k}, m={m}) exceeds k_max={self.k_max}")
        return complex(self.coeffs[packed_index(k, m)])

    def degree_energy(self) -> np.ndarray:
        """Per-degree energy sum_m |g(m, k)|^2, length k_max + 1."""
        starts = np.arange(self.k_max + 1) ** 2
        return np.add.reduceat(np.abs(self.coeffs) ** 2, starts)

    def truncate(self, k_max: int) -> SphericalSpectrum:
        """Drop (or zero-pad to) a different truncation degree."""
        n = (k_max + 1) ** 2
        c = np.zeros(n, dtype=complex)
        keep = min(n, self.coeffs.size)
        c[:keep] = self.coeffs[:keep]
        return SphericalSpectrum(k_max, c)

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def _coerce(self, other: SphericalSpectrum) -> tuple[np.ndarray, np.ndarray, int]:
        k = max(self.k_max, other.k_max)
        return self.truncate(k).coeffs, other.truncate(k).coeffs, k

    def __add__(self, other):
        if not isinstance(other, SphericalSpectrum):
            return NotImplemented
        a, b, k = self._coerce(other)
        return SphericalSpectrum(k, a + b)

    def __sub__(self, other):
        if not isinstance(other, SphericalSpectrum):
            return NotImplemented
        a, b, k = self._coerce(other)
        return SphericalSpectrum(k, a - b)

    def __neg__(self):
        return SphericalSpectrum(self.k_max, -self.coeffs)

    def __mul__(self, scalar):
        if isinstance(scalar, SphericalSpectrum):
            return NotImplemented
        return SphericalSpectrum(self.k_max, self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __repr__(self):
        return f"SphericalSpectrum(k_max={self.k_max}, nonzero={int(np.count_nonzero(self.coeffs))})"


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Gauss-Legendre nodes in cos(phi) times uniform longitudes."""

    n_phi: int
    n_theta: int
    phi_nodes: np.ndarray
    phi_weights: np.ndarray
    theta_nodes: np.ndarray

    @property
    def cos_phi(self) -> np.ndarray:
        return np.cos(self.phi_nodes)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_phi, self.n_theta)

    @property
    def k_capacity(self) -> int:
        """Largest degree this grid analyzes without aliasing."""
        return min(self.n_phi - 1, (self.n_theta - 2) // 2)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Row-major (phi, theta) node arrays of shape ``(n_phi, n_theta)``."""
        return np.meshgrid(self.phi_nodes, self.theta_nodes, indexing="ij")

    def area_weights(self) -> np.ndarray:
        """Quadrature weights for integrals against dS; they sum to 4 pi."""
        return np.outer(self.phi_weights, np.full(self.n_theta, 2 * np.pi / self.n_theta))


@dataclass(frozen=True, eq=False)
class GridSamples:
    """Complex values of a function at every node of a ``SphereGrid``."""

    grid: SphereGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.size != self.grid.n_phi * self.grid.n_theta:
            raise ValueError(f"expected {self.grid.n_phi * self.grid.n_theta} values, got {v.size}")
        object.__setattr__(self, "values", _readonly(v.reshape(self.grid.shape)))


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0):
        raise DomainError("Legendre argument must lie in [-1, 1]")
    return t


def legendre_p(k: int, t):
    """Legendre polynomial P_k(t) by the Bonnet three-term recurrence."""
    if k < 0:
        raise DomainError(f"degree must be non-negative, got {k}")
    t = _check_t(t)
    p_prev, p = np.ones_like(t), t.copy()
    if k == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    for n in range(1, k):
        p_prev, p = p, ((2 * n + 1) * t * p - n * p_prev) / (n + 1)
    return p if p.ndim else float(p)


def normalized_legendre(k_max: int, t) -> np.ndarray:
    """Table of normalized functions N_k^m P_k^m(t) for 0 <= m <= k <= k_max.

    ``N_k^m = sqrt((2k+1)(k-m)! / (4 pi (k+m)!))`` so that
    ``Y_k^m = table[k, |m|] * exp(i m theta)``.  Entries with m > k are zero.
    The recurrence works on normalized values throughout, so no factorial
    is ever formed.

    Returns an array of shape ``(k_max + 1, k_max + 1) + shape(t)``.
    """
    t = _check_t(t)
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    out = np.zeros((k_max + 1, k_max + 1) + t.shape)
    diag = np.full(t.shape, 1.0 / math.sqrt(4 * math.pi))
    for m in range(k_max + 1):
        if m > 0:
            diag = math.sqrt((2 * m + 1) / (2 * m)) * s * diag
        out[m, m] = diag
        if m + 1 <= k_max:
            out[m + 1, m] = math.sqrt(2 * m + 3) * t * diag
        for k in range(m + 2, k_max + 1):
            a = math.sqrt((4 * k * k - 1) / (k * k - m * m))
            b = math.sqrt(((k - 1) ** 2 - m * m) / (4 * (k - 1) ** 2 - 1))
            out[k, m] = a * (t * out[k - 1, m] - b * out[k - 2, m])
    return out


def _log_norm(k: int, m: int) -> float:
    return 0.5 * (math.log((2 * k + 1) / (4 * math.pi)) + math.lgamma(k - m + 1) - math.lgamma(k + m + 1))


def assoc_legendre(k: int, m: int, t):
    """Associated Legendre function P_k^m(t) = (1-t^2)^{m/2} P_k^{(m)}(t), no (-1)^m phase."""
    if k < 0 or m < 0 or m > k:
        raise DomainError(f"need 0 <= m <= k, got k={k}, m={m}")
    t = _check_t(t)
    val = normalized_legendre(k, t)[k, m] * math.exp(-_log_norm(k, m))
    return val if val.ndim else float(val)


def ynm_eval(k: int, m: int, phi, theta):
    """Evaluate Y_k^m(phi, theta); broadcasts over ``phi`` and ``theta``."""
    if k < 0 or abs(m) > k:
        raise DomainError(f"invalid harmonic index (k={k}, m={m})")
    phi = np.asarray(phi, dtype=float)
    if np.any((phi < 0) | (phi > np.pi)):
        raise DomainError("latitude phi must lie in [0, pi]")
    p = normalized_legendre(k, np.cos(phi))[k, abs(m)]
    val = p * np.exp(1j * m * np.asarray(theta, dtype=float))
    return val if np.ndim(val) else complex(val)


@lru_cache(maxsize=16)
def make_grid(k_max: int) -> SphereGrid:
    """Smallest grid on which analysis up to degree ``k_max`` is exact."""
    if k_max < 0:
        raise DomainError(f"k_max must be non-negative, got {k_max}")
    n_phi, n_theta = k_max + 1, 2 * k_max + 2
    x, w = np.polynomial.legendre.leggauss(n_phi)
    # leggauss returns ascending x, i.e. descending phi
    phi = np.arccos(x[::-1])
    w = w[::-1].copy()
    theta = -np.pi + 2 * np.pi * np.arange(1, n_theta + 1) / n_theta
    return SphereGrid(n_phi, n_theta, _readonly(phi), _readonly(w), _readonly(theta))


@lru_cache(maxsize=16)
def _basis_factors(grid: SphereGrid, k_max: int) -> tuple[np.ndarray, np.ndarray]:
    # legendre[k, j, i] = normalized P_k^{|m_j|}(cos phi_i) with m_j = j - k_max
    table = normalized_legendre(k_max, grid.cos_phi)
    m = np.arange(-k_max, k_max + 1)
    legendre = _readonly(table[:, np.abs(m), :])
    fourier = _readonly(np.exp(1j * np.outer(m, grid.theta_nodes)))
    return legendre, fourier


def synthesize(spec: SphericalSpectrum, grid: SphereGrid) -> GridSamples:
    """Pointwise sum of the harmonic series at every grid node."""
    K = spec.k_max
    legendre, fourier = _basis_factors(grid, K)
    c = np.zeros((K + 1, 2 * K + 1), dtype=complex)
    c[spec.degrees, spec.orders + K] = spec.coeffs
    per_order = np.einsum("km,kmi->im", c, legendre)
    return GridSamples(grid, per_order @ fourier)


def analyze(samples: GridSamples, k_max: int) -> SphericalSpectrum:
    """Fourier coefficients <g, Y_k^m> by grid quadrature.

    Exact for inputs band-limited to degree ``k_max``.
    """
    grid = samples.grid
    if grid.n_phi < k_max + 1 or grid.n_theta < 2 * k_max + 2:
        raise GridTooCoarseError(
            f"grid {grid.n_phi}x{grid.n_theta} cannot resolve degree {k_max}; "
            f"need n_phi >= {k_max + 1} and n_theta >= {2 * k_max + 2}"
        )
    legendre, fourier = _basis_factors(grid, k_max)
    per_order = samples.values @ fourier.conj().T * (2 * np.pi / grid.n_theta)
    full = np.einsum("kmi,i,im->km", legendre, grid.phi_weights, per_order)
    ks, ms = _degree_order_table(k_max)
    return SphericalSpectrum(k_max, full[ks, ms + k_max])


def parseval_norm(spec: SphericalSpectrum) -> float:
    """L2(S) norm of the function represented by ``spec``."""
    return float(np.linalg.norm(spec.coeffs))


def grid_norm(samples: GridSamples) -> float:
    """L2(S) norm of sampled values by grid quadrature."""
    w = samples.grid.area_weights()
    return float(np.sqrt(np.sum(w * np.abs(samples.values) ** 2)))
