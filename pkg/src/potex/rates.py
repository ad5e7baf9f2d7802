"""Approximation-rate measurements for the Dirichlet and Neumann semigroups.

Each probe maps a common rate variable ``t -> 0+`` onto the natural
parameter of one assertion so that every norm behaves like ``t^alpha``:

=============  ===================  ===========================================
probe          natural parameter    norm
=============  ===================  ===========================================
boundary       log r = t            ||T(t) h - h||
abel_A         lambda = 1/t         ||lambda R(lambda; A) h - h||
ergodic        log r = 1/t          ||(1/log r) int_1^r V(log rho) h drho/rho||
abel_Ainv      lambda = t           ||lambda R(lambda; A^-1) h||
kfunctional    t                    quadratic K-functional K~(t, h)
=============  ===================  ===========================================

Only O-rates are measurable from finite data; o-rates are not decidable,
and the degenerate case h = 0 is reported as an undefined slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .exceptions import DomainError, UnsupportedProblemError
from .operators import ProblemKind, ProblemSpec
from .sphharm import SphericalSpectrum

__all__ = [
    "PROBES",
    "RateProbe",
    "RateReport",
    "rate_grid",
    "measure",
    "extremal_h",
    "BatteryReport",
    "equivalence_battery",
]

PROBES = ("boundary", "abel_A", "ergodic", "abel_Ainv", "kfunctional")

PARAMETER_NAMES = {
    "boundary": "log_r",
    "abel_A": "lambda",
    "ergodic": "log_r",
    "abel_Ainv": "lambda",
    "kfunctional": "t",
}

MIN_POINTS = 8
MIN_DECADES = 2.0


def rate_grid(t_min: float = 1e-3, t_max: float = 1e-1, points: int = 24) -> np.ndarray:
    """Geometric grid of rate variables."""
    if not 0 < t_min < t_max:
        raise DomainError(f"need 0 < t_min < t_max, got {t_min}, {t_max}")
    return np.geomspace(t_min, t_max, points)


@dataclass(frozen=True, eq=False)
class RateProbe:
    which: str
    spec: ProblemSpec
    h: SphericalSpectrum
    grid: np.ndarray = field(default_factory=rate_grid)

    def __post_init__(self):
        if self.which not in PROBES:
            raise ValueError(f"unknown probe {self.which!r}; expected one of {PROBES}")
        if self.spec.kind is ProblemKind.ROBIN:
            raise UnsupportedProblemError("rate probes need a semigroup (Dirichlet or Neumann)")
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or g.size < MIN_POINTS:
            raise DomainError(f"rate grid needs at least {MIN_POINTS} points")
        if np.any(g <= 0) or not (np.all(np.diff(g) > 0) or np.all(np.diff(g) < 0)):
            raise DomainError("rate grid must be positive and strictly monotone")
        if math.log10(g.max() / g.min()) < MIN_DECADES - 1e-9:
            raise DomainError(f"rate grid must span at least {MIN_DECADES:g} decades")
        object.__setattr__(self, "grid", g)

    def parameter(self) -> np.ndarray:
        """Natural parameter of the assertion at each grid point."""
        if self.which in ("abel_A", "ergodic"):
            return 1.0 / self.grid
        return self.grid.copy()


@dataclass(frozen=True, eq=False)
class RateReport:
    probe: RateProbe
    t: np.ndarray
    norms: np.ndarray
    slope: float | None
    slope_stderr: float | None
    saturation_ratio: float | None

    @property
    def defined(self) -> bool:
        """False when some norm vanishes, i.e. h = 0 and no rate exists."""
        return self.slope is not None

    @property
    def samples(self) -> list[tuple[float, float]]:
        """(natural parameter, norm) pairs."""
        return list(zip(self.probe.parameter().tolist(), self.norms.tolist()))

    def ratio_spread(self, exponent: float) -> float:
        """max/min of norm / t^exponent over the grid."""
        q = self.norms / self.t**exponent
        return float(q.max() / q.min())

    def to_dict(self) -> dict:
        return {
            "parameter": PARAMETER_NAMES[self.probe.which],
            "slope": self.slope,
            "stderr": self.slope_stderr,
            "saturation_ratio": self.saturation_ratio,
            "slope_defined": self.defined,
        }


def _probe_norms(which: str, spec: ProblemSpec, energy: np.ndarray, grid: np.ndarray) -> np.ndarray:
    spec = spec.with_k_max(energy.size - 1)
    out = np.empty(grid.size)
    for i, t in enumerate(grid):
        if which == "boundary":
            op = ops.semigroup(spec, t) - 1.0
        elif which == "abel_A":
            op = ops.abel_mean(spec, "A", 1.0 / t) - 1.0
        elif which == "ergodic":
            op = ops.ergodic_mean(spec, log_r=1.0 / t)
        elif which == "abel_Ainv":
            op = ops.abel_mean(spec, "A_inverse", t)
        else:
            out[i] = ops.quadratic_k_functional(energy, spec.shifted_degrees(), t)
            continue
        out[i] = op.norm_of(energy)
    return out


def _fit(t: np.ndarray, norms: np.ndarray) -> tuple[float, float]:
    x, y = np.log(t), np.log(norms)
    (slope, icept), cov = np.polyfit(x, y, 1, cov="unscaled")
    resid = y - (slope * x + icept)
    dof = max(x.size - 2, 1)
    stderr = math.sqrt(cov[0, 0] * float(resid @ resid) / dof)
    return float(slope), stderr


def measure(probe: RateProbe, energy: np.ndarray | None = None) -> RateReport:
    """Sample one assertion's norm over the probe grid and fit a log-log slope.

    ``energy`` (the degree energies of ``probe.h``) may be passed to skip
    recomputing them when several probes share one boundary datum.
    """
    if energy is None:
        energy = probe.h.degree_energy()
    norms = _probe_norms(probe.which, probe.spec, energy, probe.grid)
    t = probe.grid
    if np.any(norms <= 0):
        return RateReport(probe, t, norms, None, None, None)
    slope, stderr = _fit(t, norms)
    q = norms / t**slope
    return RateReport(probe, t, norms, slope, stderr, float(q.max() / q.min()))


def extremal_h(alpha: float, k_max: int) -> SphericalSpectrum:
    """Zonal datum with h(0, k) = (k+1)^{-alpha-1/2}.

    Its boundary-approximation error is of exact order t^alpha: the sum
    sum_k (1 - e^{-(k+1)t})^2 (k+1)^{-2 alpha - 1} behaves like
    t^{2 alpha} times a positive constant, so every probe is O(t^alpha)
    and no better.
    """
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if k_max < 64:
        raise DomainError(f"k_max must be at least 64, got {k_max}")
    k = np.arange(k_max + 1)
    c = np.zeros((k_max + 1) ** 2, dtype=complex)
    c[k * k + k] = (k + 1.0) ** (-alpha - 0.5)
    return SphericalSpectrum(k_max, c)


@dataclass(frozen=True, eq=False)
class BatteryReport:
    spec: ProblemSpec
    reports: dict[str, RateReport]
    pairwise_deltas: dict[str, float | None]
    identity_residual: float

    @property
    def max_pairwise_delta(self) -> float | None:
        defined = [d for d in self.pairwise_deltas.values() if d is not None]
        return max(defined) if defined else None

    def to_dict(self) -> dict:
        return {
            "problem": self.spec.kind.value,
            "probes": {w: r.to_dict() for w, r in self.reports.items()},
            "pairwise_deltas": self.pairwise_deltas,
            "max_pairwise_delta": self.max_pairwise_delta,
            "identity_residual": self.identity_residual,
        }


def equivalence_battery(spec: ProblemSpec, h: SphericalSpectrum, grid: np.ndarray | None = None) -> BatteryReport:
    """Run all five probes on one rate grid and compare their slopes.

    Also checks the exact identity
    ``||lambda R(lambda; A^-1) h|| = ||h - lambda^-1 R(lambda^-1; A) h||``
    at every grid point; ``identity_residual`` is the largest norm of the
    difference of the two sides, relative to ||h||.
    """
    grid = rate_grid() if grid is None else np.asarray(grid, dtype=float)
    energy = h.degree_energy()
    spec = spec.with_k_max(max(spec.k_max, h.k_max))
    reports = {w: measure(RateProbe(w, spec, h, grid), energy) for w in PROBES}

    deltas = {}
    for i, a in enumerate(PROBES):
        for b in PROBES[i + 1 :]:
            ra, rb = reports[a], reports[b]
            deltas[f"{a}-{b}"] = abs(ra.slope - rb.slope) if ra.defined and rb.defined else None

    hnorm = math.sqrt(float(energy.sum()))
    worst = 0.0
    for lam in grid:
        diff = ops.abel_mean(spec, "A_inverse", lam) - (1.0 - ops.abel_mean(spec, "A", 1.0 / lam))
        worst = max(worst, diff.norm_of(energy))
    residual = worst / hnorm if hnorm > 0 else 0.0
    return BatteryReport(spec, reports, deltas, residual)
