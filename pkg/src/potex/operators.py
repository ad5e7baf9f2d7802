"""Mode-wise operator calculus for the exterior boundary problems.

Every operator here commutes with rotations about the sphere's centre, so it
acts on a spectrum by multiplying all coefficients of degree k by one number
sigma_k.  With ``r = e^t`` and ``c = 1`` (Dirichlet) or ``c = 2`` (Neumann):

==========================  =====================================
generator A                 -(k + c)
semigroup T(t)              exp(-(k + c) t)
inverse generator A^-1      -1 / (k + c)
semigroup of A^-1           exp(-t / (k + c))
resolvent R(lam; A)         1 / (lam + k + c)
resolvent R(lam; A^-1)      (k + c) / (lam (k + c) + 1)
Abel mean                   lam * resolvent
ergodic mean at radius r    (k + c) (1 - r^{-1/(k+c)}) / log r
==========================  =====================================

The Robin boundary trace ``a w + b dw/dr`` at ``r = e^t`` is also diagonal
but is not a semigroup; ``semigroup_defect`` measures by how much.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import (
    AdmissibilityError,
    DomainError,
    TruncationMismatchError,
    UnsupportedProblemError,
)
from .sphharm import SphericalSpectrum, parseval_norm

__all__ = [
    "ProblemKind",
    "ProblemSpec",
    "DiagonalOperator",
    "KFunctionalResult",
    "generator",
    "semigroup",
    "inverse_generator",
    "inverse_semigroup",
    "resolvent",
    "abel_mean",
    "ergodic_mean",
    "robin_trace",
    "trace_family",
    "semigroup_defect",
    "interconnection_residual",
    "k_functional",
    "quadratic_k_functional",
]

ADMISSIBILITY_RTOL = 1e-12


class ProblemKind(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    ROBIN = "robin"


@dataclass(frozen=True)
class ProblemSpec:
    """A boundary problem on the exterior of the unit ball, truncated at ``k_max``.

    For Robin problems ``a`` and ``b`` are the coefficients of the boundary
    condition ``a w + b dw/dr = h``.  Dirichlet and Neumann fix them to
    ``(1, 0)`` and ``(0, 1)``.
    """

    kind: ProblemKind
    k_max: int
    a: float | None = None
    b: float | None = None

    def __post_init__(self):
        kind = ProblemKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if int(self.k_max) != self.k_max or self.k_max < 0:
            raise DomainError(f"k_max must be a non-negative integer, got {self.k_max}")
        object.__setattr__(self, "k_max", int(self.k_max))
        if kind is ProblemKind.ROBIN:
            if self.a is None or self.b is None:
                raise ValueError("a Robin problem needs both coefficients a and b")
            object.__setattr__(self, "a", float(self.a))
            object.__setattr__(self, "b", float(self.b))
            self._check_admissible()
        else:
            fixed = (1.0, 0.0) if kind is ProblemKind.DIRICHLET else (0.0, 1.0)
            object.__setattr__(self, "a", fixed[0])
            object.__setattr__(self, "b", fixed[1])

    @classmethod
    def dirichlet(cls, k_max: int) -> ProblemSpec:
        return cls(ProblemKind.DIRICHLET, k_max)

    @classmethod
    def neumann(cls, k_max: int) -> ProblemSpec:
        return cls(ProblemKind.NEUMANN, k_max)

    @classmethod
    def robin(cls, a: float, b: float, k_max: int) -> ProblemSpec:
        return cls(ProblemKind.ROBIN, k_max, a, b)

    def _check_admissible(self):
        kp1 = np.arange(1, self.k_max + 2, dtype=float)
        den = self.a - self.b * kp1
        bad = np.abs(den) <= ADMISSIBILITY_RTOL * (abs(self.a) + abs(self.b) * kp1)
        if np.any(bad):
            k = int(np.argmax(bad))
            raise AdmissibilityError(
                f"Robin denominator a - b(k+1) = {self.a} - {self.b}*{k + 1} vanishes at k={k}"
            )

    @property
    def offset(self) -> int:
        """The c in the generator multipliers -(k + c)."""
        if self.kind is ProblemKind.DIRICHLET:
            return 1
        if self.kind is ProblemKind.NEUMANN:
            return 2
        raise UnsupportedProblemError(
            "the Robin trace family is not a semigroup and has no infinitesimal generator"
        )

    def shifted_degrees(self) -> np.ndarray:
        """k + c for k = 0..k_max."""
        return np.arange(self.k_max + 1, dtype=float) + self.offset

    def robin_denominators(self) -> np.ndarray:
        return self.a - self.b * np.arange(1, self.k_max + 2, dtype=float)

    def with_k_max(self, k_max: int) -> ProblemSpec:
        return ProblemSpec(self.kind, k_max, self.a, self.b)


@dataclass(frozen=True, eq=False)
class DiagonalOperator:
    """Multiplier sequence sigma_k acting on every order m of degree k."""

    multipliers: np.ndarray

    def __post_init__(self):
        m = np.array(self.multipliers)
        if m.ndim != 1 or m.size == 0:
            raise ValueError("multipliers must be a non-empty 1-D sequence")
        if not np.iscomplexobj(m):
            m = m.astype(float)
        m.setflags(write=False)
        object.__setattr__(self, "multipliers", m)

    @property
    def k_max(self) -> int:
        return self.multipliers.size - 1

    def __getitem__(self, k: int):
        return self.multipliers[k]

    def expanded(self, k_max: int | None = None) -> np.ndarray:
        """Multipliers repeated over orders, aligned with the packed spectrum layout."""
        k_max = self.k_max if k_max is None else k_max
        return np.repeat(self.multipliers[: k_max + 1], 2 * np.arange(k_max + 1) + 1)

    def apply(self, spec: SphericalSpectrum) -> SphericalSpectrum:
        if spec.k_max > self.k_max:
            raise TruncationMismatchError(
                f"spectrum degree {spec.k_max} exceeds operator degree {self.k_max}"
            )
        return SphericalSpectrum(spec.k_max, spec.coeffs * self.expanded(spec.k_max))

    __call__ = apply

    def norm(self) -> float:
        """Operator norm on the truncated space, max_k |sigma_k|."""
        return float(np.max(np.abs(self.multipliers)))

    def norm_of(self, energy: np.ndarray) -> float:
        """``parseval_norm(self.apply(h))`` from the degree energies of h."""
        return float(np.sqrt(np.sum(energy * np.abs(self.multipliers[: energy.size]) ** 2)))

    def _other(self, other):
        if isinstance(other, DiagonalOperator):
            if other.k_max != self.k_max:
                raise TruncationMismatchError("operators have different truncation degrees")
            return other.multipliers
        return other

    def __matmul__(self, other):
        if not isinstance(other, DiagonalOperator):
            return NotImplemented
        return DiagonalOperator(self.multipliers * self._other(other))

    def __add__(self, other):
        return DiagonalOperator(self.multipliers + self._other(other))

    def __sub__(self, other):
        return DiagonalOperator(self.multipliers - self._other(other))

    def __rsub__(self, other):
        return DiagonalOperator(self._other(other) - self.multipliers)

    def __mul__(self, scalar):
        if isinstance(scalar, DiagonalOperator):
            return NotImplemented
        return DiagonalOperator(self.multipliers * scalar)

    __rmul__ = __mul__

    @classmethod
    def identity(cls, k_max: int) -> DiagonalOperator:
        return cls(np.ones(k_max + 1))


def _which(which: str) -> str:
    w = str(which).lower().replace("-", "_").replace("^", "")
    if w == "a":
        return "A"
    if w in ("a_inverse", "ainv", "a_inv", "a_1"):
        return "A_inverse"
    raise ValueError(f"unknown operator {which!r}; expected 'A' or 'A_inverse'")


def _check_lambda(lam: float):
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")


def generator(spec: ProblemSpec) -> DiagonalOperator:
    return DiagonalOperator(-spec.shifted_degrees())


def semigroup(spec: ProblemSpec, t: float) -> DiagonalOperator:
    """Boundary trace semigroup: the field (Dirichlet) or its radial derivative (Neumann) at r = e^t."""
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    return DiagonalOperator(np.exp(-spec.shifted_degrees() * t))


def inverse_generator(spec: ProblemSpec) -> DiagonalOperator:
    return DiagonalOperator(-1.0 / spec.shifted_degrees())


def inverse_semigroup(spec: ProblemSpec, t: float) -> DiagonalOperator:
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    return DiagonalOperator(np.exp(-t / spec.shifted_degrees()))


def resolvent(spec: ProblemSpec, which: str, lam: float) -> DiagonalOperator:
    """R(lam; A) or R(lam; A^-1) for real lam > 0."""
    _check_lambda(lam)
    kc = spec.shifted_degrees()
    if _which(which) == "A":
        return DiagonalOperator(1.0 / (lam + kc))
    return DiagonalOperator(kc / (lam * kc + 1.0))


def abel_mean(spec: ProblemSpec, which: str, lam: float) -> DiagonalOperator:
    """lam R(lam; .), which tends to the identity (A) or to zero (A^-1)."""
    _check_lambda(lam)
    kc = spec.shifted_degrees()
    if _which(which) == "A":
        return DiagonalOperator(lam / (lam + kc))
    # lam (k+c) / (lam (k+c) + 1), written to stay accurate for tiny lam
    x = lam * kc
    return DiagonalOperator(x / (x + 1.0))


def ergodic_mean(spec: ProblemSpec, r: float | None = None, *, log_r: float | None = None) -> DiagonalOperator:
    """Logarithmic mean (1/log r) int_1^r V(log rho) drho/rho of the A^-1 semigroup.

    Pass ``log_r`` instead of ``r`` for radii beyond floating-point range.
    """
    if (r is None) == (log_r is None):
        raise TypeError("give exactly one of r or log_r")
    L = math.log(r) if log_r is None else float(log_r)
    if r is not None and not r > 1:
        raise DomainError(f"r must exceed 1, got {r}")
    if not L > 0:
        raise DomainError(f"log r must be positive, got {L}")
    kc = spec.shifted_degrees()
    return DiagonalOperator(-kc * np.expm1(-L / kc) / L)


def robin_trace(spec: ProblemSpec, t: float) -> DiagonalOperator:
    """Multipliers of the Robin boundary trace a w + b dw/dr at r = e^t."""
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    kp1 = np.arange(1, spec.k_max + 2, dtype=float)
    num = spec.a * np.exp(-kp1 * t) - spec.b * kp1 * np.exp(-(kp1 + 1) * t)
    return DiagonalOperator(num / spec.robin_denominators())


def trace_family(spec: ProblemSpec, t: float) -> DiagonalOperator:
    """The boundary trace at r = e^t for any problem kind."""
    if spec.kind is ProblemKind.ROBIN:
        return robin_trace(spec, t)
    return semigroup(spec, t)


def semigroup_defect(spec: ProblemSpec, s: float, t: float, family: str = "trace") -> float:
    """max_k |sigma_k(s) sigma_k(t) - sigma_k(s + t)|.

    ``family`` is ``"trace"`` (the boundary trace of the problem, Robin
    included) or ``"inverse"`` (the semigroup generated by A^-1).
    """
    if family == "trace":
        op = lambda x: trace_family(spec, x)  # noqa: E731
    elif family == "inverse":
        op = lambda x: inverse_semigroup(spec, x)  # noqa: E731
    else:
        raise ValueError(f"unknown family {family!r}")
    return (op(s) @ op(t) - op(s + t)).norm()


def interconnection_residual(spec: ProblemSpec, lam: float, h: SphericalSpectrum) -> float:
    """Norm of lam R(lam; A^-1) h - h + lam^-1 R(lam^-1; A) h, which vanishes identically."""
    spec = spec if h.k_max <= spec.k_max else spec.with_k_max(h.k_max)
    lhs = abel_mean(spec, "A_inverse", lam).apply(h)
    rhs = h - abel_mean(spec, "A", 1.0 / lam).apply(h)
    return parseval_norm(lhs - rhs)


@dataclass(frozen=True, eq=False)
class KFunctionalResult:
    t: float
    quadratic_k: float
    upper_k: float
    minimizer_multiplier: DiagonalOperator


def quadratic_k_functional(energy: np.ndarray, mu: np.ndarray, t: float) -> float:
    """sqrt(inf_g ||h - g||^2 + t^2 ||A g||^2) from degree energies of h and |sigma_k(A)|."""
    x = (t * mu[: energy.size]) ** 2
    return float(np.sqrt(np.sum(energy * x / (1.0 + x))))


def _sum_form(energy, mu, t, c):
    # ||h - g_c|| + t ||A g_c|| with g_c = h / (1 + c mu^2); c = inf means g = 0
    if math.isinf(c):
        return float(np.sqrt(energy.sum())), np.zeros_like(mu)
    sig = 1.0 / (1.0 + c * mu * mu)
    val = np.sqrt(np.sum(energy * (1 - sig) ** 2)) + t * np.sqrt(np.sum(energy * (mu * sig) ** 2))
    return float(val), sig


def _golden_section(f, lo: float, hi: float, tol: float = 1e-10, max_iter: int = 200) -> float:
    invphi = (math.sqrt(5) - 1) / 2
    x1, x2 = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo < tol:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
    return x1 if f1 <= f2 else x2


def k_functional(spec: ProblemSpec, h: SphericalSpectrum, t: float) -> KFunctionalResult:
    """Two-sided estimate of K(t, h; L2(S), D(A)).

    ``quadratic_k`` is the exact infimum of the quadratic form
    ``sqrt(||h - g||^2 + t^2 ||A g||^2)``; ``upper_k`` is the best value of
    ``||h - g|| + t ||A g||`` over ``g = h / (1 + c mu_k^2)``, c in [0, inf],
    found by golden-section search in log c plus the endpoints and c = t^2.
    Since the quadratic minimizer is the member c = t^2,
    ``quadratic_k <= K <= upper_k <= sqrt(2) quadratic_k``.
    """
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    if h.k_max > spec.k_max:
        raise TruncationMismatchError(f"spectrum degree {h.k_max} exceeds problem degree {spec.k_max}")
    mu = np.abs(generator(spec).multipliers)[: h.k_max + 1]
    energy = h.degree_energy()
    quad = quadratic_k_functional(energy, mu, t)

    candidates = [_sum_form(energy, mu, t, c) for c in (0.0, t * t, math.inf)]
    active = mu[energy > 0]
    if active.size:
        lo = -2 * math.log(active.max()) - 16.0
        hi = -2 * math.log(active.min()) + 16.0
        u = _golden_section(lambda u: _sum_form(energy, mu, t, math.exp(u))[0], lo, hi)
        candidates.append(_sum_form(energy, mu, t, math.exp(u)))
    upper, sig = min(candidates, key=lambda p: p[0])
    full = np.zeros(spec.k_max + 1)
    full[: sig.size] = sig
    return KFunctionalResult(float(t), quad, upper, DiagonalOperator(full))
