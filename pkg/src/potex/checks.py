"""Self-verification suites run by ``potex verify``.

Every suite returns a list of ``Check`` records.  All randomness is drawn
from one ``numpy.random.Generator`` seeded by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import operators as ops
from . import rates, solvers
from .operators import ProblemSpec
from .sphharm import (
    SphericalSpectrum,
    analyze,
    grid_norm,
    make_grid,
    parseval_norm,
    synthesize,
)

DEFAULT_TOLERANCES = {
    "orthonormality": 1e-12,
    "roundtrip": 1e-12,
    "parseval": 1e-11,
    "semigroup": 1e-14,
    "robin_defect": 1e-2,
    "interconnection": 1e-13,
    "resolvent": 1e-8,
    "k_sandwich": math.sqrt(2),
    "harmonicity": 0.5,
    "boundary": 1e-12,
    "rates_slope": 0.07,
    "rates_pairwise": 0.1,
    "rates_domain": 0.02,
}


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float
    note: str = ""

    def to_dict(self) -> dict:
        d = {"pass": bool(self.passed), "measured": float(self.measured), "tolerance": float(self.tolerance)}
        if self.note:
            d["note"] = self.note
        return d


def random_spectrum(rng: np.random.Generator, k_max: int) -> SphericalSpectrum:
    n = (k_max + 1) ** 2
    return SphericalSpectrum(k_max, rng.standard_normal(n) + 1j * rng.standard_normal(n))


def _both(k_max):
    return (ProblemSpec.dirichlet(k_max), ProblemSpec.neumann(k_max))


def check_orthonormality(k_max, rng, tol):
    grid = make_grid(2 * k_max)
    n = (k_max + 1) ** 2
    basis = np.stack([synthesize(SphericalSpectrum(k_max, np.eye(n)[i]), grid).values.ravel() for i in range(n)])
    w = grid.area_weights().ravel()
    gram = (basis * w) @ basis.conj().T
    err = float(np.max(np.abs(gram - np.eye(n))))
    return [Check("orthonormality", err <= tol, err, tol, f"k <= {k_max} on make_grid({2 * k_max})")]


def check_roundtrip(k_max, rng, tol, trials=50):
    grid = make_grid(k_max)
    err = 0.0
    for _ in range(trials):
        s = random_spectrum(rng, k_max)
        err = max(err, float(np.max(np.abs(analyze(synthesize(s, grid), k_max).coeffs - s.coeffs))))
    return [Check("roundtrip", err <= tol, err, tol, f"{trials} random spectra")]


def check_parseval(k_max, rng, tol, trials=20):
    grid = make_grid(k_max)
    err = 0.0
    for _ in range(trials):
        s = random_spectrum(rng, k_max)
        p = parseval_norm(s)
        err = max(err, abs(p - grid_norm(synthesize(s, grid))) / p)
    return [Check("parseval", err <= tol, err, tol, "relative")]


def check_semigroup(k_max, rng, tol):
    st = np.linspace(0.0, 5.0, 10)
    out = []
    for spec in _both(k_max):
        for family in ("trace", "inverse"):
            worst = max(ops.semigroup_defect(spec, s, t, family) for s in st for t in st)
            out.append(Check(f"semigroup_{spec.kind.value}_{family}", worst <= tol, worst, tol))
    return out


def check_robin_defect(a, b, tol):
    spec = ProblemSpec.robin(a, b, 0)
    d = ops.semigroup_defect(spec, math.log(2), math.log(2))
    # inverted convention: a large defect confirms the family is not a semigroup
    return [Check("robin_defect", d >= tol, d, tol, "pass means defect >= tolerance; (s,t)=(ln2,ln2), k_max=0")]


def check_interconnection(k_max, rng, tol, trials=100):
    out = []
    lams = np.geomspace(1e-3, 1e3, trials)
    for spec in _both(k_max):
        worst = 0.0
        for lam in lams:
            h = random_spectrum(rng, k_max)
            worst = max(worst, ops.interconnection_residual(spec, lam, h) / parseval_norm(h))
        out.append(Check(f"interconnection_{spec.kind.value}", worst <= tol, worst, tol, "relative to ||h||"))
    return out


def check_resolvent(k_max, rng, tol):
    kk = min(k_max, 8)
    out = []
    for spec in _both(kk):
        worst = 0.0
        for lam in (0.5, 1.0, 2.0):
            for which, fam in (("A", ops.semigroup), ("A_inverse", ops.inverse_semigroup)):
                exact = ops.resolvent(spec, which, lam).multipliers
                for k in range(kk + 1):
                    val, _ = integrate.quad(
                        lambda u: math.exp(-lam * u) * fam(spec, u)[k], 0.0, 40.0, epsabs=1e-13, epsrel=1e-13, limit=200
                    )
                    worst = max(worst, abs(val - exact[k]))
        out.append(Check(f"resolvent_{spec.kind.value}", worst <= tol, worst, tol, "quadrature over [0, 40]"))
    return out


def check_k_sandwich(k_max, rng, tol, trials=100):
    worst_ratio, ok = 0.0, True
    for i in range(trials):
        spec = _both(k_max)[i % 2]
        h = random_spectrum(rng, k_max)
        t = float(10 ** rng.uniform(-3, 1))
        res = ops.k_functional(spec, h, t)
        ok &= res.quadratic_k <= res.upper_k <= tol * res.quadratic_k
        worst_ratio = max(worst_ratio, res.upper_k / res.quadratic_k)
    return [Check("k_sandwich", ok, worst_ratio, tol, "max upper_k / quadratic_k")]


def _three_problems(k_max, a, b):
    specs = list(_both(k_max))
    try:
        specs.append(ProblemSpec.robin(a, b, k_max))
    except ops.AdmissibilityError:
        specs.append(ProblemSpec.robin(2.0, -1.0, k_max))
    return specs


def check_harmonicity(k_max, rng, tol, a=2.0, b=-1.0, r=2.0, dr=1e-2):
    kk = min(k_max, 8)
    grid = make_grid(kk)
    out = []
    for spec in _three_problems(kk, a, b):
        field = solvers.solve(spec, random_spectrum(rng, kk))
        ratio = solvers.laplace_residual(field, grid, r, dr) / solvers.laplace_residual(field, grid, r, dr / 2)
        err = abs(ratio - 4.0)
        out.append(Check(f"harmonicity_{spec.kind.value}", err <= tol, err, tol, f"|residual ratio - 4|, ratio={ratio:.4f}"))
    return out


def check_boundary(k_max, rng, tol):
    spec = ProblemSpec.dirichlet(k_max)
    worst = 0.0
    for k in range(k_max + 1):
        h = SphericalSpectrum.unit(k_max, k, 0)
        for r in (1.0 + 1e-6, 1.001, 1.1, 2.0, 10.0):
            worst = max(worst, abs(solvers.boundary_error(spec, h, r) - (1 - r ** (-(k + 1)))))
    return [Check("boundary", worst <= tol, worst, tol, "Dirichlet single-mode closed form 1 - r^-(k+1)")]


def check_rates(tol_slope, tol_pair, tol_domain, k_max=4096):
    out = []
    grid = rates.rate_grid(1e-3, 1e-1, 24)
    for alpha in (0.3, 0.5, 0.7):
        h = rates.extremal_h(alpha, k_max)
        for spec in _both(k_max):
            bat = rates.equivalence_battery(spec, h, grid)
            dev = max(abs(r.slope - alpha) for r in bat.reports.values())
            out.append(Check(f"rates_slope_{spec.kind.value}_{alpha}", dev <= tol_slope, dev, tol_slope))
            pair = bat.max_pairwise_delta
            out.append(Check(f"rates_pairwise_{spec.kind.value}_{alpha}", pair <= tol_pair, pair, tol_pair))
    fine = rates.rate_grid(1e-4, 1e-2, 24)
    h = SphericalSpectrum.from_modes(2, {(0, 0): 1.0, (1, -1): 0.5j, (2, 1): -0.25})
    for spec in _both(2):
        bat = rates.equivalence_battery(spec, h, fine)
        dev = max(abs(r.slope - 1.0) for r in bat.reports.values())
        out.append(Check(f"rates_domain_{spec.kind.value}", dev <= tol_domain, dev, tol_domain, "finite spectrum, slope 1"))
    return out


SUITES = (
    "orthonormality",
    "roundtrip",
    "parseval",
    "semigroup",
    "robin-defect",
    "interconnection",
    "resolvent",
    "k-sandwich",
    "harmonicity",
    "boundary",
    "rates",
)


def run_suite(name: str, k_max: int, rng: np.random.Generator, tol: dict, a: float = 1.0, b: float = -1.0) -> list[Check]:
    if name == "orthonormality":
        return check_orthonormality(k_max, rng, tol["orthonormality"])
    if name == "roundtrip":
        return check_roundtrip(k_max, rng, tol["roundtrip"])
    if name == "parseval":
        return check_parseval(k_max, rng, tol["parseval"])
    if name == "semigroup":
        return check_semigroup(k_max, rng, tol["semigroup"])
    if name == "robin-defect":
        return check_robin_defect(a, b, tol["robin_defect"])
    if name == "interconnection":
        return check_interconnection(k_max, rng, tol["interconnection"])
    if name == "resolvent":
        return check_resolvent(k_max, rng, tol["resolvent"])
    if name == "k-sandwich":
        return check_k_sandwich(k_max, rng, tol["k_sandwich"])
    if name == "harmonicity":
        return check_harmonicity(k_max, rng, tol["harmonicity"], a, b)
    if name == "boundary":
        return check_boundary(k_max, rng, tol["boundary"])
    if name == "rates":
        return check_rates(tol["rates_slope"], tol["rates_pairwise"], tol["rates_domain"])
    raise ValueError(f"unknown suite {name!r}")
