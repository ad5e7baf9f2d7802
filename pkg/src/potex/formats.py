"""Readers and writers for spectra (JSON) and grid/field/rate tables (CSV)."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .exceptions import GridTooCoarseError
from .sphharm import GridSamples, SphericalSpectrum, make_grid


def spectrum_to_dict(spec: SphericalSpectrum) -> dict:
    """JSON-ready dict; zero coefficients are omitted."""
    rows = [
        {"k": int(k), "m": int(m), "re": float(c.real), "im": float(c.imag)}
        for k, m, c in zip(spec.degrees, spec.orders, spec.coeffs)
        if c != 0
    ]
    return {"k_max": spec.k_max, "coeffs": rows}


def spectrum_from_dict(data: dict) -> SphericalSpectrum:
    try:
        k_max = int(data["k_max"])
        modes = {}
        for row in data.get("coeffs", []):
            key = (int(row["k"]), int(row["m"]))
            modes[key] = modes.get(key, 0) + complex(float(row.get("re", 0.0)), float(row.get("im", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed spectrum document: {exc}") from exc
    return SphericalSpectrum.from_modes(k_max, modes)


def read_spectrum(path) -> SphericalSpectrum:
    with open(path) as fh:
        return spectrum_from_dict(json.load(fh))


def write_spectrum(spec: SphericalSpectrum, path) -> None:
    Path(path).write_text(json.dumps(spectrum_to_dict(spec), indent=1) + "\n")


def write_samples(samples: GridSamples, path) -> None:
    """CSV with header ``phi,theta,re,im``, row-major in (phi, theta)."""
    phi, theta = samples.grid.mesh()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["phi", "theta", "re", "im"])
        for p, t, v in zip(phi.ravel(), theta.ravel(), samples.values.ravel()):
            w.writerow([repr(float(p)), repr(float(t)), repr(float(v.real)), repr(float(v.imag))])


def read_samples(path) -> GridSamples:
    """Read a samples CSV written on a ``make_grid`` grid."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    phi, theta = data[:, 0], data[:, 1]
    n_phi = np.unique(phi).size
    n_theta = data.shape[0] // max(n_phi, 1)
    grid = make_grid(n_phi - 1)
    if (
        n_phi * n_theta != data.shape[0]
        or n_theta != grid.n_theta
        or not np.allclose(phi.reshape(n_phi, n_theta)[:, 0], grid.phi_nodes, atol=1e-12)
        or not np.allclose(theta[:n_theta], grid.theta_nodes, atol=1e-12)
    ):
        raise GridTooCoarseError(f"{path}: samples are not on a standard Gauss-Legendre grid")
    return GridSamples(grid, data[:, 2] + 1j * data[:, 3])


def write_field(rows, path) -> None:
    """CSV with header ``phi,theta,r,re,im`` from (grid samples, r) pairs."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["phi", "theta", "r", "re", "im"])
        for samples, r in rows:
            phi, theta = samples.grid.mesh()
            for p, t, v in zip(phi.ravel(), theta.ravel(), samples.values.ravel()):
                w.writerow([repr(float(p)), repr(float(t)), repr(float(r)), repr(float(v.real)), repr(float(v.imag))])


def write_rate(report, path) -> None:
    """CSV with header ``param,norm``, one row per grid point."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["param", "norm"])
        for p, n in report.samples:
            w.writerow([repr(p), repr(n)])

