"""Priors and posteriors on a uniform theta grid over [-pi, pi).

Integrals use the periodic trapezoid rule, ``spacing * sum(values)``. For
moments the point -pi also stands for +pi and is split between the two, which
keeps the linear mean of an even density exactly zero.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

DEFAULT_GRID = 2048
NORM_TOL = 1e-8
TAIL_GUARD = 1e-15
MIN_NORMALIZER = 1e-300


class DegeneratePosterior(ArithmeticError):
    """The observed outcome has zero probability under the prior."""


def theta_grid(m: int) -> np.ndarray:
    return -np.pi + 2 * np.pi * np.arange(m) / m


@dataclass(frozen=True)
class PriorGrid:
    """Density on ``theta_grid(M)``.

    ``periodic`` marks densities that live on the circle (flat priors and
    their posteriors); it only affects how derivatives are taken at the edges.
    """

    density: np.ndarray
    periodic: bool = False

    def __post_init__(self):
        density = np.array(self.density, dtype=float)
        if density.ndim != 1 or density.size < 2:
            raise ValueError("density must be a 1-d array with at least 2 points")
        if np.any(density < 0) or not np.all(np.isfinite(density)):
            raise ValueError("density must be finite and non-negative")
        mass = density.sum() * 2 * np.pi / density.size
        if abs(mass - 1) > NORM_TOL:
            raise ValueError(f"density integrates to {mass!r}, not 1")
        density.setflags(write=False)
        object.__setattr__(self, "density", density)

    @classmethod
    def from_weights(cls, weights, periodic: bool = False) -> "PriorGrid":
        """Normalize arbitrary non-negative grid values into a density."""
        w = np.asarray(weights, dtype=float)
        total = w.sum() * 2 * np.pi / w.size
        if not total > 0:
            raise ValueError("weights have zero mass")
        return cls(w / total, periodic)

    @property
    def size(self) -> int:
        return self.density.size

    @property
    def spacing(self) -> float:
        return 2 * np.pi / self.size

    @property
    def thetas(self) -> np.ndarray:
        return theta_grid(self.size)

    def integrate(self, values) -> float:
        """Integral of ``values * density`` over the grid."""
        return float(self.spacing * np.sum(np.asarray(values) * self.density))

    def expect(self, g) -> float:
        """E[g(theta)] with the -pi sample shared between both interval ends."""
        th = self.thetas
        vals = np.asarray(g(th), dtype=float) * self.density
        vals[0] = 0.5 * (g(np.array([-np.pi]))[0] + g(np.array([np.pi]))[0]) * self.density[0]
        return float(self.spacing * vals.sum())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "density"])
        for t, p in zip(self.thetas, self.density):
            w.writerow([repr(float(t)), repr(float(p))])
        return buf.getvalue()


def gaussian_prior(sigma: float, m: int = DEFAULT_GRID) -> PriorGrid:
    """Gaussian of width ``sigma`` centred at 0, cut at +-pi (not wrapped)."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    th = theta_grid(m)
    return PriorGrid.from_weights(np.exp(-th**2 / (2 * sigma**2)), periodic=False)


def flat_prior(m: int = DEFAULT_GRID) -> PriorGrid:
    if m < 2:
        raise ValueError("grid needs at least 2 points")
    return PriorGrid(np.full(m, 1 / (2 * np.pi)), periodic=True)


def bayes_update(prior: PriorGrid, likelihood) -> PriorGrid:
    """Posterior proportional to ``likelihood * prior`` on the same grid."""
    lik = np.asarray(likelihood, dtype=float)
    if lik.shape != prior.density.shape:
        raise ValueError("likelihood must be sampled on the prior grid")
    if np.any(lik < 0):
        raise ValueError("likelihood must be non-negative")
    norm = prior.integrate(lik)
    if not norm > MIN_NORMALIZER:
        raise DegeneratePosterior(f"outcome has probability {norm!r} under the prior")
    return PriorGrid(lik * prior.density / norm, prior.periodic)


def marginal_probability(prior: PriorGrid, likelihood) -> float:
    """Predictive probability of an outcome: integral of p(xi|theta) lambda(theta)."""
    return prior.integrate(likelihood)


def posterior_mean_and_risk(prior: PriorGrid) -> tuple[float, float]:
    """Linear posterior mean on [-pi, pi) and the variance about it."""
    mean = prior.expect(lambda t: t)
    var = prior.expect(lambda t: (t - mean) ** 2)
    return mean, var


def _derivative(density: np.ndarray, h: float, periodic: bool) -> np.ndarray:
    if periodic:
        return (np.roll(density, -1) - np.roll(density, 1)) / (2 * h)
    return np.gradient(density, h, edge_order=2)


def prior_fisher(prior: PriorGrid) -> float:
    """Integral of (lambda')^2 / lambda with central differences.

    Points where the density falls below 1e-15 of its maximum are skipped.
    """
    lam = prior.density
    dlam = _derivative(lam, prior.spacing, prior.periodic)
    keep = lam > TAIL_GUARD * lam.max()
    return float(prior.spacing * np.sum(dlam[keep] ** 2 / lam[keep]))
