"""Maximizing the Van Trees information over measurements.

Two routes: a scan plus golden-section refinement over the two-outcome
projector family, and a Monte-Carlo search over Haar-random projective
measurements in an enlarged space followed by random downhill refinement.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .hilbert import CoherentModel, phase_states
from .infotheory import family_fisher, fisher_rows, restricted_likelihood_term
from .povm import Povm, haar_unitary, povm_from_basis, validate
from .priors import PriorGrid, prior_fisher, theta_grid

logger = logging.getLogger(__name__)

SCAN_POINTS = 720
EPS_TOL = 1e-6
DEFAULT_BUDGET = 2000
MAX_EXTRA_DIM = 8
DIM_RTOL = 5e-3
REFINE_STEP = 0.1
REFINE_MIN_STEP = 1e-4
REFINE_TRIES = 8
REFINE_GROWTH = 2.0
REFINE_MAX_EVALS = 20000
_BATCH = 64
_INVPHI = (np.sqrt(5) - 1) / 2


@dataclass
class OptimizationReport:
    best_value: float
    prior_term: float
    samples_used: int
    converged: bool = True
    best_epsilon: float | None = None
    best_povm: Povm | None = None
    dimension_trace: list = field(default_factory=list)
    refine_trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "best_value": self.best_value,
            "prior_term": self.prior_term,
            "samples_used": self.samples_used,
            "converged": self.converged,
            "best_epsilon": self.best_epsilon,
            "dimension_trace": [[int(D), float(v)] for D, v in self.dimension_trace],
            "refine_trace": [float(v) for v in self.refine_trace],
            "best_povm": None,
        }
        if self.best_povm is not None:
            out["best_povm"] = {
                "labels": list(self.best_povm.labels),
                "elements": [
                    [[[float(z.real), float(z.imag)] for z in row] for row in e]
                    for e in self.best_povm.elements
                ],
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def golden_section_max(f, lo: float, hi: float, tol: float = EPS_TOL):
    """Maximize a unimodal ``f`` on [lo, hi]; returns (x, f(x), evaluations)."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        evals += 1
    x = (a + b) / 2
    return x, f(x), evals + 1


class RestrictedSearch:
    """Scan-and-refine optimizer over the projector family for a fixed grid.

    The scan kernel F(theta_i, eps_j) depends only on the model and the two
    grids, so it is built once and reused for every prior on the same grid.
    """

    def __init__(self, model, m: int, scan_points: int = SCAN_POINTS, tol: float = EPS_TOL):
        self.model = model
        self.tol = tol
        self.eps = 2 * np.pi * np.arange(scan_points) / scan_points
        self.kernel = family_fisher(model, theta_grid(m)[None, :], self.eps[:, None])

    def __call__(self, prior: PriorGrid) -> OptimizationReport:
        if prior.size != self.kernel.shape[1]:
            raise ValueError("prior grid does not match the scan kernel")
        values = prior.spacing * (self.kernel @ prior.density)
        k = int(np.argmax(values))
        h = 2 * np.pi / self.eps.size

        def objective(e):
            return restricted_likelihood_term(self.model, prior, e)

        x, fx, evals = golden_section_max(objective, self.eps[k] - h, self.eps[k] + h, self.tol)
        if fx >= values[k]:
            best_eps, best = x % (2 * np.pi), fx
        else:
            best_eps, best = self.eps[k], float(values[k])
        term = prior_fisher(prior)
        return OptimizationReport(
            best_value=best + term,
            prior_term=term,
            samples_used=self.eps.size + evals,
            best_epsilon=float(best_eps),
        )


def optimize_restricted(model, prior: PriorGrid, scan_points: int = SCAN_POINTS,
                        tol: float = EPS_TOL) -> OptimizationReport:
    """Best member of the projector family for ``prior``.

    Scans eps on a uniform grid of [0, 2 pi), then refines the best grid point
    by golden-section search to ``tol``.
    """
    return RestrictedSearch(model, prior.size, scan_points, tol)(prior)


class _RankOneObjective:
    """Prior-averaged Fisher information of the POVM induced by a basis V.

    Outcome k has amplitude <v_k|psi(theta)> restricted to the physical block,
    so all grid points and outcomes are evaluated with two matrix products.
    """

    def __init__(self, model: CoherentModel, prior: PriorGrid):
        self.d = model.dim
        self.psi, self.dpsi = phase_states(model, prior.thetas)
        self.weights = prior.spacing * prior.density

    def __call__(self, bases: np.ndarray) -> np.ndarray:
        """``bases`` has shape (batch, D, D); returns one value per basis."""
        top = bases[:, : self.d, :].conj()
        amp = self.psi @ top
        damp = self.dpsi @ top
        probs = amp.real**2 + amp.imag**2
        dprobs = 2 * (amp.real * damp.real + amp.imag * damp.imag)
        return fisher_rows(probs, dprobs) @ self.weights


def _substream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), *key])


def _random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = (z + z.conj().T) / 2
    return h / np.linalg.norm(h)


def refine_basis(objective, basis: np.ndarray, value: float, seed: int,
                 max_evals: int = REFINE_MAX_EVALS, step: float = REFINE_STEP,
                 min_step: float = REFINE_MIN_STEP, tries: int = REFINE_TRIES,
                 growth: float = REFINE_GROWTH):
    """Random downhill search on U(D): V <- exp(i step H) V for random unit-norm H.

    Only improvements are accepted. The step grows by ``growth`` after a
    success and is halved after ``tries`` consecutive failures; the search
    ends when it drops below ``min_step``. Returns (basis, value, evals, trace).
    """
    rng = _substream(seed, 7919)
    n = basis.shape[0]
    trace = [value]
    evals = 0
    failures = 0
    while step >= min_step and evals < max_evals:
        trial = expm(1j * step * _random_hermitian(n, rng)) @ basis
        v = float(objective(trial[None])[0])
        evals += 1
        if v > value:
            basis, value = trial, v
            trace.append(value)
            step = min(step * growth, np.pi)
            failures = 0
        else:
            failures += 1
            if failures >= tries:
                step /= 2
                failures = 0
    return basis, value, evals, trace


def optimize_montecarlo(model: CoherentModel, prior: PriorGrid, budget: int = DEFAULT_BUDGET,
                        seed: int = 0, max_extra_dim: int = MAX_EXTRA_DIM,
                        refine: bool = True, refine_evals: int | None = None) -> OptimizationReport:
    """Monte-Carlo estimate of the quantum Van Trees information.

    For D = d, d+1, ... draws ``budget`` Haar-random bases of C^D, each from
    its own seeded substream, and keeps the best induced POVM. The sweep stops
    once enlarging D raises the best value found so far by less than a
    relative 5e-3. The overall best basis is then polished by
    :func:`refine_basis`.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    objective = _RankOneObjective(model, prior)
    term = prior_fisher(prior)
    d = model.dim
    trace = []
    best_value, best_basis = -np.inf, None
    converged = False
    used = 0
    for D in range(d, d + max_extra_dim + 1):
        best_here, basis_here = -np.inf, None
        for start in range(0, budget, _BATCH):
            idx = range(start, min(start + _BATCH, budget))
            bases = np.stack([haar_unitary(D, _substream(seed, D, i)) for i in idx])
            vals = objective(bases)
            j = int(np.argmax(vals))
            if vals[j] > best_here:
                best_here, basis_here = float(vals[j]), bases[j]
        used += budget
        trace.append((D, best_here + term))
        logger.debug("D=%d best=%.6g", D, best_here + term)
        if best_basis is not None and best_here - best_value < DIM_RTOL * abs(best_value + term):
            converged = True
        if best_here > best_value:
            best_value, best_basis = best_here, basis_here
        if converged:
            break
    refine_trace = []
    if refine:
        cap = REFINE_MAX_EVALS if refine_evals is None else refine_evals
        best_basis, best_value, evals, refine_trace = refine_basis(
            objective, best_basis, best_value, seed, cap)
        used += evals
        refine_trace = [v + term for v in refine_trace]
    povm = validate(povm_from_basis(best_basis, d))
    return OptimizationReport(
        best_value=best_value + term,
        prior_term=term,
        samples_used=used,
        converged=converged,
        best_povm=povm,
        dimension_trace=trace,
        refine_trace=refine_trace,
    )
