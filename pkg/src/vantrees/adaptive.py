"""Adaptive and repeated measurement schedules with the projector family.

Both adaptive schemes are simulated by exact enumeration of the binary
outcome tree, so the reported errors carry no sampling noise.

* Fisher-adaptive: measure with eps equal to the current maximum-likelihood
  estimate; the error is the theta_r-average of 1/I_k(theta_r), where I_k is
  the Fisher information of the 2^k leaf distribution.
* Van-Trees-adaptive: measure with the eps maximizing the Van Trees
  information of the current posterior; the error at step k is the inverse
  of the expected Z_Q over the posteriors reached after k-1 outcomes (or,
  optionally, the expected inverse).
"""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .hilbert import CoherentModel, wrap_angle
from .infotheory import family_fisher, likelihood_term, van_trees_n_copies
from .optimizer import SCAN_POINTS, RestrictedSearch, golden_section_max, optimize_restricted
from .povm import projector_family
from .priors import (
    DEFAULT_GRID,
    DegeneratePosterior,
    PriorGrid,
    bayes_update,
    flat_prior,
    theta_grid,
)

logger = logging.getLogger(__name__)

MAX_STEPS = 20
INFO_FLOOR = 1e-10
TIE_RTOL = 1e-9
DEFAULT_THETA_R = 512


@dataclass
class AdaptiveRunReport:
    scheme: str
    n: int
    error_curve: list
    tree_stats: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    fitted_constant: float | None = None

    @property
    def errors(self) -> np.ndarray:
        return np.array([e for _, e in self.error_curve])

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "n": self.n,
            "error_curve": [[int(k), float(e)] for k, e in self.error_curve],
            "tree_stats": self.tree_stats,
            "config": self.config,
            "fitted_constant": self.fitted_constant,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "error"])
        for k, e in self.error_curve:
            w.writerow([k, repr(float(e))])
        return buf.getvalue()


def _check_steps(n: int):
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_STEPS:
        raise ValueError(f"refusing to enumerate 2^{n} outcomes (limit n <= {MAX_STEPS})")


def _root_amplitudes(a: float, delta: np.ndarray):
    """sqrt p(xi|theta) and its theta-derivative for both outcomes.

    Working with r = sqrt(p) keeps dp^2/p = 4 (dr)^2 finite where the second
    outcome vanishes at theta = eps.
    """
    s = np.sin(delta / 2)
    c = np.cos(delta / 2)
    x = 4 * a * s**2
    p = np.exp(-x)
    r1 = np.exp(-x / 2)
    dr1 = -2 * a * s * c * r1
    q = -np.expm1(-x)
    r2 = np.sqrt(q)
    if a > 0:
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(q > 0, s / r2, 1 / (2 * np.sqrt(a)))
    else:
        ratio = np.zeros_like(s)
    dr2 = 2 * a * c * p * ratio
    return (r1, dr1), (r2, dr2)


def _log_likelihood(a: float, thetas, eps_seq, outcomes):
    ll = np.zeros_like(np.asarray(thetas, dtype=float))
    with np.errstate(divide="ignore"):
        for eps, xi in zip(eps_seq, outcomes):
            x = 4 * a * np.sin((thetas - eps) / 2) ** 2
            ll = ll + (-x if xi == 1 else np.log(-np.expm1(-x)))
    return ll


def ml_estimate(a: float, eps_seq, outcomes, previous: float, grid: np.ndarray) -> float:
    """Maximum-likelihood phase after ``outcomes`` measured at ``eps_seq``.

    Grid maxima within a relative 1e-9 (in likelihood) are treated as ties and
    resolved toward ``previous``; the winner is polished by golden section.
    """
    ll = _log_likelihood(a, grid, eps_seq, outcomes)
    top = ll.max()
    if not np.isfinite(top):
        return float(previous)
    tied = np.flatnonzero(ll >= top + np.log1p(-TIE_RTOL))
    dist = np.abs(wrap_angle(grid[tied] - previous))
    i = tied[np.argmin(dist)]
    h = grid[1] - grid[0]

    def f(t):
        return float(_log_likelihood(a, np.array([t]), eps_seq, outcomes)[0])

    x, fx, _ = golden_section_max(f, grid[i] - h, grid[i] + h, tol=1e-10)
    return float(wrap_angle(x)) if fx >= ll[i] else float(grid[i])


def initial_guess(mode="zero", seed: int = 0) -> float:
    """First Fisher-adaptive guess: 0, uniform on [-pi, pi) from ``seed``, or a number."""
    if mode == "zero":
        return 0.0
    if mode == "random":
        return float(np.random.default_rng(seed).uniform(-np.pi, np.pi))
    return float(wrap_angle(float(mode)))


def _theta_r(theta_grid_r) -> np.ndarray:
    if theta_grid_r is None:
        return theta_grid(DEFAULT_THETA_R)
    if np.ndim(theta_grid_r) == 0:
        return theta_grid(int(theta_grid_r))
    return np.asarray(theta_grid_r, dtype=float)


def _mean_inverse(info: np.ndarray, exclude_flagged: bool):
    """Average of 1/I over a uniform periodic theta_r sample, with flag count."""
    flagged = info < INFO_FLOOR
    if flagged.all():
        return np.inf, int(flagged.sum())
    if flagged.any() and not exclude_flagged:
        return np.inf, int(flagged.sum())
    return float(np.mean(1 / info[~flagged])), int(flagged.sum())


def _fisher_levels(a: float, n: int, th_r: np.ndarray, theta1: float, grid: np.ndarray):
    """Yield (k, leaves) for k = 1..n; a leaf is (eps history, outcomes, next eps, R, dR).

    R is the square root of the path probability at every theta_r and dR its
    theta-derivative, so the leaf contributes 4 dR^2 to I_k.
    """
    level = [((), (), theta1, np.ones_like(th_r), np.zeros_like(th_r))]
    for k in range(1, n + 1):
        children = []
        for eps_seq, outs, eps, R, dR in level:
            branches = _root_amplitudes(a, wrap_angle(th_r - eps))
            for xi, (r, dr) in zip((1, 2), branches):
                new_eps, new_outs = eps_seq + (eps,), outs + (xi,)
                nxt = ml_estimate(a, new_eps, new_outs, eps, grid) if k < n else None
                children.append((new_eps, new_outs, nxt, R * r, dR * r + R * dr))
        level = children
        yield k, level


def fisher_tree_information(model: CoherentModel, n: int, theta_r, first_guess="zero",
                            seed: int = 0, ml_grid: int = DEFAULT_GRID) -> np.ndarray:
    """I_n(theta_r) of the Fisher-adaptive outcome tree."""
    _check_steps(n)
    th_r = np.atleast_1d(np.asarray(theta_r, dtype=float))
    theta1 = initial_guess(first_guess, seed)
    for _, leaves in _fisher_levels(model.mean_photons, n, th_r, theta1, theta_grid(ml_grid)):
        pass
    return sum(4 * dR**2 for *_, dR in leaves)


def run_fisher_adaptive(model: CoherentModel, n: int, theta_grid_r=None, first_guess="zero",
                        seed: int = 0, ml_grid: int = DEFAULT_GRID,
                        exclude_flagged: bool = False) -> AdaptiveRunReport:
    """Fisher-adaptive scheme with the projector family.

    ``theta_grid_r`` is a grid size or an explicit uniform sample of
    [-pi, pi); the mean over it stands for (1/2 pi) times the integral.
    Values with I_k(theta_r) < 1e-10 are flagged and make the error infinite
    unless ``exclude_flagged``.
    """
    _check_steps(n)
    th_r = _theta_r(theta_grid_r)
    theta1 = initial_guess(first_guess, seed)
    curve, flags = [], []
    nodes = 1
    leaf_sum_err = 0.0
    for k, leaves in _fisher_levels(model.mean_photons, n, th_r, theta1, theta_grid(ml_grid)):
        nodes += len(leaves)
        info = sum(4 * dR**2 for *_, dR in leaves)
        total = sum(R**2 for *_, R, _ in leaves)
        leaf_sum_err = max(leaf_sum_err, float(np.max(np.abs(total - 1))))
        err, nflag = _mean_inverse(info, exclude_flagged)
        curve.append((k, err))
        flags.append(nflag)
    return AdaptiveRunReport(
        scheme="fisher",
        n=n,
        error_curve=curve,
        tree_stats={
            "nodes": nodes,
            "leaves": 2**n,
            "flagged_theta_r": flags,
            "max_leaf_sum_error": leaf_sum_err,
        },
        config={
            "alpha": abs(model.alpha),
            "dim": model.dim,
            "theta_r_points": int(th_r.size),
            "first_guess": theta1,
            "ml_grid": ml_grid,
            "exclude_flagged": exclude_flagged,
        },
    )


@dataclass
class _Node:
    prior: PriorGrid
    weight: float


def run_vantrees_adaptive(model: CoherentModel, n: int, prior: PriorGrid | None = None,
                          scan_points: int = SCAN_POINTS,
                          averaging: str = "process") -> AdaptiveRunReport:
    """Van-Trees-adaptive scheme, by default from a flat prior.

    Every node of depth k-1 is measured with the restricted optimum for its
    posterior. With weights w equal to the marginal probability of reaching
    a node, ``averaging="process"`` reports sigma^2(k) = 1 / sum(w Z_Q(node)),
    which is the Van Trees bound of the whole k-outcome procedure because
    the weighted posterior information at depth k-1 equals the accumulated
    information of the first k-1 measurements. ``averaging="branchwise"``
    reports sum(w / Z_Q(node)) instead. Both curves land in ``tree_stats``.
    """
    _check_steps(n)
    if averaging not in ("process", "branchwise"):
        raise ValueError(f"unknown averaging {averaging!r}")
    prior = flat_prior() if prior is None else prior
    search = RestrictedSearch(model, prior.size, scan_points)
    thetas = prior.thetas
    level = [_Node(prior, 1.0)]
    process, branchwise, epsilons = [], [], []
    resets = 0
    nodes = 0
    for k in range(1, n + 1):
        mean_info = 0.0
        mean_inverse = 0.0
        children = []
        eps_here = []
        for node in level:
            nodes += 1
            rep = search(node.prior)
            mean_info += node.weight * rep.best_value
            mean_inverse += node.weight / rep.best_value
            eps_here.append(rep.best_epsilon)
            if k == n:
                continue
            x = 4 * model.mean_photons * np.sin((thetas - rep.best_epsilon) / 2) ** 2
            for lik in (np.exp(-x), -np.expm1(-x)):
                mass = node.prior.integrate(lik)
                try:
                    post = bayes_update(node.prior, lik)
                except DegeneratePosterior:
                    post = flat_prior(node.prior.size)
                    resets += 1
                children.append(_Node(post, node.weight * mass))
        process.append((k, 1 / mean_info))
        branchwise.append((k, mean_inverse))
        epsilons.append(eps_here)
        level = children
    curve = process if averaging == "process" else branchwise
    return AdaptiveRunReport(
        scheme="vantrees",
        n=n,
        error_curve=curve,
        tree_stats={
            "nodes": nodes,
            "resets": resets,
            "process_curve": [[k, e] for k, e in process],
            "branchwise_curve": [[k, e] for k, e in branchwise],
            "epsilons": epsilons,
        },
        config={"alpha": abs(model.alpha), "dim": model.dim, "grid": prior.size,
                "scan_points": scan_points, "averaging": averaging},
    )


def _fit_constant(curve) -> float:
    """Least-squares constant c in sigma^2(k) ~ c/k over the upper half of k."""
    n = len(curve)
    tail = [k * e for k, e in curve if k >= max(1, n // 2)]
    return float(np.mean(tail))


def run_fixed_povm(model: CoherentModel, n: int, scheme: str, theta_grid_r=None,
                   first_guess="zero", seed: int = 0, m: int = DEFAULT_GRID,
                   exclude_flagged: bool = False) -> AdaptiveRunReport:
    """Same projector-family measurement on all ``n`` copies.

    ``fisher``: eps is the initial guess and sigma^2(k) is the theta_r-average
    of 1/(k F(theta_r, eps)). ``vantrees``: eps maximizes the flat-prior Van
    Trees information and sigma^2(k) = 1/Z(k copies).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if scheme == "fisher":
        th_r = _theta_r(theta_grid_r)
        eps = initial_guess(first_guess, seed)
        f = np.asarray(family_fisher(model, th_r, eps))
        curve, flags = [], 0
        for k in range(1, n + 1):
            err, flags = _mean_inverse(k * f, exclude_flagged)
            curve.append((k, err))
        stats = {"flagged_theta_r": flags}
        config = {"theta_r_points": int(th_r.size), "epsilon": eps,
                  "exclude_flagged": exclude_flagged}
    elif scheme == "vantrees":
        prior = flat_prior(m)
        eps = optimize_restricted(model, prior).best_epsilon
        povm = projector_family(model, eps)
        single = likelihood_term(model, povm, prior)
        curve = [(k, 1 / van_trees_n_copies(model, povm, prior, k)) for k in range(1, n + 1)]
        stats = {"likelihood_term": single}
        config = {"grid": m, "epsilon": eps}
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    config.update({"alpha": abs(model.alpha), "dim": model.dim, "mode": "fixed"})
    return AdaptiveRunReport(
        scheme=scheme, n=n, error_curve=curve, tree_stats=stats, config=config,
        fitted_constant=_fit_constant(curve),
    )


def flat_prior_constant(alpha: float, m: int = 4096) -> float:
    """c in sigma^2_VanTrees(n) = c/n for a fixed projector and a flat prior."""
    prior = flat_prior(m)
    model = CoherentModel(alpha)
    return 1 / likelihood_term(model, projector_family(model, 0.0), prior)


def calibrate_alpha(target: float = 0.8, lo: float = 0.2, hi: float = 3.0) -> float:
    """|alpha| at which the fixed Van Trees constant equals ``target``."""
    return float(brentq(lambda x: flat_prior_constant(x) - target, lo, hi, xtol=1e-6))
