"""Fisher and Van Trees information functionals.

All information values are in rad^-2. A Van Trees information is the
prior-averaged Fisher information of the measurement plus the Fisher
information of the prior itself; its inverse bounds the Bayes risk.
"""
from __future__ import annotations

import numpy as np

from .hilbert import CoherentModel, phase_states
from .outcomes import OutcomeDistribution
from .povm import Povm, born_grid
from .priors import PriorGrid, prior_fisher

__all__ = [
    "OutcomeDistribution",
    "SingularFisher",
    "fisher_information",
    "fisher_rows",
    "product_distribution",
    "family_probability",
    "family_fisher",
    "restricted_likelihood_term",
    "likelihood_term",
    "van_trees_information",
    "van_trees_n_copies",
    "generalized_qfi_vq",
    "zq_restricted_analytic",
]

P_FLOOR = 1e-12
DP_SINGULAR = 1e-6
COINCIDENCE = 1e-6


class SingularFisher(ArithmeticError):
    """An outcome with vanishing probability still carries a finite slope."""


def fisher_rows(probs, dprobs) -> np.ndarray:
    """sum_xi dp_xi^2 / p_xi along the last axis.

    Outcomes with p <= 1e-12 contribute nothing when |dp| <= 1e-6 and raise
    :class:`SingularFisher` otherwise.
    """
    p = np.asarray(probs, dtype=float)
    dp = np.asarray(dprobs, dtype=float)
    live = p > P_FLOOR
    if np.any(~live & (np.abs(dp) > DP_SINGULAR)):
        raise SingularFisher("outcome with p < 1e-12 has |dp/dtheta| > 1e-6")
    safe = np.where(live, p, 1.0)
    return np.sum(np.where(live, dp**2 / safe, 0.0), axis=-1)


def fisher_information(dist: OutcomeDistribution) -> float:
    """Classical Fisher information of one outcome distribution."""
    return float(fisher_rows(dist.probs, dist.dprobs))


def product_distribution(a: OutcomeDistribution, b: OutcomeDistribution) -> OutcomeDistribution:
    """Joint distribution of two independent outcomes, product rule for the slope."""
    probs = np.outer(a.probs, b.probs).ravel()
    dprobs = (np.outer(a.dprobs, b.probs) + np.outer(a.probs, b.dprobs)).ravel()
    return OutcomeDistribution(probs, dprobs)


def _mean_photons(model) -> float:
    if isinstance(model, CoherentModel):
        return model.mean_photons
    return abs(complex(model)) ** 2


def family_probability(model, delta):
    """p(theta, eps) and dp/dtheta as functions of delta = theta - eps."""
    a = _mean_photons(model)
    delta = np.asarray(delta, dtype=float)
    p = np.exp(-4 * a * np.sin(delta / 2) ** 2)
    return p, -2 * a * np.sin(delta) * p


def family_fisher(model, theta, epsilon):
    """Fisher information of the two-outcome projector family.

    Uses F = 4|a|^2 cos^2(d/2) x / (e^x - 1) with x = 4|a|^2 sin^2(d/2), which
    equals dp^2 / (p (1 - p)) and is free of the 0/0 at theta = eps.
    """
    a = _mean_photons(model)
    delta = np.asarray(theta, dtype=float) - np.asarray(epsilon, dtype=float)
    x = 4 * a * np.sin(delta / 2) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(x > 0, x / np.expm1(x), 1.0)
    f = 4 * a * np.cos(delta / 2) ** 2 * ratio
    near = np.abs((delta + np.pi) % (2 * np.pi) - np.pi) < COINCIDENCE
    f = np.where(near, 4 * a, f)
    return f if f.ndim else float(f)


def restricted_likelihood_term(model, prior: PriorGrid, epsilon) -> np.ndarray:
    """Integral of F(theta, eps) lambda(theta) for one or many eps."""
    eps = np.atleast_1d(np.asarray(epsilon, dtype=float))
    f = family_fisher(model, prior.thetas[None, :], eps[:, None])
    vals = prior.spacing * (f @ prior.density)
    return vals if np.ndim(epsilon) else float(vals[0])


def likelihood_term(model: CoherentModel, povm: Povm, prior: PriorGrid) -> float:
    """Prior average of the Fisher information of ``povm`` on |alpha(theta)>."""
    if povm.dim != model.dim:
        raise ValueError(f"POVM dimension {povm.dim} != model dimension {model.dim}")
    psi, dpsi = phase_states(model, prior.thetas)
    probs, dprobs = born_grid(povm, psi, dpsi)
    return prior.integrate(fisher_rows(probs, dprobs))


def van_trees_information(model: CoherentModel, povm: Povm, prior: PriorGrid) -> float:
    return likelihood_term(model, povm, prior) + prior_fisher(prior)


def van_trees_n_copies(model: CoherentModel, povm: Povm, prior: PriorGrid, n: int) -> float:
    """Van Trees information of ``n`` independent repetitions of ``povm``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return n * likelihood_term(model, povm, prior) + prior_fisher(prior)


def generalized_qfi_vq(model, prior: PriorGrid) -> float:
    """Pointwise-maximized Van Trees information, 4|alpha|^2 + prior term.

    The per-theta optimum of the family is 4|alpha|^2 at every theta.
    """
    return 4 * _mean_photons(model) + prior_fisher(prior)


def zq_restricted_analytic(model, sigma: float) -> float:
    """Small-|alpha| closed form 2|a|^2 (exp(-sigma^2/2) + 1) + 1/sigma^2."""
    a = _mean_photons(model)
    return 2 * a * (np.exp(-sigma**2 / 2) + 1) + 1 / sigma**2
