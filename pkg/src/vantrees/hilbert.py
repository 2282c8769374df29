"""Truncated Fock-space numerics for phase-encoded coherent states.

A coherent state |alpha> is stored as its amplitude vector in the number
basis, truncated at the smallest dimension whose Poisson tail mass is below
``TAIL_MASS``. The phase parameter enters through exp(i n theta).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import poisson

TAIL_MASS = 1e-12


def wrap_angle(theta):
    """Map angles into [-pi, pi)."""
    return (np.asarray(theta) + np.pi) % (2 * np.pi) - np.pi


def truncation_dim(alpha: complex, tail: float = TAIL_MASS) -> int:
    """Smallest d such that sum_{n>=d} e^{-|a|^2} |a|^{2n}/n! < tail."""
    mean = abs(alpha) ** 2
    d = 1
    # poisson.sf(d - 1) is the mass on n >= d
    while poisson.sf(d - 1, mean) >= tail:
        d += 1
    return d


@dataclass(frozen=True)
class FockVector:
    """Amplitudes of a pure state in the truncated number basis."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("amps must be a non-empty 1-d array")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amps must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def inner(self, other: "FockVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amps, other.amps))


@dataclass(frozen=True)
class CoherentModel:
    """Coherent amplitude ``alpha`` with its Fock truncation ``dim``.

    ``dim=None`` selects the smallest admissible truncation.
    """

    alpha: complex
    dim: int | None = None

    def __post_init__(self):
        alpha = complex(self.alpha)
        if not np.isfinite(alpha):
            raise ValueError(f"alpha must be finite, got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)
        dmin = truncation_dim(alpha)
        if self.dim is None:
            object.__setattr__(self, "dim", dmin)
        elif self.dim < dmin:
            raise ValueError(
                f"dim={self.dim} leaves Poisson tail mass >= {TAIL_MASS:g} "
                f"for |alpha|={abs(alpha):g}; need dim >= {dmin}"
            )

    @property
    def mean_photons(self) -> float:
        return abs(self.alpha) ** 2


def coherent_state(model: CoherentModel) -> FockVector:
    """Truncated coherent state |alpha> built by amplitude recurrence."""
    amps = np.empty(model.dim, dtype=complex)
    amps[0] = np.exp(-model.mean_photons / 2)
    for n in range(1, model.dim):
        amps[n] = amps[n - 1] * model.alpha / np.sqrt(n)
    return FockVector(amps)


def phase_evolve(state: FockVector, theta: float) -> FockVector:
    """Apply exp(i n theta)."""
    n = np.arange(state.dim)
    return FockVector(state.amps * np.exp(1j * n * theta))


def phase_derivative(state: FockVector) -> FockVector:
    """d/dtheta of exp(i n theta)|psi> at theta=0, i.e. i n |psi>."""
    n = np.arange(state.dim)
    return FockVector(1j * n * state.amps)


def phase_states(model: CoherentModel, thetas) -> tuple[np.ndarray, np.ndarray]:
    """Rows psi(theta) and dpsi/dtheta for every theta, shape (len(thetas), dim)."""
    psi0 = coherent_state(model).amps
    n = np.arange(model.dim)
    phases = np.exp(1j * np.outer(np.asarray(thetas, dtype=float), n))
    psi = phases * psi0
    return psi, psi * (1j * n)


def overlap_probability(model: CoherentModel, theta: float, epsilon: float) -> float:
    """|<alpha(theta)|alpha(epsilon)>|^2 from the truncated Fock vectors."""
    psi = coherent_state(model)
    return abs(phase_evolve(psi, theta).inner(phase_evolve(psi, epsilon))) ** 2


def overlap_probability_closed_form(alpha: complex, delta):
    """exp(-2|alpha|^2 (1 - cos delta)), the untruncated overlap."""
    a = abs(alpha) ** 2
    return np.exp(-4 * a * np.sin(np.asarray(delta) / 2) ** 2)
