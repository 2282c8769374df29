"""POVMs on the truncated Fock space.

Besides a validated container this module provides the two-outcome family
{|alpha(eps)><alpha(eps)|, 1 - |alpha(eps)><alpha(eps)|} and POVMs induced on
the physical space by Haar-random projective measurements in a larger space.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .hilbert import CoherentModel, FockVector, coherent_state, phase_derivative, phase_evolve
from .outcomes import OutcomeDistribution

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-8
COMPLETENESS_TOL = 1e-8
CLAMP_TOL = 1e-10


class InvalidPovm(ValueError):
    pass


@dataclass(frozen=True)
class Povm:
    """Ordered outcome operators E_xi with integer labels."""

    elements: tuple
    labels: tuple = field(default=None)

    def __post_init__(self):
        elements = tuple(np.array(e, dtype=complex) for e in self.elements)
        for e in elements:
            e.setflags(write=False)
        object.__setattr__(self, "elements", elements)
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(range(1, len(elements) + 1)))
        else:
            object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))
        if len(self.labels) != len(elements):
            raise InvalidPovm("one label per element required")

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)

    def stacked(self) -> np.ndarray:
        return np.stack(self.elements)


def validate(povm: Povm) -> Povm:
    """Check Hermiticity, positivity and completeness; return ``povm``."""
    if len(povm) == 0:
        raise InvalidPovm("empty POVM")
    d = povm.dim
    total = np.zeros((d, d), dtype=complex)
    for label, e in zip(povm.labels, povm.elements):
        if e.shape != (d, d):
            raise InvalidPovm(f"element {label} has shape {e.shape}, expected {(d, d)}")
        herm = np.max(np.abs(e - e.conj().T))
        if herm > HERMITIAN_TOL:
            raise InvalidPovm(f"element {label} not Hermitian (deviation {herm:.3g})")
        lo = np.linalg.eigvalsh((e + e.conj().T) / 2).min()
        if lo < -PSD_TOL:
            raise InvalidPovm(f"element {label} has eigenvalue {lo:.3g}")
        total += e
    dev = np.max(np.abs(total - np.eye(d)))
    if dev > COMPLETENESS_TOL:
        raise InvalidPovm(f"elements sum to identity only within {dev:.3g}")
    return povm


def projector_family(model: CoherentModel, epsilon: float) -> Povm:
    """{P, 1 - P} with P = |alpha(eps)><alpha(eps)|, labelled (1, 2)."""
    v = phase_evolve(coherent_state(model), epsilon).amps
    p = np.outer(v, v.conj())
    return Povm((p, np.eye(model.dim) - p), labels=(1, 2))


def haar_unitary(n: int, rng) -> np.ndarray:
    """Haar-distributed n x n unitary from the QR decomposition of a Ginibre matrix."""
    rng = np.random.default_rng(rng)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    # fix the phase ambiguity of QR so the distribution is exactly Haar
    return q * (diag / np.abs(diag))


def povm_from_basis(v: np.ndarray, d: int) -> Povm:
    """Top-left d x d blocks of the projectors onto the columns of ``v``."""
    top = v[:d, :]
    elements = [np.outer(top[:, k], top[:, k].conj()) for k in range(top.shape[1])]
    return Povm(elements)


def random_projective_povm(d: int, D: int, seed=None) -> Povm:
    """POVM on C^d induced by a Haar-random orthonormal basis of C^D.

    The physical space is embedded as the first ``d`` coordinates of C^D.
    """
    if D < d:
        raise ValueError(f"enlarged dimension D={D} is smaller than d={d}")
    return povm_from_basis(haar_unitary(D, seed), d)


def _clamp(p: np.ndarray) -> np.ndarray:
    if np.any(p < -CLAMP_TOL) or np.any(p > 1 + CLAMP_TOL):
        raise ValueError(f"probability outside [0, 1]: {p.min():.3g}..{p.max():.3g}")
    return np.clip(p, 0.0, 1.0)


def born_probabilities(povm: Povm, state: FockVector) -> OutcomeDistribution:
    """p_xi = <psi|E_xi|psi> and dp_xi/dtheta = 2 Re <dpsi|E_xi|psi>.

    ``state`` must be a phase-evolved vector exp(i n theta)|psi0>, so that its
    theta-derivative is i n |psi(theta)>.
    """
    if state.dim != povm.dim:
        raise ValueError(f"state dimension {state.dim} != POVM dimension {povm.dim}")
    psi = state.amps
    dpsi = phase_derivative(state).amps
    stack = povm.stacked()
    e_psi = stack @ psi
    probs = _clamp(np.real(e_psi @ psi.conj()))
    dprobs = 2 * np.real(e_psi @ dpsi.conj())
    return OutcomeDistribution(probs, dprobs)


def born_grid(povm: Povm, psi: np.ndarray, dpsi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized Born rule over rows of ``psi``; returns arrays (rows, outcomes)."""
    stack = povm.stacked()
    e_psi = np.einsum("kij,tj->tki", stack, psi)
    probs = np.real(np.einsum("tki,ti->tk", e_psi, psi.conj()))
    dprobs = 2 * np.real(np.einsum("tki,ti->tk", e_psi, dpsi.conj()))
    return _clamp(probs), dprobs


def coarse_grain(povm: Povm, groups) -> Povm:
    """Merge outcomes: ``groups`` is a list of index lists covering all outcomes."""
    flat = sorted(i for g in groups for i in g)
    if flat != list(range(len(povm))):
        raise ValueError("groups must partition the outcome indices")
    return Povm([sum(povm.elements[i] for i in g) for g in groups])


def povm_to_json(povm: Povm) -> str:
    """Row-major complex matrices as [re, im] pairs, plus labels."""
    payload = {
        "labels": list(povm.labels),
        "elements": [
            [[[float(z.real), float(z.imag)] for z in row] for row in e]
            for e in povm.elements
        ],
    }
    return json.dumps(payload)


def povm_from_json(text: str) -> Povm:
    payload = json.loads(text)
    elements = [
        np.array([[complex(re, im) for re, im in row] for row in e])
        for e in payload["elements"]
    ]
    return Povm(elements, labels=payload["labels"])
