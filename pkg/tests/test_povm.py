import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vantrees.hilbert import CoherentModel, FockVector, coherent_state, phase_evolve
from vantrees.infotheory import family_probability
from vantrees.povm import (
    InvalidPovm,
    Povm,
    born_probabilities,
    coarse_grain,
    haar_unitary,
    povm_from_json,
    povm_to_json,
    projector_family,
    random_projective_povm,
    validate,
)


def test_projector_family_completeness():
    model = CoherentModel(1.0)
    for eps in np.linspace(0, 2 * np.pi, 7, endpoint=False):
        povm = validate(projector_family(model, eps))
        assert povm.labels == (1, 2)
        np.testing.assert_allclose(sum(povm.elements), np.eye(model.dim), atol=1e-10)


@pytest.mark.parametrize("theta,eps", [(0.3, 0.0), (-2.0, 1.0), (1.0, 1.0)])
def test_born_matches_overlap(theta, eps):
    model = CoherentModel(0.8)
    dist = born_probabilities(projector_family(model, eps), phase_evolve(coherent_state(model), theta))
    p, dp = family_probability(model, theta - eps)
    np.testing.assert_allclose(dist.probs, [p, 1 - p], atol=1e-12)
    np.testing.assert_allclose(dist.dprobs, [dp, -dp], atol=1e-12)
    if theta == eps:
        assert dist.probs[1] < 1e-8


def test_identity_povm():
    state = coherent_state(CoherentModel(0.5))
    dist = born_probabilities(Povm([np.eye(state.dim)]), state)
    assert dist.probs[0] == pytest.approx(1.0)
    assert dist.dprobs[0] == pytest.approx(0.0, abs=1e-14)


@pytest.mark.property
def test_born_derivative_finite_difference():
    model = CoherentModel(1.2)
    povm = random_projective_povm(model.dim, model.dim + 3, seed=11)
    psi0 = coherent_state(model)
    theta = 0.4
    exact = born_probabilities(povm, phase_evolve(psi0, theta)).dprobs
    hs = np.logspace(-1, -3, 5)
    errs = []
    for h in hs:
        up = born_probabilities(povm, phase_evolve(psi0, theta + h)).probs
        dn = born_probabilities(povm, phase_evolve(psi0, theta - h)).probs
        errs.append(np.max(np.abs((up - dn) / (2 * h) - exact)))
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.2)


def test_dimension_checks():
    with pytest.raises(ValueError):
        random_projective_povm(4, 3, seed=0)
    with pytest.raises(ValueError):
        born_probabilities(Povm([np.eye(3)]), FockVector(np.ones(2) / np.sqrt(2)))


def test_validate_rejects():
    with pytest.raises(InvalidPovm):
        validate(Povm([np.array([[1, 1j], [0, 0]])]))
    with pytest.raises(InvalidPovm):
        validate(Povm([np.diag([1.5, 1.0]), np.diag([-0.5, 0.0])]))
    with pytest.raises(InvalidPovm):
        validate(Povm([np.diag([0.5, 0.5])]))


def test_von_neumann_when_not_enlarged():
    povm = random_projective_povm(4, 4, seed=3)
    for e in povm.elements:
        np.testing.assert_allclose(e @ e, e, atol=1e-12)
        assert np.trace(e).real == pytest.approx(1.0)


def test_mean_trace_oracle():
    # E Tr(E_k) = d/D for a Haar basis; check within 3 standard errors over 10^4 draws
    d, D = 3, 7
    rng = np.random.default_rng(5)
    traces = np.array([np.sum(np.abs(haar_unitary(D, rng)[:d, :]) ** 2, axis=0)
                       for _ in range(10_000)])
    mean = traces.mean(axis=0)
    se = traces.std(axis=0, ddof=1) / np.sqrt(len(traces))
    assert np.all(np.abs(mean - d / D) < 3 * se + 1e-12)


@pytest.mark.property
def test_haar_is_unitary_and_deterministic():
    u = haar_unitary(6, np.random.default_rng(1))
    np.testing.assert_allclose(u.conj().T @ u, np.eye(6), atol=1e-12)
    a, b = random_projective_povm(3, 5, seed=9), random_projective_povm(3, 5, seed=9)
    c = random_projective_povm(3, 5, seed=10)
    assert all(np.array_equal(x, y) for x, y in zip(a.elements, b.elements))
    assert not all(np.allclose(x, y) for x, y in zip(a.elements, c.elements))


def test_json_round_trip():
    povm = random_projective_povm(3, 5, seed=2)
    back = povm_from_json(povm_to_json(povm))
    assert back.labels == povm.labels
    for x, y in zip(back.elements, povm.elements):
        np.testing.assert_array_equal(x, y)


def test_coarse_grain():
    povm = random_projective_povm(3, 5, seed=4)
    merged = validate(coarse_grain(povm, [[0, 2], [1], [3, 4]]))
    assert len(merged) == 3
    with pytest.raises(ValueError):
        coarse_grain(povm, [[0, 1]])


@pytest.mark.property
def test_povm_validity_thousand_draws():
    rng = np.random.default_rng(2024)
    for i in range(1000):
        d = int(rng.integers(1, 6))
        D = d + int(rng.integers(0, 5))
        validate(random_projective_povm(d, D, seed=[2024, i]))


@pytest.mark.property
@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 2.0), st.floats(-np.pi, np.pi))
def test_normalization_and_derivative_sum(seed, alpha, theta):
    model = CoherentModel(alpha)
    povm = random_projective_povm(model.dim, model.dim + 2, seed=seed)
    dist = born_probabilities(povm, phase_evolve(coherent_state(model), theta))
    assert dist.probs.sum() == pytest.approx(1.0, abs=1e-10)
    assert abs(dist.dprobs.sum()) < 1e-8
