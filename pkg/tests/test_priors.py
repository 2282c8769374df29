import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vantrees.priors import (
    DegeneratePosterior,
    PriorGrid,
    bayes_update,
    flat_prior,
    gaussian_prior,
    marginal_probability,
    posterior_mean_and_risk,
    prior_fisher,
    theta_grid,
)

INV_SIGMA2_PI4 = 16 / np.pi**2
INV_SIGMA2_PI8 = 64 / np.pi**2


def test_grid():
    th = theta_grid(8)
    assert th[0] == -np.pi and th[-1] < np.pi
    assert np.allclose(np.diff(th), np.pi / 4)


@pytest.mark.parametrize("sigma,target", [(np.pi / 4, INV_SIGMA2_PI4), (np.pi / 8, INV_SIGMA2_PI8)])
def test_gaussian_prior_fisher(sigma, target):
    assert prior_fisher(gaussian_prior(sigma)) == pytest.approx(target, rel=5e-3)
    a = prior_fisher(gaussian_prior(sigma, 2048))
    b = prior_fisher(gaussian_prior(sigma, 4096))
    assert abs(a - b) / b < 2e-3


def test_gaussian_mean_and_norm():
    for m in (2048, 4096):
        prior = gaussian_prior(np.pi / 8, m)
        assert prior.integrate(np.ones(m)) == pytest.approx(1.0, abs=1e-8)
    for sigma in (0.3, np.pi / 4, 2.0, 10.0):
        mean, _ = posterior_mean_and_risk(gaussian_prior(sigma))
        assert abs(mean) < 1e-8


@pytest.mark.parametrize("sigma", [0.2, np.pi / 8, np.pi / 4])
def test_gaussian_variance(sigma):
    _, var = posterior_mean_and_risk(gaussian_prior(sigma))
    assert var == pytest.approx(sigma**2, rel=0.01)


def test_bad_sigma():
    with pytest.raises(ValueError):
        gaussian_prior(0.0)


def test_flat_prior():
    prior = flat_prior(64)
    assert np.all(prior.density == 1 / (2 * np.pi))
    assert prior_fisher(prior) == 0.0
    _, var = posterior_mean_and_risk(flat_prior())
    assert var == pytest.approx(np.pi**2 / 3, rel=0.01)


def test_symmetric_likelihood_posterior_mean():
    prior = flat_prior()
    c = 0.9
    post = bayes_update(prior, np.exp(-((prior.thetas - c) ** 2) / 0.08))
    mean, _ = posterior_mean_and_risk(post)
    assert mean == pytest.approx(c, abs=1e-10)


def test_constant_likelihood_is_identity():
    prior = gaussian_prior(0.7)
    post = bayes_update(prior, np.full(prior.size, 0.37))
    np.testing.assert_allclose(post.density, prior.density, atol=1e-12)


def test_delta_prior_fixed_point():
    w = np.zeros(128)
    w[40] = 1
    prior = PriorGrid.from_weights(w)
    post = bayes_update(prior, np.linspace(0.1, 0.9, 128))
    np.testing.assert_allclose(post.density, prior.density, atol=1e-12)
    mean, var = posterior_mean_and_risk(prior)
    assert mean == pytest.approx(prior.thetas[40]) and var == pytest.approx(0.0, abs=1e-20)


def test_two_point_hand_computation():
    w = np.zeros(16)
    w[[4, 10]] = 1
    prior = PriorGrid.from_weights(w)
    lik = np.zeros(16)
    lik[4], lik[10] = 0.2, 0.8
    post = bayes_update(prior, lik)
    mass = post.density * post.spacing
    assert mass[4] == pytest.approx(0.2) and mass[10] == pytest.approx(0.8)
    assert marginal_probability(prior, lik) == pytest.approx(0.5)


def test_degenerate_posterior():
    w = np.zeros(16)
    w[3] = 1
    lik = np.ones(16)
    lik[3] = 0
    with pytest.raises(DegeneratePosterior):
        bayes_update(PriorGrid.from_weights(w), lik)


def test_invalid_density():
    with pytest.raises(ValueError):
        PriorGrid(np.ones(16))
    with pytest.raises(ValueError):
        PriorGrid.from_weights(-np.ones(16))


def test_csv():
    text = flat_prior(4).to_csv().splitlines()
    assert text[0] == "theta,density"
    assert float(text[1].split(",")[0]) == -np.pi


likelihoods = arrays(float, 64, elements=st.floats(0.01, 1.0))


@pytest.mark.property
@settings(max_examples=50, deadline=None)
@given(likelihoods, likelihoods)
def test_update_normalization_and_batching(l1, l2):
    prior = gaussian_prior(1.0, 64)
    seq = bayes_update(bayes_update(prior, l1), l2)
    batch = bayes_update(prior, l1 * l2)
    assert seq.integrate(np.ones(64)) == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(seq.density, batch.density, atol=1e-10)
