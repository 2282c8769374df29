"""
Van Trees information against |alpha| (Gaussian prior)
======================================================

Three numbers per amplitude: the small-|alpha| closed form, the best
two-outcome projector, and a Monte-Carlo search over projective
measurements in an enlarged space. The pointwise bound V_Q sits above all
of them. Writes van_trees_vs_alpha.svg next to this script.
"""
from pathlib import Path

import numpy as np

from vantrees import (
    CoherentModel,
    gaussian_prior,
    generalized_qfi_vq,
    optimize_montecarlo,
    optimize_restricted,
    zq_restricted_analytic,
)
from vantrees.svgplot import line_plot

sigma = np.pi / 4
prior = gaussian_prior(sigma, 1024)
alphas = np.round(np.linspace(0, 1, 6), 2)

rows = []
for a in alphas:
    model = CoherentModel(a)
    rows.append((
        zq_restricted_analytic(model, sigma),
        optimize_restricted(model, prior).best_value,
        optimize_montecarlo(model, prior, budget=1000, seed=0).best_value,
        generalized_qfi_vq(model, prior),
    ))
    print(f"|alpha|={a:.1f}  analytic={rows[-1][0]:.4f}  projector={rows[-1][1]:.4f}  "
          f"monte-carlo={rows[-1][2]:.4f}  V_Q={rows[-1][3]:.4f}")

# the closed form is only meant for small |alpha|; the numerical values
# stay close to each other and strictly below V_Q
rows = np.array(rows)
svg = line_plot([
    ("analytic", alphas, rows[:, 0], "line"),
    ("Monte-Carlo", alphas, rows[:, 2], "dots"),
    ("V_Q", alphas, rows[:, 3], "dashed"),
], title="Van Trees information, sigma = pi/4", xlabel="|alpha|", ylabel="information")
Path(__file__).with_name("van_trees_vs_alpha.svg").write_text(svg)
