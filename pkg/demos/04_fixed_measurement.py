"""
Repeating one measurement on every copy
=======================================

The Van Trees route fixes the best projector for a flat prior and gives
sigma^2(n) = c/n. The Fisher route averages 1/(n F(theta_r, eps)) over
theta_r; F has a double zero at theta_r = eps + pi, so that average has no
finite limit. Refining the theta_r grid shows it growing linearly.
"""
import numpy as np

from vantrees import CoherentModel, calibrate_alpha, run_fixed_povm
from vantrees.infotheory import family_fisher
from vantrees.priors import theta_grid

alpha = calibrate_alpha(0.8)
model = CoherentModel(alpha)
vt = run_fixed_povm(model, 20, "vantrees")
print(f"|alpha| = {alpha:.4f}: Van Trees constant c = {vt.fitted_constant:.4f}")

for m in (128, 256, 512, 1024, 2048):
    grid = theta_grid(m) + np.pi / m  # shifted so no sample sits on the pole
    c = run_fixed_povm(model, 1, "fisher", theta_grid_r=grid).fitted_constant
    print(f"theta_r points {m:5d}: Fisher constant {c:10.2f}")

# finite summaries of the same integrand; 1/mean F is the Van Trees constant
f = family_fisher(model, theta_grid(4096) + np.pi / 4096, 0.0)
print(f"median 1/F = {np.median(1 / f):.3f}, 1/mean F = {1 / np.mean(f):.3f}")
