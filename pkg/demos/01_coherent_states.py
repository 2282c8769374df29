"""
Coherent states in a truncated Fock space
=========================================

A phase shift exp(i n theta) applied to |alpha>, and the overlap that
drives the two-outcome measurement used everywhere else.
"""
import numpy as np

from vantrees.hilbert import (
    CoherentModel,
    coherent_state,
    overlap_probability,
    overlap_probability_closed_form,
)

# the truncation keeps a Poisson tail below 1e-12
for alpha in (0.1, 0.5, 1.0, 2.0, 4.0):
    model = CoherentModel(alpha)
    psi = coherent_state(model)
    print(f"|alpha|={alpha:<4} dim={model.dim:<3} 1 - norm^2 = {1 - psi.norm()**2:.1e}")

# overlap with a rotated copy, Fock sum against the closed form
model = CoherentModel(1.0)
for delta in np.linspace(0, np.pi, 5):
    fock = overlap_probability(model, delta, 0.0)
    closed = overlap_probability_closed_form(1.0, delta)
    print(f"delta={delta:.3f}  p={fock:.10f}  closed form={closed:.10f}")
