"""
Inspecting the best measurement found by Monte-Carlo search
===========================================================

The search reports the enlarged dimension sweep, the refinement trace and
the POVM itself, which can be saved as JSON and reloaded.
"""
import numpy as np

from vantrees import CoherentModel, gaussian_prior, optimize_montecarlo, validate
from vantrees.povm import povm_from_json, povm_to_json

model = CoherentModel(0.7)
rep = optimize_montecarlo(model, gaussian_prior(np.pi / 4, 1024), budget=300, seed=2)

print("enlarged dimension sweep:")
for D, value in rep.dimension_trace:
    print(f"  D={D:2d}  best={value:.5f}")
print(f"after refinement: {rep.best_value:.5f} ({len(rep.refine_trace) - 1} accepted moves)")

povm = validate(povm_from_json(povm_to_json(rep.best_povm)))
weights = [np.trace(e).real for e in povm.elements]
print("outcome traces:", np.round(weights, 3), "sum", round(sum(weights), 12))
