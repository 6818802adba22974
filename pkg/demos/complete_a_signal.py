"""
Completing a sparse exponential signal
======================================

Draw five undamped exponentials, keep 50 of 127 samples and fill in the rest.
"""
import numpy as np

from hvaf import SolverConfig, normalize, random_mask, random_model, rlne, solve, synthesize

model = random_model(5, seed=1)
y = normalize(synthesize(model, 127))

# observed samples: 50 random positions (1-based indices)
obs = random_mask(127, 50, seed=2).with_values(y)
print("observed", obs.M, "of", obs.n, "samples")

report = solve(obs, SolverConfig(rank=5))
print("relative error", rlne(report.recovered, y))
print("beta stages", len(report.stages), "wall time %.1fs" % report.wall_time)

# observed entries are kept exactly
assert np.array_equal(report.recovered[obs.indices - 1], obs.values)
