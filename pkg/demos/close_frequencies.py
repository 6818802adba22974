"""
Two tones at different separations
==================================

When two tones nearly coincide the completed signal is close to a single
exponential, and ESPRIT returns one amplitude near zero.
"""
import numpy as np

from hvaf import SolverConfig
from hvaf.experiments import identifiability_probe

rows = identifiability_probe([1.5 / 127, 0.01 / 127], [8, 12, 20], SolverConfig(rank=2), seed=0)
for r in rows:
    amps = np.round(r["est_amps"], 4)
    print("sep %.4f  M=%2d  rlne %.1e  |c| %s" % (r["separation"], r["M"], r["rlne"], amps))
