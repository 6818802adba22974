"""
Frequencies and amplitudes from a recovered signal
==================================================

Five peaks, three of them only 0.5/127 apart. Recover from 50 samples, then
read the parameters off the completed signal with ESPRIT.
"""
import numpy as np

from hvaf import SolverConfig, estimate, parameter_errors, random_mask, solve, synthesize
from hvaf.experiments import five_peak_model

truth = five_peak_model()
y = synthesize(truth, 127)
obs = random_mask(127, 50, seed=0).with_values(y)

rec = solve(obs, SolverConfig(rank=5)).recovered
est = estimate(rec, 5)

np.set_printoptions(precision=6, suppress=True)
print("true f     ", truth.freqs)
print("estimated f", est.freqs)
print("|c|        ", np.abs(est.amps))
ferr, cerr = parameter_errors(truth, est)
print("relative errors: frequency %.1e, magnitude %.1e" % (ferr, cerr))
