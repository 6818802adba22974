"""
Column-wise completion of a 2D data set
=======================================

Each column is a damped exponential sum sampled at its own 40% of positions.
"""
from hvaf import SolverConfig, random_mask, rlne
from hvaf.experiments import damped_matrix, solve_columns, trial_seeds

X = damped_matrix(63, 4, 3, seed=0)
masks = [random_mask(63, 25, seed=s) for s in trial_seeds(0, 63, 4, 25, count=4)]

rec, errors = solve_columns(X, masks, SolverConfig(rank=6))
print("failed columns", errors or "none")
print("matrix rlne %.3f" % rlne(rec, X))
