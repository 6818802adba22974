"""
Damped signals: factorization versus nuclear-norm completion
============================================================

Both solvers see the same 55 samples of damped five-component signals. The
factorized model is nonconvex, so on some draws it stalls in a poor local
solution; a larger preset rank often helps there.
"""
from hvaf import LrhmConfig, SolverConfig, normalize, random_mask, random_model, rlne, solve, solve_lrhm, synthesize

for seed in range(4):
    y = normalize(synthesize(random_model(5, damped=True, seed=seed), 127))
    obs = random_mask(127, 55, seed=seed).with_values(y)
    hvaf = solve(obs, SolverConfig(rank=5))
    lrhm = solve_lrhm(obs, LrhmConfig())
    print("seed %d  factorized rlne %.1e   nuclear rlne %.1e" % (seed, rlne(hvaf.recovered, y), rlne(lrhm.recovered, y)))
