"""
Noisy samples
=============

With a positive ``lam`` the observed entries are fitted in least squares
instead of being pinned. Larger ``lam`` trusts the data more.
"""
from hvaf import SolverConfig, add_noise, normalize, random_mask, random_model, rlne, snr_db, solve, synthesize

y = normalize(synthesize(random_model(5, seed=3), 127))
obs = random_mask(127, 64, seed=3).with_values(y)
noisy = add_noise(obs, 0.1, seed=3)
print("SNR %.1f dB" % snr_db(noisy.values - obs.values, obs.values))

for lam in (100.0, 1000.0, 10000.0):
    rep = solve(noisy, SolverConfig(rank=5, lam=lam, mu0=0.05))
    print("lam %7.0f  rlne %.3f" % (lam, rlne(rep.recovered, y)))
