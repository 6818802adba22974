import numpy as np
import pytest

from hvaf.errors import ConfigError, DimensionError, RankError
from hvaf.hankel import antidiag_weights, default_square_shape, hankel_adjoint, hankel_pinv, hankelize
from hvaf.signals import ObservationSet, random_mask, random_model, synthesize
from hvaf.solver import (
    AdmmState,
    SolverConfig,
    augmented_lagrangian,
    factor_rhs,
    init_factors,
    lift_columns,
    solve,
    update_auxiliaries_and_multipliers,
    update_factor_rows,
    update_x_exact,
    update_x_noisy,
)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_state(rng, n=15, rank=2, mu=None, beta=None):
    shape = default_square_shape(n)
    U, V = crandn(rng, shape.n1, rank), crandn(rng, shape.n2, rank)
    B, C = lift_columns(crandn(rng, shape.n1, rank)), lift_columns(crandn(rng, shape.n2, rank))
    return AdmmState(
        x=crandn(rng, n),
        U=U,
        V=V,
        B=B,
        C=C,
        D=0.3 * crandn(rng, *B.shape),
        M=0.3 * crandn(rng, *C.shape),
        mu=rng.uniform(0.01, 5) if mu is None else mu,
        beta=rng.uniform(0.1, 50) if beta is None else beta,
    )


def small_problem(n=31, R=2, M=20, seed=0):
    y = synthesize(random_model(R, seed=seed, separation=0.1), n)
    return y, random_mask(n, M, seed=seed).with_values(y)


# factor initialization


def test_svd_init_exact_for_rank_one():
    y = synthesize(random_model(1, damped=True, seed=3), 21)
    obs = random_mask(21, 21, seed=0).with_values(y)
    shape = default_square_shape(21)
    U, V = init_factors(obs, shape, 1)
    assert np.linalg.norm(U @ V.T - hankelize(y)) <= 1e-10 * np.linalg.norm(hankelize(y))


def test_svd_init_matches_projection_oracle():
    # best rank-r approximation = projection of H onto its top-r left eigenspace of H H^*
    _, obs = small_problem()
    shape = default_square_shape(obs.n)
    H = hankelize(obs.zero_filled(), shape)
    evals, evecs = np.linalg.eigh(H @ H.conj().T)
    P = evecs[:, -3:]
    U, V = init_factors(obs, shape, 3)
    np.testing.assert_allclose(U @ V.T, P @ (P.conj().T @ H), atol=1e-10 * np.linalg.norm(H))


def test_random_init_is_seeded():
    _, obs = small_problem()
    shape = default_square_shape(obs.n)
    a = init_factors(obs, shape, 2, "random", seed=5)
    b = init_factors(obs, shape, 2, "random", seed=5)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
    c = init_factors(obs, shape, 2, "random", seed=6)
    assert not np.allclose(a[0], c[0])


def test_init_rank_too_large():
    _, obs = small_problem()
    with pytest.raises(RankError):
        init_factors(obs, default_square_shape(obs.n), 17)


# factor update


def test_row_update_recovers_column_when_companion_is_zero():
    rng = np.random.default_rng(0)
    b = crandn(rng, 8)
    aux = lift_columns(b[:, None])
    U = update_factor_rows(crandn(rng, 8, 8), np.zeros((8, 1)), aux, np.zeros_like(aux), mu=0.7, beta=3.0)
    np.testing.assert_allclose(U[:, 0], b, rtol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_row_update_solves_normal_equations(seed):
    rng = np.random.default_rng(seed)
    st = random_state(rng, n=int(rng.integers(9, 40)), rank=int(rng.integers(1, 4)))
    Hx = hankelize(st.x)
    for H, comp, aux, mult in ((Hx, st.V, st.B, st.D), (Hx.T, st.U, st.C, st.M)):
        F = update_factor_rows(H, comp, aux, mult, st.mu, st.beta)
        w = antidiag_weights(default_square_shape(H.shape[0]))
        Y = factor_rhs(H, comp, aux, mult, st.mu, st.beta)
        residual = st.mu * w[:, None] * F + st.beta * F @ (comp.T @ comp.conj()) - Y
        assert np.linalg.norm(residual) <= 1e-8 * np.linalg.norm(Y)


def test_factor_updates_never_increase_lagrangian():
    rng = np.random.default_rng(42)
    for _ in range(50):
        st = random_state(rng, n=int(rng.integers(7, 30)), rank=int(rng.integers(1, 4)))
        before = augmented_lagrangian(st)
        Hx = hankelize(st.x)
        st.U = update_factor_rows(Hx, st.V, st.B, st.D, st.mu, st.beta)
        mid = augmented_lagrangian(st)
        st.V = update_factor_rows(Hx.T, st.U, st.C, st.M, st.mu, st.beta)
        after = augmented_lagrangian(st)
        tol = 1e-10 * abs(before)
        assert mid <= before + tol
        assert after <= mid + tol


# x updates


def test_update_x_exact_small_case():
    obs = ObservationSet(3, [1], [5.0])
    x = update_x_exact(np.array([[1.0, 2.0], [2.0, 3.0]]), np.eye(2), obs)
    np.testing.assert_allclose(x, [5, 2, 3])


def test_update_x_exact_full_and_empty_masks():
    rng = np.random.default_rng(1)
    U, V, y = crandn(rng, 5, 2), crandn(rng, 4, 2), crandn(rng, 8)
    full = ObservationSet.from_signal(y, np.arange(1, 9))
    np.testing.assert_array_equal(update_x_exact(U, V, full), y)
    empty = ObservationSet(8, np.array([], dtype=int), np.array([], dtype=complex))
    np.testing.assert_allclose(update_x_exact(U, V, empty), hankel_pinv(U @ V.T))


def test_update_x_noisy_formula():
    rng = np.random.default_rng(2)
    U, V = crandn(rng, 2, 1), crandn(rng, 2, 1)
    obs = ObservationSet(3, [1], [2.0 - 1j])
    g = hankel_adjoint(U @ V.T)
    x = update_x_noisy(U, V, obs, beta=1.0, lam=1.0)
    assert x[0] == pytest.approx((g[0] + obs.values[0]) / 2)
    np.testing.assert_allclose(x[1:], g[1:] / np.array([2, 1]))
    np.testing.assert_allclose(update_x_noisy(U, V, obs, 1.0, 0.0), hankel_pinv(U @ V.T))
    # unobserved entries do not depend on lambda
    for lam in (0.1, 10.0, 1e6):
        np.testing.assert_allclose(update_x_noisy(U, V, obs, 1.0, lam)[1:], x[1:])
    assert abs(update_x_noisy(U, V, obs, 1.0, 1e14)[0] - obs.values[0]) <= 1e-12


# auxiliaries and multipliers


def test_large_mu_auxiliary_matches_lift():
    rng = np.random.default_rng(3)
    st = random_state(rng, mu=1e12)
    st.D, st.M = np.zeros_like(st.D), np.zeros_like(st.M)
    new = update_auxiliaries_and_multipliers(st)
    np.testing.assert_allclose(new.B, lift_columns(st.U), atol=1e-6)
    np.testing.assert_allclose(new.C, lift_columns(st.V), atol=1e-6)


def test_small_singular_values_fully_thresholded():
    rng = np.random.default_rng(4)
    st = random_state(rng, mu=1e-3)
    st.U *= 1e-3
    st.D = np.zeros_like(st.D)
    new = update_auxiliaries_and_multipliers(st)
    assert np.all(new.B == 0)


def test_multiplier_step_matches_ascent_and_is_bounded():
    rng = np.random.default_rng(5)
    for _ in range(30):
        st = random_state(rng, mu=rng.uniform(0.05, 5))
        new = update_auxiliaries_and_multipliers(st)
        np.testing.assert_allclose(new.D, st.D + st.mu * (lift_columns(st.U) - new.B), atol=1e-10)
        np.testing.assert_allclose(new.M, st.M + st.mu * (lift_columns(st.V) - new.C), atol=1e-10)
        for mult in (new.D, new.M):
            assert np.linalg.svd(mult, compute_uv=False).max() <= 1 + 1e-10


# full solver


def test_config_validation():
    for bad in (dict(rank=0), dict(rank=2, rho=1.0), dict(rank=2, mu0=0), dict(rank=2, lam=-1.0),
                dict(rank=2, beta_max=0.5), dict(rank=2, init="zeros"), dict(rank=2, tol=0)):
        with pytest.raises(ConfigError):
            SolverConfig(**bad)
    assert len(SolverConfig(rank=1).betas()) == 31
    assert len(SolverConfig(rank=1, beta0=2.0**5).betas()) == 26
    assert SolverConfig(rank=1, rho=1.01).rho == 1.01


def test_rejects_empty_observations():
    obs = ObservationSet(10, np.array([], dtype=int), np.array([], dtype=complex))
    with pytest.raises(DimensionError):
        solve(obs, SolverConfig(rank=1))


@pytest.mark.parametrize("lam", [None, 500.0])
def test_fully_observed_is_exact(lam):
    y = synthesize(random_model(3, damped=True, seed=1), 31)
    obs = random_mask(31, 31, seed=0).with_values(y)
    rep = solve(obs, SolverConfig(rank=3, lam=lam))
    if lam is None:
        np.testing.assert_array_equal(rep.recovered, y)
    else:
        assert np.linalg.norm(rep.recovered - y) <= 1e-2 * np.linalg.norm(y)


def test_small_recovery_keeps_data_and_bounds_multipliers():
    y, obs = small_problem()
    rep = solve(obs, SolverConfig(rank=2, monitor=True))
    assert rep.converged
    np.testing.assert_array_equal(rep.recovered[obs.indices - 1], obs.values)
    assert np.linalg.norm(rep.recovered - y) <= 1e-3 * np.linalg.norm(y)
    assert max(rep.multiplier_norms) <= 1 + 1e-10
    assert rep.stages[-1].rel_change <= 1e-7
    assert rep.stages[-1].residual <= 1e-4 * np.linalg.norm(hankelize(rep.recovered))
    assert [s.beta for s in rep.stages] == SolverConfig(rank=2).betas()


def test_deterministic_given_seed():
    _, obs = small_problem(seed=3)
    cfg = SolverConfig(rank=2, init="random", seed=11, beta_max=2.0**10)
    np.testing.assert_array_equal(solve(obs, cfg).recovered, solve(obs, cfg).recovered)


def test_iteration_cap_flags_non_convergence():
    _, obs = small_problem()
    rep = solve(obs, SolverConfig(rank=2, max_inner_iters=1, beta_max=2.0**8))
    assert not rep.converged
    assert all(s.iterations == 1 and not s.converged for s in rep.stages)
    assert rep.to_dict()["converged"] is False
