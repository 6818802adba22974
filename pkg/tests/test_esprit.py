import numpy as np
import pytest

from hvaf.errors import ModelError, RankError
from hvaf.esprit import estimate, estimation_success, parameter_errors
from hvaf.signals import ExponentialModel, random_model, synthesize

# five damped peaks (|c|, f); damping taken as 1/value of the tabulated column
DAMPED_TABLE = [
    (0.5145, 0.1532, 26.47),
    (0.6623, 0.3135, 35.63),
    (0.7253, 0.4716, 48.78),
    (0.7825, 0.6124, 61.51),
    (0.9872, 0.7831, 81.50),
]


def test_pure_tone():
    x = np.exp(2j * np.pi * 0.25 * np.arange(1, 64))
    m = estimate(x, 1)
    assert m.freqs[0] == pytest.approx(0.25, abs=1e-10)
    assert m.damping[0] == pytest.approx(0.0, abs=1e-10)
    assert abs(m.amps[0]) == pytest.approx(1.0, abs=1e-10)


def test_damped_table_fully_observed():
    mags, freqs, t = map(np.array, zip(*DAMPED_TABLE))
    rng = np.random.default_rng(0)
    truth = ExponentialModel(freqs, mags * np.exp(2j * np.pi * rng.uniform(size=5)), 1.0 / t)
    est = estimate(synthesize(truth, 127), 5)
    np.testing.assert_allclose(np.abs(est.amps), mags, rtol=1e-6)
    np.testing.assert_allclose(est.freqs, freqs, rtol=1e-6)
    assert np.abs(est.amps[0]) == pytest.approx(0.5145, rel=1e-6)
    assert est.freqs[0] == pytest.approx(0.1532, rel=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_round_trip_two_components(seed):
    truth = random_model(2, damped=True, seed=seed, separation=0.05).sorted()
    est = estimate(synthesize(truth, 31), 2)
    np.testing.assert_allclose(est.freqs, truth.freqs, rtol=1e-6)
    np.testing.assert_allclose(est.damping, truth.damping, rtol=1e-6)
    np.testing.assert_allclose(est.amps, truth.amps, rtol=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_round_trip_many_components(seed):
    truth = random_model(6, damped=seed % 2 == 0, seed=100 + seed, separation=0.03).sorted()
    est = estimate(synthesize(truth, 63), 6)
    np.testing.assert_allclose(est.freqs, truth.freqs, rtol=1e-6)
    np.testing.assert_allclose(est.amps, truth.amps, rtol=1e-6)
    np.testing.assert_allclose(est.damping, truth.damping, rtol=1e-6, atol=1e-9)


def test_global_phase_rotates_amplitudes_only():
    truth = random_model(3, damped=True, seed=7, separation=0.05)
    x = synthesize(truth, 63)
    phi = 0.7
    a, b = estimate(x, 3), estimate(np.exp(1j * phi) * x, 3)
    np.testing.assert_allclose(b.freqs, a.freqs, atol=1e-10)
    np.testing.assert_allclose(b.damping, a.damping, atol=1e-10)
    np.testing.assert_allclose(b.amps, a.amps * np.exp(1j * phi), rtol=1e-8)


def test_rank_too_large():
    with pytest.raises(RankError):
        estimate(np.ones(9), 5)
    with pytest.raises(RankError):
        estimate(np.ones(9), 0)


def test_growing_exponential_clamped():
    x = 1.01 ** np.arange(1, 40) * np.exp(2j * np.pi * 0.1 * np.arange(1, 40))
    assert estimate(x, 1).damping[0] == 0.0


def test_ill_conditioned_fit_warns(monkeypatch):
    import hvaf.esprit

    x = np.exp(2j * np.pi * 0.2 * np.arange(1, 40))
    assert not estimate(x, 1).warnings
    # any Vandermonde fit has condition number >= 1
    monkeypatch.setattr(hvaf.esprit, "COND_WARN", 1.0 - 1e-9)
    with pytest.warns(RuntimeWarning, match="ill-conditioned"):
        m = estimate(x, 2)
    assert m.warnings


def test_estimation_success():
    truth = ExponentialModel.undamped([0.1, 0.3], [1.0, 2.0])
    assert estimation_success(truth, truth)
    off = ExponentialModel.undamped([0.1 * 1.01, 0.3 * 1.01], [1.0, 2.0])
    assert not estimation_success(truth, off)
    with pytest.raises(ModelError):
        estimation_success(truth, ExponentialModel.undamped([0.1], [1.0]))


def test_estimation_success_boundary_inclusive():
    # frequency error 2**-12 / 2**-2 = 2**-10 relative, tested against tol = 2**-10
    truth = ExponentialModel.undamped([0.25], [1.0])
    est = ExponentialModel.undamped([0.25 + 2.0**-12], [1.0])
    ferr, cerr = parameter_errors(truth, est)
    assert ferr == 2.0**-10 and cerr == 0
    assert estimation_success(truth, est, tol=2.0**-10)


def test_pairing_by_sorted_frequency():
    truth = ExponentialModel.undamped([0.3, 0.1], [2.0, 1.0])
    est = ExponentialModel.undamped([0.1, 0.3], [1.0, 2.0])
    assert parameter_errors(truth, est) == (0.0, 0.0)
