import math

import numpy as np
import pytest

import msdc


def test_table1_params_and_relaxation():
    p = msdc.CFParams.table1()
    p.validate()
    assert msdc.relaxation_length(10.0, p) == pytest.approx(50.0)
    # At the steady headway the acceleration vanishes.
    assert msdc.acceleration(50.0, 10.0, 0.0, p) == pytest.approx(0.0, abs=1e-12)


def test_steady_state_nulls_rhs():
    r = msdc.ReducedParams(1.0, 2.0, 5.0)
    x1, x2 = msdc.steady_state(10.0, r)
    assert (x1, x2) == pytest.approx((50.0, 10.0))


def test_stability_verdicts():
    stable, rho = msdc.is_stable(1.0, 2.0, 5.0, 0.2)
    assert stable and rho < 1.0
    stable, rho = msdc.is_stable(1.6, 2.0, 5.0, 0.2)
    assert not stable and rho > 1.0


def test_sweep_shape_and_monotone_in_tau():
    rho = msdc.stability_sweep(
        np.linspace(0.01, 2, 8), np.linspace(0.01, 8, 8), [0.2, 1.0, 2.0], 5.0, threads=1
    )
    assert rho.shape == (3, 8, 8)
    counts = [(rho[i] < 1).sum() for i in range(3)]
    assert counts[0] >= counts[1] >= counts[2]


def test_euler_row_count_and_dde_decay():
    traj = msdc.simulate_euler(msdc.CFParams.table1(), horizon=50.0, dt=0.1)
    assert len(traj["t"]) == 501
    dde = msdc.simulate_dde(msdc.ReducedParams(1.0, 2.0, 5.0), 0.2, 10.0, eps=0.1)
    assert abs(dde["v_ego"][-1] - 10.0) < 0.1
    assert not dde["diverged"]


def test_iqr_matches_batch_least_squares():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(200, 3))
    b = a @ np.array([0.3, -1.2, 2.0]) + 0.01 * rng.normal(size=200)
    est = msdc.IqrEstimator(1.0, 1e6)
    for x, y in zip(a, b):
        assert est.update(x, y)
    np.testing.assert_allclose(est.params, msdc.batch_ls(a, b), atol=1e-8)
    assert est.samples_seen == 200


def test_identify_noiseless_table1():
    traj = msdc.simulate_euler(msdc.CFParams.table1())
    out = msdc.identify(traj, 0.1, truth=np.array([0.1, -0.5, 0.5]))
    assert out["final_delay"] in (4, 5)
    np.testing.assert_allclose(out["final_params"], [0.1, -0.5, 0.5], rtol=1e-2)


def test_noise_helpers():
    clean = np.sin(np.linspace(0, 10, 400)) + 2.0
    noisy = msdc.inject_noise(clean, 15.0, seed=7)
    assert msdc.measure_snr(clean, noisy) == pytest.approx(15.0, abs=1e-9)
    assert math.isinf(msdc.measure_snr(clean, clean))
    assert msdc.rmse([0.0, 0.0], [3.0, 4.0]) == pytest.approx(math.sqrt(12.5))


def test_errors_are_typed():
    with pytest.raises(msdc._core.ConfigError):
        p = msdc.CFParams.table1()
        p.mass_kg = -1.0
        p.validate()
    with pytest.raises(msdc._core.MsdcError):
        msdc.batch_ls(np.ones((5, 3)), np.ones(5))
