import numpy as np
import pytest

from compnoma import _accel, rng
from compnoma._kernels import capacity_samples, capacity_samples_numba, capacity_samples_numpy
from compnoma.montecarlo import McConfig, estimate_all

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def test_env_flag(monkeypatch):
    monkeypatch.delenv(_accel.ENV_FLAG, raising=False)
    assert _accel.backend_name() == "numba"
    for val in ("1", "true", "yes"):
        monkeypatch.setenv(_accel.ENV_FLAG, val)
        assert _accel.backend_name() == "numpy"
    monkeypatch.setenv(_accel.ENV_FLAG, "0")
    assert _accel.backend_name() == "numba"


def test_variates_agree():
    # hashes are identical; only the final log may differ in the last ulp
    from compnoma.rng import exponential_nb

    key = rng.seed_key(123)
    s = np.arange(0, 1000, 37, dtype=np.uint64)
    for link in (0, 5, 11):
        ref = rng.exponential(123, s, link, 0.3)
        got = np.array([exponential_nb(key, int(i), link, 0.3) for i in s])
        np.testing.assert_array_max_ulp(got, ref, maxulp=2)


@pytest.mark.parametrize("seed", [0, 2**64 - 1, 987654321])
def test_kernels_agree(lt_b3, params, seed):
    a = capacity_samples_numpy(params, lt_b3, seed, 1000, 4000)
    b = capacity_samples_numba(params, lt_b3, seed, 1000, 4000)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-15)


def test_dispatch_follows_flag(monkeypatch, lt_b2, params):
    monkeypatch.setenv(_accel.ENV_FLAG, "1")
    a = capacity_samples(params, lt_b2, 1, 0, 100)
    np.testing.assert_array_equal(a, capacity_samples_numpy(params, lt_b2, 1, 0, 100))
    with pytest.raises(ValueError):
        capacity_samples(params, lt_b2, 1, 0, 100, backend="cuda")


def test_estimates_agree_across_backends(lt_b2, params):
    a = estimate_all(params, lt_b2, McConfig(samples=100_000, backend="numpy"))
    b = estimate_all(params, lt_b2, McConfig(samples=100_000, backend="numba"))
    for key in a:
        assert a[key].mean == pytest.approx(b[key].mean, rel=1e-12)
