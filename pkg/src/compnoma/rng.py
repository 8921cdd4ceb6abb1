"""Counter-based random variates addressed by (seed, sample index, link index).

Every variate is a pure function of its address, so a sample drawn by any
worker, in any chunking, is bit-identical.  The mixer is the SplitMix64
finalizer applied three times, once per address component.
"""

from __future__ import annotations

import numpy as np

from ._accel import HAVE_NUMBA

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
LINK_STEP = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV_2_53 = 1.0 / 9007199254740992.0


def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def seed_key(seed: int) -> np.uint64:
    """Pre-mixed key for a 64-bit seed."""
    z = np.array([int(seed) & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    return _mix(z ^ GOLDEN)[0]


def hash_address(seed: int, sample_index, link_index) -> np.ndarray:
    """64-bit hash of each (seed, sample, link) address (numpy arrays broadcast)."""
    key = np.array([seed_key(seed)], dtype=np.uint64)
    s = np.asarray(sample_index, dtype=np.uint64)
    k = np.asarray(link_index, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = _mix(key + (s + _ONE) * GOLDEN)
        return _mix(z + (k + _ONE) * LINK_STEP)


def uniform_open(seed: int, sample_index, link_index) -> np.ndarray:
    """Uniform variates on the open interval (0, 1)."""
    h = hash_address(seed, sample_index, link_index)
    return ((h >> _S11).astype(np.float64) + 0.5) * _INV_2_53


def exponential(seed: int, sample_index, link_index, mean) -> np.ndarray:
    """Exponential variates with the given mean."""
    return -np.asarray(mean, dtype=float) * np.log(uniform_open(seed, sample_index, link_index))


if HAVE_NUMBA:
    import numba

    @numba.njit(cache=True, nogil=True, inline="always")
    def mix_nb(z):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        return z ^ (z >> _S31)

    @numba.njit(cache=True, nogil=True, inline="always")
    def exponential_nb(key, sample_index, link_index, mean):
        z = mix_nb(key + (numba.uint64(sample_index) + _ONE) * GOLDEN)
        h = mix_nb(z + (numba.uint64(link_index) + _ONE) * LINK_STEP)
        u = (numba.float64(h >> _S11) + 0.5) * _INV_2_53
        return -mean * np.log(u)
