import numpy as np
import pytest
from scipy.special import ndtri

from switchsde.noise import (LANE_EULER, LANE_JUMP, NoiseStream,
                             inverse_normal_cdf, keyed_normal, keyed_uniform)


def test_deterministic_across_instances():
    a = NoiseStream(42)
    b = NoiseStream(42)
    reps = np.arange(100, dtype=np.uint64)
    assert np.array_equal(a.uniform(reps, LANE_EULER, np.uint64(5)),
                          b.uniform(reps, LANE_EULER, np.uint64(5)))


def test_batching_does_not_change_values():
    st = NoiseStream(7)
    reps = np.arange(1000, dtype=np.uint64)
    ctr = np.uint64(3)
    whole = st.normal(reps, LANE_JUMP, ctr)
    parts = np.concatenate([st.normal(reps[:311], LANE_JUMP, ctr),
                            st.normal(reps[311:], LANE_JUMP, ctr)])
    assert np.array_equal(whole, parts)


def test_keyed_route_matches_direct_route():
    st = NoiseStream(99, salt=3)
    reps = np.arange(64, dtype=np.uint64)
    ctr = np.arange(64, dtype=np.uint64)
    keys = st.replica_keys(reps)
    assert np.array_equal(st.uniform(reps, LANE_JUMP, ctr),
                          keyed_uniform(keys, LANE_JUMP, ctr))
    assert np.array_equal(st.normal(reps, LANE_EULER, ctr),
                          keyed_normal(keys, LANE_EULER, ctr))


def test_lanes_salts_and_seeds_decorrelate():
    st = NoiseStream(1)
    reps = np.arange(256, dtype=np.uint64)
    u0 = st.uniform(reps, LANE_EULER, np.uint64(0))
    u1 = st.uniform(reps, LANE_JUMP, np.uint64(0))
    u2 = NoiseStream(2).uniform(reps, LANE_EULER, np.uint64(0))
    u3 = NoiseStream(1, salt=1).uniform(reps, LANE_EULER, np.uint64(0))
    for other in (u1, u2, u3):
        assert not np.array_equal(u0, other)


def test_uniforms_open_interval_and_moments():
    st = NoiseStream(5)
    u = st.uniform(np.arange(200_000, dtype=np.uint64), LANE_EULER, np.uint64(1))
    assert u.min() > 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.005
    assert abs(u.std() - (1 / 12) ** 0.5) < 0.005


def test_normal_and_exponential_moments():
    st = NoiseStream(11)
    reps = np.arange(200_000, dtype=np.uint64)
    z = st.normal(reps, LANE_EULER, np.uint64(0))
    e = st.exponential(reps, LANE_JUMP, np.uint64(0))
    assert abs(z.mean()) < 0.01
    assert abs(z.var() - 1.0) < 0.02
    assert abs(e.mean() - 1.0) < 0.01
    assert e.min() > 0.0


def test_inverse_normal_cdf_matches_scipy():
    u = np.concatenate([np.linspace(1e-14, 1 - 1e-14, 100_001),
                        [1e-300, 1 - 1e-16, 0.5, 0.02425, 0.97575]])
    err = np.max(np.abs(inverse_normal_cdf(u) - ndtri(u)))
    assert err < 1e-7


def test_scalar_inputs_give_floats():
    st = NoiseStream(3)
    v = st.uniform(4, LANE_EULER, 9)
    assert np.ndim(v) == 0
    assert 0.0 < float(v) < 1.0


@pytest.mark.parametrize("seed", [0, 1, 2 ** 63 - 1])
def test_extreme_seeds_work(seed):
    st = NoiseStream(seed)
    assert 0.0 < float(st.uniform(0, LANE_EULER, 0)) < 1.0
