import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from schreier_lab.errors import EmptySet, ZeroAlternatives
from schreier_lab.rng import RETRY_STRIDE, LabelField, register_channels, to_unit


def test_labels_are_pure_functions():
    f = LabelField(7)
    a = f.bits(np.arange(100), 3)
    b = f.bits(np.arange(100)[::-1], 3)[::-1]
    assert np.array_equal(a, b)
    assert f.label(42, 3) == LabelField(7).label(42, 3)


def test_channels_and_seeds_are_independent_streams():
    f = LabelField(1)
    assert not np.array_equal(f.bits(np.arange(64), 0), f.bits(np.arange(64), 1))
    assert not np.array_equal(f.bits(np.arange(64), 0), LabelField(2).bits(np.arange(64), 0))
    g = LabelField(1, graph_id=5)
    assert not np.array_equal(f.bits(np.arange(64), 0), g.bits(np.arange(64), 0))


def test_uniformity_ks():
    u = LabelField(3).labels(20000, 0)
    assert u.min() >= 0 and u.max() < 1
    assert stats.kstest(u, "uniform").pvalue > 1e-3


def test_retry_fields_use_disjoint_channels():
    f = LabelField(9)
    r = f.retry(2)
    assert r.base == 2 * RETRY_STRIDE
    assert np.array_equal(r.bits(np.arange(10), 4), f.bits(np.arange(10), 4 + 2 * RETRY_STRIDE))


@given(st.sets(st.integers(0, 10_000), min_size=1, max_size=40), st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_joint_label_is_order_free(vs, seed):
    f = LabelField(seed)
    vs = list(vs)
    assert f.joint_bits(vs, 1) == f.joint_bits(vs[::-1], 1) == f.joint_bits(vs + vs, 1)


def test_group_bits_match_joint_bits():
    f = LabelField(11)
    groups = np.array([0, 1, 0, 2, 1, -1, 2, 2])
    gb = f.group_bits(groups, 5)
    for c in range(3):
        assert int(gb[c]) == f.joint_bits(np.flatnonzero(groups == c), 5)
    # overlapping sets
    members = np.array([0, 1, 1, 2])
    owners = np.array([0, 0, 1, 1])
    ob = f.grouped_bits(members, owners, 5, 2)
    assert int(ob[0]) == f.joint_bits([0, 1], 5) and int(ob[1]) == f.joint_bits([1, 2], 5)


def test_choose_range_and_errors():
    f = LabelField(0)
    picks = {f.choose([i, i + 1], 2, 3) for i in range(200)}
    assert picks == {0, 1, 2}
    with pytest.raises(ZeroAlternatives):
        f.choose([1], 2, 0)
    with pytest.raises(EmptySet):
        f.joint_bits([], 2)


def test_resampling_outside_keeps_inside():
    f = LabelField(4)
    keep = np.zeros(50, dtype=bool)
    keep[10:20] = True
    h = f.resampled_outside(keep, 99)
    a, b = f.bits(np.arange(50), 0), h.bits(np.arange(50), 0)
    assert np.array_equal(a[keep], b[keep]) and not np.any(a[~keep] == b[~keep])


def test_channel_registry():
    a = register_channels("test-ns-a", 8)
    assert register_channels("test-ns-a", 8) == a
    b = register_channels("test-ns-b", 8)
    assert abs(a - b) >= 8
    with pytest.raises(ValueError):
        register_channels("test-ns-a", 10_000)


def test_to_unit_bounds():
    assert to_unit(np.uint64(0)) == 0.0
    assert to_unit(np.uint64(2**64 - 1)) < 1.0
