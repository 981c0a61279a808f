import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from xi_limit.rng import derive_stream, sample_unit_sphere


def draws(stream, m=10_000):
    return stream.generator.standard_normal(m)


def test_same_triple_is_bit_identical():
    a = draws(derive_stream(7, 0, "chain"))
    b = draws(derive_stream(7, 0, "chain"))
    assert np.array_equal(a, b)


@pytest.mark.parametrize("other", [(7, 1, "chain"), (7, 0, "stats"), (8, 0, "chain")])
def test_distinct_triples_differ(other):
    a = draws(derive_stream(7, 0, "chain"))
    b = draws(derive_stream(*other))
    assert not np.any(a == b)


def test_negative_replica_rejected():
    with pytest.raises(ValueError):
        derive_stream(1, -1, "chain")


def test_scalar_sample_is_unimodular():
    x = sample_unit_sphere(derive_stream(3, 0, "chain"), 1)
    assert x.shape == (1,)
    assert abs(abs(x[0]) - 1) < 1e-12


@given(seed=st.integers(0, 2**63 - 1), n=st.integers(1, 64))
@settings(max_examples=50, deadline=None)
def test_unit_norm(seed, n):
    x = sample_unit_sphere(derive_stream(seed, 0, "chain"), n)
    assert abs(np.linalg.norm(x) - 1) < 1e-12


def test_zero_dimension_rejected():
    with pytest.raises(ValueError):
        sample_unit_sphere(derive_stream(0, 0, "chain"), 0)


def test_first_coordinate_mass():
    # coordinates are exchangeable and |x_i|^2 sums to 1, so E|x_1|^2 = 1/n
    s = derive_stream(5, 0, "stats")
    v = np.array([abs(sample_unit_sphere(s, 8)[0]) ** 2 for _ in range(100_000)])
    se = v.std(ddof=1) / np.sqrt(v.size)
    assert abs(v.mean() - 1 / 8) < 3 * se


def test_isotropy():
    n = 6
    g = np.random.default_rng(0)
    v = g.standard_normal(n) + 1j * g.standard_normal(n)
    v /= np.linalg.norm(v)
    s1, s2 = derive_stream(9, 0, "stats"), derive_stream(9, 1, "stats")
    a = np.array([abs(sample_unit_sphere(s1, n)[0]) ** 2 for _ in range(10_000)])
    b = np.array([abs(np.vdot(v, sample_unit_sphere(s2, n))) ** 2 for _ in range(10_000)])
    assert stats.ks_2samp(a, b).pvalue > 0.01
