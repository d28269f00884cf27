import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarmlead.errors import ConfigError, InsufficientDataError
from swarmlead.methods import TEConfig, te_infer
from swarmlead.methods.te import jitter, ksg_cmi, pairwise_te, transfer_entropy


def plugin_te(source, dest):
    """Discrete plug-in ``TE(source -> dest)`` in nats, history length 1."""
    triples = Counter(zip(dest[1:], source[:-1], dest[:-1]))
    n = sum(triples.values())
    xz = Counter((x, z) for x, _, z in triples.elements())
    yz = Counter((y, z) for _, y, z in triples.elements())
    z_ = Counter(z for _, _, z in triples.elements())
    return sum(c / n * math.log(c * z_[z] / (xz[x, z] * yz[y, z])) for (x, y, z), c in triples.items())


def test_plugin_oracle_on_copy_chain():
    g = np.random.default_rng(0)
    y = g.integers(0, 2, 5000)
    x = np.r_[0, y[:-1]]
    assert plugin_te(y, x) == pytest.approx(math.log(2), abs=0.01)
    assert plugin_te(x, y) == pytest.approx(0.0, abs=0.01)


def test_binary_copy_chain_matches_oracle():
    g = np.random.default_rng(1)
    y = g.integers(0, 2, 5000).astype(float)
    x = np.r_[0.0, y[:-1]]
    te = transfer_entropy(y, x)
    assert abs(te - plugin_te(y, x)) < 0.07
    assert transfer_entropy(x, y) < 0.07


def test_ksg_gaussian_and_independent():
    g = np.random.default_rng(2)
    xy = g.multivariate_normal([0, 0], [[1, 0.6], [0.6, 1]], 2000)
    z = g.standard_normal(2000)
    assert ksg_cmi(xy[:, 0], xy[:, 1], z) == pytest.approx(-0.5 * math.log(1 - 0.36), abs=0.05)
    a, b, c = g.standard_normal((3, 2000))
    assert ksg_cmi(a, b, c) == pytest.approx(0.0, abs=0.05)


def test_ksg_conditioning_removes_common_cause():
    g = np.random.default_rng(3)
    z = g.standard_normal(1500)
    x = z + 0.3 * g.standard_normal(1500)
    y = z + 0.3 * g.standard_normal(1500)
    assert ksg_cmi(x, y, g.standard_normal(1500)) > 0.5
    assert abs(ksg_cmi(x, y, z)) < 0.05


def test_ksg_needs_enough_samples():
    with pytest.raises(InsufficientDataError):
        ksg_cmi(np.arange(5.0), np.arange(5.0), np.arange(5.0), k=4)
    with pytest.raises(InsufficientDataError):
        ksg_cmi(np.arange(9.0), np.arange(8.0), np.arange(9.0))


def test_jitter_is_deterministic_and_tiny():
    s = np.array([1.0, 1.0, 2.0, 2.0, 3.0])
    a, b = jitter(s), jitter(s)
    np.testing.assert_array_equal(a, b)
    assert np.abs(a - s).max() < 1e-8
    assert len(np.unique(a)) == 5


def test_constant_series_give_zero():
    assert transfer_entropy(np.ones(40), np.arange(40.0)) == 0.0
    assert transfer_entropy(np.arange(40.0), np.ones(40)) == 0.0


@given(st.integers(0, 2**32 - 1))
def test_te_nonnegative(seed):
    g = np.random.default_rng(seed)
    a, b = g.normal(size=(2, 60))
    assert transfer_entropy(a, b) >= 0.0


def test_pairwise_kernel_matches_scalar():
    g = np.random.default_rng(4)
    seg = g.normal(size=(4, 50))
    seg[2] = 1.0
    te = pairwise_te(seg, 4)
    for j in range(4):
        for i in range(4):
            if i != j:
                assert te[j, i] == pytest.approx(transfer_entropy(seg[j], seg[i]), abs=1e-12)
    assert (te[2] == 0).all() and (te[:, 2] == 0).all()


def test_copy_pair_direction(copy_pair):
    m = te_infer(copy_pair, TEConfig(window=50))
    assert np.argmax(m.out_scores()) == 0
    assert m.weights[0, 1:4].min() > 0
    assert (m.weights[1:, 0] == 0).all()


def test_config_validation():
    for bad in [dict(embedding=2), dict(k_neighbors=0), dict(window=6), dict(variables=("spin",))]:
        with pytest.raises(ConfigError):
            TEConfig(**bad).validate()
