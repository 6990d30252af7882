import math

import numpy as np
import pytest
from scipy.special import zeta

from txnet.errors import InvalidSpec
from txnet.graph import components
from txnet.metrics import degree_sequence
from txnet.synth import (POWER_LAW_CAP, GenSpec, fake_address, generate_feed, generate_pa,
                         generate_uniform, power_law_sf, sample_power_law)


def _same(g, h):
    return (g.addresses == h.addresses and np.array_equal(g.src, h.src)
            and np.array_equal(g.dst, h.dst))


def test_pa_small_tree():
    g = generate_pa(10, 1, 3)
    assert g.n_nodes == 10 and g.n_arcs == 9
    assert len(set(components(g).tolist())) == 1


@pytest.mark.parametrize("n, m", [(10, 1), (50, 2), (200, 3), (5, 4)])
def test_pa_edge_count_simple(n, m):
    g = generate_pa(n, m, 11)
    assert g.n_arcs == math.comb(m + 1, 2) + (n - m - 1) * m
    pairs = set(zip(np.minimum(g.src, g.dst).tolist(), np.maximum(g.src, g.dst).tolist()))
    assert len(pairs) == g.n_arcs


def test_pa_seed_clique():
    g = generate_pa(4, 3, 0)
    assert g.n_arcs == 6


def test_pa_invalid():
    for n, m in [(3, 3), (5, 0)]:
        with pytest.raises(InvalidSpec):
            generate_pa(n, m, 0)


def test_pa_heavy_tail_grows():
    maxima = [int(degree_sequence(generate_pa(n, 2, 5)).max()) for n in (100, 1000, 10_000)]
    assert maxima[0] < maxima[1] < maxima[2]


def test_uniform_examples():
    assert generate_uniform(10, 0.0, 1).n_arcs == 0
    k5 = generate_uniform(5, 1.0, 1)
    assert k5.n_arcs == 10
    g = generate_uniform(1000, 0.002, 8)
    mean = math.comb(1000, 2) * 0.002
    sd = math.sqrt(math.comb(1000, 2) * 0.002 * 0.998)
    assert abs(g.n_arcs - mean) <= 5 * sd
    with pytest.raises(InvalidSpec):
        generate_uniform(5, 1.5, 0)
    with pytest.raises(InvalidSpec):
        generate_uniform(0, 0.5, 0)


def test_generators_deterministic():
    assert _same(generate_pa(300, 2, 9), generate_pa(300, 2, 9))
    assert not _same(generate_pa(300, 2, 9), generate_pa(300, 2, 10))
    assert _same(generate_uniform(80, 0.1, 4), generate_uniform(80, 0.1, 4))
    spec = GenSpec("preferential_attachment", 50, {"m": 2}, 1)
    assert _same(spec.generate(), generate_pa(50, 2, 1))


def test_synthetic_timestamps_one_second_apart():
    g = generate_pa(20, 1, 0)
    assert np.all(np.diff(g.timestamp_ms) == 1000)


def test_sampler_p1():
    x = sample_power_law(2.5, 1, 10_000, 123)
    assert abs(np.mean(x == 1) - 1 / zeta(2.5)) <= 0.02


def test_sampler_support_and_determinism():
    x = sample_power_law(1.8, 5, 5000, 1)
    assert x.min() >= 5 and x.max() <= POWER_LAW_CAP
    assert np.array_equal(x, sample_power_law(1.8, 5, 5000, 1))
    with pytest.raises(InvalidSpec):
        sample_power_law(1.0, 1, 10, 0)
    with pytest.raises(InvalidSpec):
        sample_power_law(2.0, 0, 10, 0)


def test_sampler_ks_convergence():
    good = 0
    for seed in range(40):
        x = np.sort(sample_power_law(2.5, 1, 10_000, seed))
        values, counts = np.unique(x, return_counts=True)
        emp_sf_after = 1 - np.cumsum(counts) / len(x)
        model_after = power_law_sf(2.5, 1, values + 1)
        emp_sf_at = emp_sf_after + counts / len(x)
        model_at = power_law_sf(2.5, 1, values)
        ks = max(np.abs(emp_sf_after - model_after).max(), np.abs(emp_sf_at - model_at).max())
        good += ks < 0.02
    assert good >= 38


def test_fake_address_shape():
    a = fake_address(1, 2)
    assert a[0] in "13" and 26 <= len(a) <= 35
    assert a == fake_address(1, 2) and a != fake_address(1, 3)


def test_feed_deterministic():
    a = list(generate_feed(7, n_tx=50))
    assert a == list(generate_feed(7, n_tx=50))
    times = [t for t, _ in a]
    assert times == sorted(times)
    assert all(f["op"] == "utx" for _, f in a)
