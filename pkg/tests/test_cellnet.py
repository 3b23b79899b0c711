import math

import numpy as np
import pytest

from mumimo import cellnet as cn


def test_scenario_validation():
    with pytest.raises(ValueError):
        cn.NetworkScenario(reuse_factor=4)
    with pytest.raises(ValueError):
        cn.NetworkScenario(exclusion_radius=2000.0)
    with pytest.raises(ValueError):
        cn.NetworkScenario(path_loss_exponent=1.5)
    with pytest.raises(ValueError):
        cn.NetworkScenario(antennas=5, users_per_cell=10)
    with pytest.raises(ValueError):
        cn.OfdmParams(useful_duration=1e-3)


def test_ofdm_overhead_value():
    np.testing.assert_allclose(cn.OfdmParams().overhead, 66.7 / 71.4,
                               rtol=1e-12)


@pytest.mark.parametrize("reuse, distance", [
    (1, math.sqrt(3) * 1000.0),
    (3, 3000.0),
    (7, math.sqrt(21) * 1000.0),
])
def test_cochannel_distance_is_sqrt_3r_radius(reuse, distance):
    grid = cn.build_hex_grid(cn.NetworkScenario(reuse_factor=reuse))
    np.testing.assert_allclose(np.hypot(*grid[1]), distance, rtol=1e-12)
    assert np.hypot(*grid[0]) == 0.0  # home first


def test_reuse_partition_counts_and_nesting():
    grids = {r: cn.build_hex_grid(cn.NetworkScenario(reuse_factor=r))
             for r in (1, 3, 7)}
    assert grids[7].shape[0] < grids[3].shape[0] < grids[1].shape[0]
    # co-channel sets of r = 3, 7 are sublattices of the full grid
    full = {tuple(np.round(p, 6)) for p in grids[1]}
    for r in (3, 7):
        assert {tuple(np.round(p, 6)) for p in grids[r]} <= full
    # everything stays within the horizon
    for grid in grids.values():
        assert np.hypot(grid[:, 0], grid[:, 1]).max() <= 8000.0


def test_uniform_hexagon_sampling():
    rng = np.random.default_rng(3)
    pts = cn._uniform_hexagon(rng, 5000, 1000.0, 100.0)
    r = np.hypot(pts[:, 0], pts[:, 1])
    assert r.min() >= 100.0
    assert np.abs(pts[:, 0]).max() <= math.sqrt(3) / 2 * 1000.0 + 1e-9
    inside = np.abs(pts[:, 1]) <= 1000.0 - np.abs(pts[:, 0]) / math.sqrt(3)
    assert inside.all()
    # corners get filled: some points beyond the inscribed circle
    assert (r > math.sqrt(3) / 2 * 1000.0).any()


def test_drop_users_gain_model():
    sc = cn.NetworkScenario()
    grid = cn.build_hex_grid(sc)
    rng = np.random.default_rng(1)
    shadows = []
    for _ in range(300):
        drop = cn.drop_users(sc, grid, rng)
        dist = np.hypot(drop.positions[..., 0] - grid[0, 0],
                        drop.positions[..., 1] - grid[0, 1])
        # invert the path-loss part; what remains is the shadow in dB
        shadows.append(10 * np.log10(drop.beta_home * (dist / 100.0) ** 3.8))
    shadows = np.concatenate([s.ravel() for s in shadows])
    assert abs(shadows.mean()) < 0.1
    np.testing.assert_allclose(shadows.std(), 8.0, rtol=0.02)


def test_beta_distance_scaling():
    # mean beta ratio between 200 m and 400 m ~ 2^3.8 (pure path loss; the
    # log-normal factor has equal mean at both distances)
    ratio = 2.0 ** 3.8
    sc = cn.NetworkScenario()
    rng = np.random.default_rng(7)
    z = 10 ** (8.0 * rng.standard_normal(200_000) / 10.0)
    b200 = z[:100_000] / (200.0 / 100.0) ** 3.8
    b400 = z[100_000:] / (400.0 / 100.0) ** 3.8
    np.testing.assert_allclose(b200.mean() / b400.mean(), ratio, rtol=0.1)


def test_net_rate_reuse_one_reduces_to_plain_rate():
    sc = cn.NetworkScenario(reuse_factor=1, antennas=20)
    ofdm = cn.OfdmParams()
    grid = cn.build_hex_grid(sc)
    drop = cn.drop_users(sc, grid, np.random.default_rng(5))
    rates = cn.net_rate_samples(sc, ofdm, drop, np.random.default_rng(6),
                                samples=4)
    assert rates.shape == (4, 10)
    assert (rates >= 0).all()
    assert rates.max() <= ofdm.bandwidth * ofdm.overhead \
        * math.log2(1 + 1e18)


def test_net_rate_increases_with_power():
    ofdm = cn.OfdmParams()
    vals = []
    for p_u in (1.0, 10.0, 100.0):
        sc = cn.NetworkScenario(reuse_factor=1, antennas=20,
                                transmit_snr=p_u)
        grid = cn.build_hex_grid(sc)
        drop = cn.drop_users(sc, grid, np.random.default_rng(11))
        r = cn.net_rate_samples(sc, ofdm, drop, np.random.default_rng(12),
                                samples=3000)
        vals.append(r.mean())
    assert vals[0] < vals[1] < vals[2]


def test_interference_stochastically_smaller_for_larger_reuse():
    # same geometry seed: the reuse-7 co-channel set is a subset, so the
    # aggregate interference must be smaller drop-by-drop
    ofdm = cn.OfdmParams()
    totals = {}
    for r in (1, 7):
        sc = cn.NetworkScenario(reuse_factor=r, antennas=20)
        grid = cn.build_hex_grid(sc)
        drop = cn.drop_users(sc, grid, np.random.default_rng(31))
        totals[r] = drop.beta_home[1:].sum()
    assert totals[7] < totals[1]


def test_rate_distribution_is_a_distribution():
    sc = cn.NetworkScenario(reuse_factor=3, antennas=20)
    dist = cn.rate_distribution(sc, cn.OfdmParams(), 10, 20,
                                np.random.default_rng(2))
    xs = np.linspace(0, dist.samples.max() * 1.1, 50)
    cdf = dist.cdf(xs)
    assert (np.diff(cdf) >= 0).all()
    assert cdf[0] >= 0.0 and cdf[-1] == 1.0
    assert dist.likely_95 <= dist.percentile(50.0) <= dist.samples.max()


def test_likely95_increases_with_antennas():
    ofdm = cn.OfdmParams()
    vals = []
    for n in (20, 100):
        sc = cn.NetworkScenario(reuse_factor=3, antennas=n)
        vals.append(cn.rate_distribution(sc, ofdm, 60, 40,
                                         np.random.default_rng(8)).likely_95)
    assert vals[1] > vals[0]
