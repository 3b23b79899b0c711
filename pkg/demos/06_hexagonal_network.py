"""Hexagonal cellular network: net uplink rate distributions under path
loss, 8-dB log-normal shadowing, and frequency reuse 1/3/7.

Higher reuse factors trade bandwidth for less interference: they win at the
unlucky tail of the distribution, while reuse 1 wins at the median and
above.  The 95%-likely rate (5th percentile) improves ~8x from N=20 to
N=100.
"""

import numpy as np

from mumimo import (NetworkScenario, OfdmParams, build_hex_grid,
                    rate_distribution)

ofdm = OfdmParams()
print(f"OFDM overhead T_u/T_s = {ofdm.overhead:.4f}, "
      f"bandwidth {ofdm.bandwidth / 1e6:.0f} MHz")
for r in (1, 3, 7):
    grid = build_hex_grid(NetworkScenario(reuse_factor=r))
    print(f"reuse {r}: {grid.shape[0]} co-channel cells within 8 km, "
          f"nearest at {np.hypot(*grid[1]):.0f} m")

print(f"\n{'r':>3} {'N':>4} {'95%-likely':>12} {'median':>10} {'mean':>10}"
      f"   [Mbit/s]")
rng = np.random.default_rng(7)
dists = {}
for n in (20, 100):
    for r in (1, 3, 7):
        sc = NetworkScenario(reuse_factor=r, antennas=n)
        d = rate_distribution(sc, ofdm, num_drops=100, samples_per_drop=50,
                              rng=rng)
        dists[(r, n)] = d
        print(f"{r:>3} {n:>4} {d.likely_95 / 1e6:>12.4f} "
              f"{d.percentile(50) / 1e6:>10.3f} {d.mean / 1e6:>10.3f}")

print("\nreuse tradeoff at N = 100 (CDF crossing):")
for q in (1, 5, 25, 50, 90):
    row = "  ".join(f"r={r}: {dists[(r, 100)].percentile(q)/1e6:8.3f}"
                    for r in (1, 3, 7))
    print(f"  pct {q:>2}: {row}")
ratio = dists[(1, 100)].likely_95 / dists[(1, 20)].likely_95
print(f"\n95%-likely improvement (r=1) from N=20 to N=100: {ratio:.1f}x")
