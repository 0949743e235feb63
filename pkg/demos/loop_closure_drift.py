"""
Loop closure on a drifting boustrophedon scan
=============================================

Simulates a camera scanning a grid in alternating rows, feeds the layout
solver noisy pairwise estimates with a small systematic drift at each row
change, and shows how spatial loop closure pulls the rows back into
register.  No images are rendered: this demo exercises the estimation-to-
layout half of the system in isolation.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from swipemosaic.forest import MotionEstimate
from swipemosaic.layout import find_loop_points, solve_layout

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

# Ground truth: an 8x8 boustrophedon scan, 0.0625 width units per step.
side, step = 8, 0.0625
truth = []
for row in range(side):
    cols = range(side) if row % 2 == 0 else range(side - 1, -1, -1)
    truth.extend((col * step, row * step) for col in cols)
truth = np.array(truth)
n = len(truth)

# Temporal chain estimates: truth plus noise, plus a horizontal drift every
# time the scan turns onto a new row (the classic accumulating error).
rng = np.random.default_rng(0)
estimates = {}
for i in range(n - 1):
    mu = truth[i + 1] - truth[i] + rng.normal(0.0, 0.002, size=2)
    if i % side == side - 1:          # row-change link
        mu = mu + np.array([0.015, 0.0])
    estimates[(i, i + 1)] = MotionEstimate(mean=mu, sigma=np.full(2, 0.005),
                                           samples=mu[None, :])

initial = solve_layout(n, estimates)
drifted = initial.positions

# Loop closure: find frames that ended up spatially close but temporally
# far apart, re-estimate those pairs (here: from ground truth plus noise,
# standing in for running the forest on the actual frame pairs), and
# re-solve.
loops = find_loop_points(initial, k=5, n=4)
print(f"found {len(loops.pairs)} loop pairs")
loop_estimates = dict(estimates)
for (i, j) in loops.pairs:
    mu = truth[j] - truth[i] + rng.normal(0.0, 0.002, size=2)
    loop_estimates[(i, j)] = MotionEstimate(mean=mu, sigma=np.full(2, 0.005),
                                            samples=mu[None, :])
closed = solve_layout(n, loop_estimates,
                      pair_set=initial.pair_set.union(loops)).positions

err_before = np.linalg.norm(drifted - truth, axis=1)
err_after = np.linalg.norm(closed - truth, axis=1)
print(f"max position error before closure: {err_before.max():.4f}")
print(f"max position error after closure:  {err_after.max():.4f}")

fig, axes = plt.subplots(1, 3, figsize=(13, 4.2), sharex=True, sharey=True)
for ax, pts, title in ((axes[0], truth, "ground truth"),
                       (axes[1], drifted, "temporal chain only"),
                       (axes[2], closed, "with loop closure")):
    ax.plot(pts[:, 0], pts[:, 1], "-o", markersize=3, linewidth=0.8)
    ax.set_title(title)
    ax.set_aspect("equal")
fig.tight_layout()
fig.savefig(out / "loop_closure_drift.png", dpi=110)
print(f"figure written to {out}/loop_closure_drift.png")
