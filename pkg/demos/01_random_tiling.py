"""
A random tiling of the two-periodic Aztec diamond
==================================================

Draw one exact sample of order 200 with a = 0.7 and look at it two ways:
the dominoes themselves, and the height function on even faces.
The four frozen corners, the rough liquid annulus and the smooth gas
in the middle are all visible at this size.
"""
from pathlib import Path

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from aztec_dimers.lattice import AztecGraph, WeightScheme, heights_from_occupancy
from aztec_dimers.render import write_tiling_svg
from aztec_dimers.shuffling import ShuffleSampler, sample_stream

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

# N counts fundamental domains; the order is k * l * N = 4 * 50
graph = AztecGraph(50, WeightScheme.two_periodic(0.7))
sampler = ShuffleSampler(graph)
occ = sampler.occupancy(sample_stream(seed=1, index=0))
print("order", graph.order, "dominoes", occ.sum())

write_tiling_svg(out / "tiling_order200.svg", graph, sampler.sample(sample_stream(1, 0)))

h = heights_from_occupancy(occ)
fig, ax = plt.subplots(figsize=(5, 5))
ax.imshow(h.T, origin="lower", cmap="viridis")
ax.set_title("height on even faces")
fig.savefig(out / "heights_order200.png", dpi=120)


def residual_spread(win):
    # remove the best plane; what is left is the fluctuation
    a, c = np.indices(win.shape)
    X = np.column_stack([np.ones(win.size), a.ravel(), c.ravel()])
    coef = np.linalg.lstsq(X, win.ravel().astype(float), rcond=None)[0]
    return coef[1:], np.std(win.ravel() - X @ coef)


m = graph.order // 2
for name, (x, y) in {"gas": (m, m), "liquid": (m // 2 + 10, m)}.items():
    slope, sd = residual_spread(h[x - 10:x + 11, y - 10:y + 11])
    print(f"{name:7s} slope {slope.round(2)}  residual sd {sd:.2f}")
