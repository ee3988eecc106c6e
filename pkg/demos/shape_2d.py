"""
Pruning the medial axis of a noisy 2D shape
===========================================

Boundary noise creates many small medial balls. Filtering by thickness and
covering keeps the main branches and loses few cells. Pass ``--plot`` to draw
the result (needs matplotlib).
"""
import sys

import numpy as np

import sepmedial
from sepmedial.filtering import FilterParams, filtered_reconstruct, measure

rng = np.random.default_rng(3)
yy, xx = np.mgrid[:160, :200]
img = ((xx - 70) ** 2 / 55**2 + (yy - 80) ** 2 / 40**2 < 1) | \
      ((np.abs(xx - 140) < 45) & (np.abs(yy - 80) < 12))
# bumpy border
img ^= (rng.random(img.shape) < 0.04) & (sepmedial.sdt(img).dist <= 2)

balls = sepmedial.rdma(img)
print(f"{int(img.sum())} cells, {len(balls)} reduced medial balls")

measured = measure(balls, img, diameter="bbox")
rows = []
for kappa0 in (0.0, 0.0005, 0.002, 0.01):
    params = FilterParams(rho0=0.005, kappa0=kappa0)
    rec, lost = filtered_reconstruct(measured, params, img.shape)
    kept = sum(m.rho_norm >= params.rho0 and m.kappa_norm >= kappa0 for m in measured)
    rows.append((kappa0, kept, lost, rec))
    print(f"kappa0={kappa0:<7} {kept:5d} balls  {lost:5d} cells lost")

if "--plot" in sys.argv:
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, len(rows), figsize=(4 * len(rows), 3.5))
    for ax, (kappa0, kept, lost, rec) in zip(axes, rows):
        ax.imshow(img.astype(int) + rec, cmap="Greys", interpolation="nearest")
        ax.set_title(f"kappa0={kappa0}: {kept} balls, {lost} lost")
        ax.axis("off")
    plt.tight_layout()
    plt.show()
