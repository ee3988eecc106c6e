"""
Medial balls of a cube
======================

A 20 x 20 x 20 cube centred in a 22^3 grid goes through the whole chain:
distance transform, skeleton balls, reduction, and reconstruction.
"""
import time

import numpy as np

import sepmedial
from sepmedial.filtering import FilterParams, filter_balls, measure

img = np.zeros((22, 22, 22), bool)
img[1:21, 1:21, 1:21] = True

###############################################################################
# Squared distances. The deepest cells are 10 steps from the border, so 100.
res = sepmedial.sdt(img)
print("max squared distance:", res.dist.max())

###############################################################################
# Every ball of the skeleton attains the upper envelope somewhere. The
# reduction then drops balls whose row segments are swallowed by others.
t = time.perf_counter()
sk = sepmedial.sk_extract(img)
rd, stats = sepmedial.rdma_reduce(sk, img.shape, return_stats=True)
print(f"skeleton {len(sk)} balls, reduced {len(rd)} balls "
      f"in {time.perf_counter() - t:.2f} s")
print("reduction stats:", stats)

###############################################################################
# Both sets give back the cube exactly.
for name, balls in (("skeleton", sk), ("reduced", rd)):
    same = np.array_equal(sepmedial.reconstruct(balls, img.shape), img)
    print(f"{name} reconstructs the cube: {same}")

###############################################################################
# Keep only thick balls that own a fair share of the cells. ``maxball``
# measures thickness relative to the thickest ball.
measured = measure(rd, img, diameter="maxball")
for rho0, kappa0 in ((0.5, 0.025), (0.5, 0.0005)):
    kept = filter_balls(measured, FilterParams(rho0, kappa0))
    cells = int(sepmedial.reconstruct(kept, img.shape).sum())
    print(f"rho0={rho0} kappa0={kappa0}: {len(kept)} balls, {cells} cells")
