"""Grow one virtual isometry and watch the rescaled eigenangles settle.

Each step multiplies ``U_{n-1} (+) 1`` by a reflection that sends the last
basis vector to a uniform point of the sphere. The marginals are Haar, and
the small rescaled angles ``y_k = n theta_k / 2 pi`` converge along the chain.
"""
import numpy as np

from xi_limit import VirtualIsometryChain, derive_stream, grow_chain, unitarity_residual

dims = [16, 32, 64, 128, 256, 512]
chain = grow_chain(VirtualIsometryChain(replica_id=0), dims, derive_stream(2024, 0, "chain"))

print(f"{'n':>5} {'residual':>10} {'y_1':>9} {'y_2':>9} {'y_-1':>9}")
for n in dims:
    snap = chain.snapshots[n]
    th = snap.spectrum.theta
    y = n * th / (2 * np.pi)
    print(f"{n:5d} {snap.unitarity_residual:10.2e} {y[0]:9.4f} {y[1]:9.4f} {y[-1] - n:9.4f}")

print("final unitarity residual", unitarity_residual(chain.U))
