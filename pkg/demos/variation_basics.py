"""
q-variation, jumps and the short/long split
===========================================

Sampled paths, their q-variation, delta-jump counts and the dyadic
decomposition into short and long variation.
"""

import numpy as np
from sphvar.variation import (SampledPath, var_norm, jump_count, short_variation,
                              dyadic_subpath, dyadic_variation, extrema_reduce)

rng = np.random.default_rng(0)
t = np.sort(rng.uniform(1, 64, 200))
path = SampledPath(t, np.sin(3 * np.log(t)) + 0.1 * rng.normal(size=t.size))

# the variation decreases in q
for q in (1, 2, 3, 4, np.inf):
    print(f"V_{q} = {var_norm(path, q).value:.4f}")

# delta * N_delta^{1/q} never exceeds V_q
V3 = var_norm(path, 3).value
for delta in (0.1, 0.5, 1.0):
    n = jump_count(path, delta)
    print(f"delta={delta}: {n} jumps, delta*N^(1/3) = {delta * n ** (1 / 3):.3f} <= {V3:.3f}")

# short variation inside dyadic blocks, plus variation over dyadic times
blocks, short = short_variation(path, 3)
print("short variation per block:", {j: round(v, 3) for j, v in blocks.items()})
# the long part samples the same family at t = 1, 2, 4, ..., 64
td = np.unique(np.concatenate([t, 2.0 ** np.arange(0, 7)]))
dense = SampledPath(td, np.sin(3 * np.log(td)))
print("short total:", round(short, 4))
print("dyadic variation:", round(dyadic_variation(dyadic_subpath(dense), 3), 4))

# only turning points matter
print(f"{len(path)} samples reduce to {len(extrema_reduce(path))} extrema")
