"""
No L^infinity bound for the variation
=====================================

Radial step functions whose ball averages at the origin alternate between
0 and at least 1/2 along t = 2^j.  The sampled variation grows like
n^{1/q} while the sup norm stays fixed.
"""

from sphvar.counterexamples import (alpha1_origin_values_exact, linfty_experiment,
                                    stepfn_alpha1, stepfn_general)
from sphvar.means import mean_step_at_origin

# exact values of the averages, j = 0..8
print([str(v) for v in alpha1_origin_values_exact(8, 2)])

f = stepfn_alpha1(8, 2)
print("sup norm:", f.sup_norm())

for n in (8, 27, 64):
    rep = linfty_experiment(n, 2, 3)
    print(f"n={n}: V_3/||f||_inf = {rep.ratio:.3f} >= {rep.lower_bound:.3f}, "
          f"moving the centre changes averages by <= {rep.max_perturbation:.4f}")

# for other alpha the radii grow like (16 |alpha - 1|)^j
f, times = stepfn_general(6, 2, 2.0)
print([round(float(abs(mean_step_at_origin(f, 2.0, t))), 5) for t in times])
