"""
Complex-order Bessel functions across the two branches
======================================================

J_beta is summed as a power series for small r and from the Hankel
expansion for large r.  The two agree where they overlap.
"""

import numpy as np
from sphvar.special import bessel_series, bessel_asymptotic, multiplier

# compare the branches on the overlap interval
r = np.linspace(15, 25, 6)
for beta in (0, 1.5, 0.3 + 0.7j):
    s = np.array([bessel_series(beta, x) for x in r])
    a = bessel_asymptotic(beta, r)
    print(f"beta={beta}: max relative gap {np.max(np.abs(s - a) / np.abs(s)):.1e}")

# more Hankel terms shrink the gap
for K in (2, 4, 6, 8):
    gap = abs(bessel_asymptotic(0.3 + 0.7j, 16.0, K) - bessel_series(0.3 + 0.7j, 16.0))
    print(f"K={K}: |asymptotic - series| at r=16 is {gap:.1e}")

# the symbol of A_t^alpha at the origin is pi^{d/2} / Gamma(d/2 + alpha)
print("m^1(0) in the plane:", multiplier(2, 1, 0.0).real, "(pi)")
print("m^0(s) for s = 10, 100, 1000:", np.abs(multiplier(2, 0, np.array([10.0, 100.0, 1000.0]))))
