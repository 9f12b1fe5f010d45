"""
Variation of spherical means of a chirp
=======================================

A frequency-localised chirp at scale lambda makes A_t^alpha f(0) flip sign
each time lambda t^2 steps by one.  Summing the jumps over
t_n = sqrt(1 + n/lambda) gives a variation that grows like
lambda^{d/2 - Re alpha + 1/q}.
"""

import numpy as np
from sphvar.counterexamples import ChirpSpec, chirp_profile, tn_prop42, scaling_experiment
from sphvar.means import mean_radial_freq

lam = 512.0
prof = chirp_profile(ChirpSpec(lam))
for n in range(1, 7):
    t = tn_prop42(lam, n, n_max=8)
    v = mean_radial_freq(prof, 0, t).value
    print(f"n={n} t={t:.6f} A_t f(0) = {v.real:+.2f} {v.imag:+.2f}i")

# the log-log slope of the variation sum against lambda
lams = 2.0 ** np.arange(8, 12)
rep = scaling_experiment("prop42", 2, 0, 3, lams)
print(rep.to_csv())
print("fitted", round(rep.fitted_slope, 4), "predicted", round(rep.predicted_slope, 4))

# near |x| = 3 the growth is slower: exponent 1/2 - Re alpha + 1/q
rep = scaling_experiment("prop43", 2, 0, 4, lams, 2.9)
print("off-center fitted", round(rep.fitted_slope, 4), "predicted", rep.predicted_slope)
