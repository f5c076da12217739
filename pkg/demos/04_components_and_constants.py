"""
Named components, the corrected approximation and explicit constants
====================================================================
"""

import numpy as np

from skellam_markov import (TV, ChainParams, build_components, decomposition_residuals, ch_fn,
                            ekg_approx, exact_distribution, expansion_approx, norm, skellam_power)
from skellam_markov.bounds import bound_shape

cp = ChainParams(1 / 30, 1 / 40)
c = build_components(cp, ["h", "k", "delta", "lambda1", "lambda2", "a1", "a2"])
for name, M in c.items():
    print(f"{name.value:8s} support {M.support}  mass {M.mass: .6f}  ||.||_TV {norm(M):.4f}")

# H has a closed-form transform (1-2a) cos t / (1 - 2a cos t)
t = np.linspace(0, np.pi, 5)
a = cp.alpha
print("H transform gap", np.max(np.abs(ch_fn(c["h"], t) - (1 - 2 * a) * np.cos(t) / (1 - 2 * a * np.cos(t)))))

# three approximants for one n
n = 2000
F = exact_distribution(cp, n)
for label, G in (("skellam", skellam_power(cp, n)), ("ekg", ekg_approx(cp, n)),
                 ("expansion", expansion_approx(cp, n))):
    print(f"{label:9s} ||F_n - G||_TV = {norm(F - G, TV):.3e}")

# the explicit leading term bounds the Skellam error with room to spare
lhs = norm(F - skellam_power(cp, n), TV)
print("lhs / explicit leading term:", lhs / bound_shape("explicit", TV, cp, n))

# exact two-eigenvalue decomposition, three readings of the prefactor
print(decomposition_residuals(ChainParams(0.03, 0.01), 5))
