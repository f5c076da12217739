"""
Signed measures on the integers
===============================

Building blocks: point masses, convolution, norms and the compound
Poisson exponential.
"""

import numpy as np

from skellam_markov import (LOCAL, TV, WASSERSTEIN, LatticeMeasure, NormKind, TruncationBudget,
                            ch_fn, cp_exponential, dirac, neumann_series, norm)

# L puts mass 1/2 on -1 and +1; U = L - I has total mass zero
L = LatticeMeasure(-1, [0.5, 0.0, 0.5])
U = L - dirac(0)
print("U weights:", U.weights, "offset", U.offset)
print("||U||_TV =", norm(U, TV), " ||U||_W =", norm(U, WASSERSTEIN), " ||U||_inf =", norm(U, LOCAL))

# convolution is the '*' operator; powers use '**'
print("L*L:", (L * L).weights)
print("U^3 mass:", (U ** 3).mass)

# exp{t (F - I)} for a probability F; here Poisson(4) when F = I_1
tb = TruncationBudget(1e-12)
P4 = cp_exponential(4.0, dirac(1), tb)
print("Poisson(4): support", P4.support, "mass", P4.mass, "discarded", tb.accumulated)
print("largest atom", norm(P4, LOCAL))

# Fourier check: the transform of exp{t(F-I)} is exp{t(F^(s) - 1)}
t = np.linspace(-np.pi, np.pi, 7)
print("max Fourier gap", np.max(np.abs(ch_fn(P4, t) - np.exp(4.0 * (np.exp(1j * t) - 1)))))

# geometric series sum_j M^j for ||M|| < 1
S = neumann_series(0.3 * L)
print("Neumann series mass", S.mass, "vs", 1 / 0.7)

# the l_r and L_r norms interpolate between the norms above
Z = (L * L) - dirac(0)
for r in (1.0, 2.0, 4.0):
    print(f"r={r}: l_r {norm(Z, NormKind.lr(r)):.4f}  L_r {norm(Z, NormKind.cap_lr(r)):.4f}")

# measures serialize to JSON and back unchanged
assert LatticeMeasure.from_json(P4.to_json()) == P4
