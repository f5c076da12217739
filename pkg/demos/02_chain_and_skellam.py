"""
The three-state chain and its Skellam approximation
===================================================

Exact law of S_n by dynamic programming, a Monte Carlo cross-check, and
the distance to the symmetric Skellam law D^{*n}.
"""

from skellam_markov import (TV, ChainParams, SkellamParams, exact_distribution, monte_carlo_distribution,
                            norm, skellam_pmf, skellam_power)

cp = ChainParams(alpha=0.02, beta=0.03)   # uniform initial law by default
print("lambda =", cp.lam, " stationary P(a2) =", cp.stationary_p2)

n = 200
F = exact_distribution(cp, n)
print("F_n: support", F.support, "mass", F.mass)

# simulated paths agree with the exact law (Philox stream, fixed seed)
mc = monte_carlo_distribution(cp, n, 200_000, seed=1)
print("TV distance exact vs Monte Carlo:", 0.5 * norm(F - mc, TV))

# Skellam approximation: same intensity n*lambda on both sides
D = skellam_power(cp, n)
print("P(S_n = 0) exact", F[0], " Skellam", D[0], " Bessel formula",
      skellam_pmf(SkellamParams(n * cp.lam, n * cp.lam), 0))
print("||F_n - D^n||_TV =", norm(F - D, TV))

# the error shrinks roughly like 1/n
for m in (100, 400, 1600):
    print(m, norm(exact_distribution(cp, m) - skellam_power(cp, m), TV))
