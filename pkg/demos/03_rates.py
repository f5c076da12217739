"""
Measuring convergence rates
===========================

Sweep n over powers of two, record the errors and their ratios to the bound
shapes, and fit log-log slopes.
"""

from skellam_markov import LOCAL, TV, WASSERSTEIN, ChainParams, rate_fit, sweep
from skellam_markov.bounds import rows_to_csv

cp = ChainParams(0.02, 0.02)
ns = [128, 256, 512, 1024, 2048, 4096]
metrics = [TV, LOCAL, WASSERSTEIN]

for approx in ("skellam", "expansion"):
    rows = sweep([(cp, n) for n in ns], approx, metrics)
    for m in metrics:
        pts = [(r.n, r.lhs) for r in rows if r.metric == str(m)]
        slope, _ = rate_fit(pts)
        ratios = [round(r.ratio, 3) for r in rows if r.metric == str(m)]
        print(f"{approx:9s} {str(m):12s} slope {slope:6.3f}  ratio to shape {ratios}")

# rows are plain records; CSV is the interchange format
print(rows_to_csv(rows[:3]))
