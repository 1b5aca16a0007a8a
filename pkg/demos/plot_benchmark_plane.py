"""
Placing classifiers on the benchmark plane
==========================================

A benchmark curve plots the error of random-projection trees against what
they cost to train. Any other classifier can be dropped on the same plane:

* below the asymptote it found structure the random trees cannot reach,
* dominated by a curve point it is worse and slower than a random heuristic,
* anywhere else it only buys speed.
"""

from sklearn.datasets import load_digits

import tarpbench as tb

###############################################################################
# Even versus odd handwritten digits (the 8x8 set bundled with scikit-learn).

d = load_digits()
data = tb.LabeledDataset(d.data, d.target % 2, groups=d.target)
split = tb.PartitionConfig("stratified_random")
curves = [tb.estimate_curve(data, split, n=n, k_max=5, runs=50, seed=1, name="digits")
          for n in (1, 10, 50)]

for c in curves:
    errs = ", ".join(f"{e:.3f}" for e in c.errors)
    print(f"n={c.n:<3} B0={c.b0:.3f}  B_k: {errs}  asymptote {c.asymptote.value:.3f}"
          f"{'' if c.asymptote.converged else ' (provisional)'}")

###############################################################################
# Three made-up competitors. Costs are training seconds.

methods = [
    tb.MethodPoint("slow but sharp", error=0.02, training_time=5.0, testing_time=0.01),
    tb.MethodPoint("fast and rough", error=0.30, training_time=1e-5, testing_time=1e-6),
    tb.MethodPoint("coin flip", error=0.50, training_time=0.1, testing_time=0.0),
]

best = curves[-1]
for m in methods:
    r = tb.region_report(best, m)
    extra = ""
    if r.dominated_by:
        extra = f", dominated by k={r.dominated_by[0]}"
    elif r.margin is not None:
        extra = f", {r.margin:.3f} below the asymptote"
    print(f"{m.name:>15}: {r.label.value}{extra}")
