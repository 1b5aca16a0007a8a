"""
Anatomy of one TARP
===================

Project onto a random direction, fit a Gaussian to each class along that
line, and cut where the weighted densities cross. Repeat a few times and
keep the cut with the purest children.
"""

import numpy as np

import tarpbench as tb

rng = np.random.default_rng(0)
X = np.r_[rng.normal(0, 1, (300, 3)), rng.normal([2, 1, 0], [1, 2, 1], (100, 3))]
y = np.r_[np.zeros(300, int), np.ones(100, int)]

r = tb.sample_projection(3, rng)
v = tb.project(X, r)
fit = tb.fit_gaussians_1d(v, y)
t = tb.bayes_threshold_1d(fit)
print("direction", np.round(r, 3))
print(f"class 0 ~ N({fit.mu_a:.2f}, {fit.sigma_a:.2f}^2), "
      f"class 1 ~ N({fit.mu_b:.2f}, {fit.sigma_b:.2f}^2), threshold {t:.3f}")

###############################################################################
# Unequal priors push the cut toward the rarer class mean. With unit
# variances, means 0 and 2 and a 3:1 prior the crossing sits at 1 + ln(3)/2.

skewed = tb.GaussianFit1D(0.0, 2.0, 1.0, 1.0, 0.75, 0.25)
print("3:1 priors:", tb.bayes_threshold_1d(skewed), "vs", 1 + np.log(3) / 2)

###############################################################################
# Best of ten candidates by weighted Gini of the children.

cands = [tb.train_tarp(tb.project(X, q), y, q) for q in tb.sample_projections(3, 10, rng)]
best = tb.select_best_tarp(cands, X, y)
for c in cands:
    mark = "*" if c is best else " "
    print(f"{mark} gini {c.train_gini:.4f}  training error {tb.error_rate(c, X, y):.3f}")
