"""
A benchmark curve on two well separated Gaussians
=================================================

Two five-dimensional Gaussian classes whose means differ by ten standard
deviations along one axis. The Bayes error is essentially zero, so a deep
enough tree of single random projections should get close to it.
"""

import warnings

import numpy as np

import tarpbench as tb

spec = tb.GaussianMixtureSpec(
    mu1=np.zeros(5), mu2=np.array([10.0, 0, 0, 0, 0]),
    cov1=np.eye(5), cov2=np.eye(5), prior1=0.5)
data = tb.sample_gaussian_mixture(spec, 6000, seed=2018)
print("Bayes error:", tb.bayes_error_gaussian(spec))

###############################################################################
# One random projection per node (n=1), depths 1 through 10, 100 trees each.
# Past k=7 the leaves hold fewer than ten training samples on average, which
# is what the warning says; we want the tail anyway.

with warnings.catch_warnings():
    warnings.simplefilter("ignore", tb.KmaxWarning)
    curve = tb.estimate_curve(data, tb.PartitionConfig("sequential"), n=1, k_max=10,
                              runs=100, seed=7, name="gauss5")

print(f"k=0  error {curve.b0:.4f}  (majority class)")
for p in curve.points:
    print(f"k={p.k:<2} error {p.mean_error:.4f} +/- {p.std_error:.4f}   "
          f"train {1e3 * p.mean_training_time:.2f} ms")
print("asymptote:", curve.asymptote)

###############################################################################
# The same curve, ready for any plotting tool.

tb.export_results([curve], "gauss5_curve.csv", fmt="csv")
