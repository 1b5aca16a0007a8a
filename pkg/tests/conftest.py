import os
from pathlib import Path

import numpy as np
import pytest

from tarpbench import GaussianMixtureSpec, LabeledDataset, sample_gaussian_mixture

ACCEPTANCE_LINES = []

# mean difference along the first axis, identity covariance, equal priors
GAUSS5 = {
    "mu1": [0.0, 0.0, 0.0, 0.0, 0.0],
    "mu2": [10.0, 0.0, 0.0, 0.0, 0.0],
    "cov1": np.eye(5).tolist(),
    "cov2": np.eye(5).tolist(),
    "prior1": 0.5,
}


def mfeat_dir():
    candidates = [os.environ.get("TARPBENCH_MFEAT_DIR"),
                  Path(__file__).parent / "data" / "mfeat"]
    for c in candidates:
        if c and (Path(c) / "mfeat-fou").exists():
            return Path(c)
    return None


@pytest.fixture(scope="session")
def gauss5_spec():
    return GaussianMixtureSpec.from_dict(GAUSS5)


@pytest.fixture(scope="session")
def gauss5_data(gauss5_spec):
    return sample_gaussian_mixture(gauss5_spec, 6000, seed=2018)


@pytest.fixture(scope="session")
def digits_even_odd():
    """sklearn's bundled 8x8 digits as an even-vs-odd problem (real data, offline)."""
    datasets = pytest.importorskip("sklearn.datasets")
    d = datasets.load_digits()
    return LabeledDataset(d.data, d.target % 2, groups=d.target)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
