"""Random-projection (TARP) benchmarks for two-class pattern recognition problems."""

from .bench import (
    Asymptote,
    BenchmarkCurve,
    BenchmarkPoint,
    KmaxWarning,
    MethodPoint,
    PartitionConfig,
    RegionLabel,
    classify_region,
    estimate_asymptote,
    estimate_B0,
    estimate_Bkn,
    estimate_curve,
    export_results,
    load_curves,
    load_methods,
    region_report,
    run_once,
    run_seed,
)
from .data import (
    DataPartition,
    GaussianMixtureSpec,
    LabeledDataset,
    bayes_error_gaussian,
    load_csv,
    load_mfeat,
    partition,
    sample_gaussian_mixture,
    save_csv,
)
from .tarp import (
    GaussianFit1D,
    TarpClassifier,
    bayes_threshold_1d,
    classify,
    error_rate,
    fit_gaussians_1d,
    gini_impurity,
    project,
    sample_projection,
    sample_projections,
    select_best_tarp,
    train_tarp,
)
from .tree import TarpNode, TarpTree, evaluate_tree, grow_tree

__version__ = "0.1.0"
