"""Interpolating predictors on cubic partitions, with explicit ReLU network forms.

Construct histogram rules that interpolate any training set exactly while
generalizing either near-optimally or as badly as possible, compile them to
two-hidden-layer ReLU networks with written-down weights, and measure both
behaviors against closed-form reference risks.
"""

from .bench import (
    ExperimentPlan,
    RateRow,
    fit_loglog_slope,
    read_rows_csv,
    run_experiment,
    width_schedule,
    write_rows_csv,
)
from .dataset import Dataset, load_csv, save_csv
from .geometry import (
    AlignmentError,
    AlignmentReport,
    AlignmentResult,
    Box,
    CubicPartition,
    align_offset,
    cell_bounds,
    cell_index,
    min_gap_separation,
    verify_proper_alignment,
)
from .histogram import (
    CellStats,
    Histogram,
    cell_stats,
    empirical_risk,
    fit_histogram,
    population_histogram,
)
from .interpolate import (
    InflatedHistogram,
    InterpolationTarget,
    bad_erm,
    build_inflated,
    check_interpolation,
    distinct_targets,
    good_erm,
    predict_inflated,
)
from .losses import LossKind, loss_eval
from .relunet import (
    BumpSpec,
    ReluNet,
    architecture,
    bump_net,
    compile_histogram,
    compile_interpolant,
    export_weights,
    import_weights,
    net_sum,
    relu_wrap,
    scale_shift,
)
from .risk import (
    DistributionSpec,
    RiskEstimate,
    bayes_risk,
    box_mass,
    l2_distance,
    mc_risk,
    sample,
    worst_risk,
)

__version__ = "0.1.0"
