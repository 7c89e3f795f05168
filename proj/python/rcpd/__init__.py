"""Robust change-point detection on SPD and Grassmann manifolds."""

from ._core import (
    Spd,
    Grassmann,
    HuberConfig,
    DetectorConfig,
    BaselineConfig,
    Detector,
    ValidationError,
    DegeneratePairError,
    DataError,
    huber_weight,
    karcher_gradient,
    robust_gradient,
    sgd_step,
    robust_cost,
    batch_frechet_mean,
    statistic_trajectory,
    run_detector,
    spd_stream,
    grassmann_stream,
    read_stream,
    write_stream,
    read_bench_csv,
    write_bench_csv,
    BENCH_CSV_HEADER,
)

__all__ = [name for name in dir() if not name.startswith("_")]
