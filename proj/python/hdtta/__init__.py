"""Logit refinement for 3-D tumour segmentation.

Arrays are numpy, shaped (nz, ny, nx). Configs and reports are plain dicts.
"""

from ._hdtta import (
    DimensionMismatch,
    Error,
    FormatError,
    InvalidArgument,
    NumericalFailure,
    compact_loss,
    default_config,
    diffuse_loss,
    edge_map,
    gate,
    gradcheck,
    holm,
    metrics,
    phantom,
    read_volume,
    run_case,
    wilcoxon,
    write_mask,
    write_volume,
)

__all__ = [
    "DimensionMismatch",
    "Error",
    "FormatError",
    "InvalidArgument",
    "NumericalFailure",
    "compact_loss",
    "default_config",
    "diffuse_loss",
    "edge_map",
    "gate",
    "gradcheck",
    "holm",
    "metrics",
    "phantom",
    "read_volume",
    "run_case",
    "wilcoxon",
    "write_mask",
    "write_volume",
]
