"""Full-reference point cloud quality assessment.

Thin Python surface over the C++ core: feature extraction, model scoring,
synthetic cloud generation and rank/linear correlation helpers.
"""

from ._core import (
    DEFAULT_K,
    FEATURE_COUNT,
    LAYOUT_VERSION,
    InputError,
    ModelError,
    extract,
    feature_names,
    plcc,
    predict,
    score,
    srocc,
    synth,
)

__all__ = [
    "DEFAULT_K",
    "FEATURE_COUNT",
    "LAYOUT_VERSION",
    "InputError",
    "ModelError",
    "extract",
    "feature_names",
    "plcc",
    "predict",
    "score",
    "srocc",
    "synth",
]
