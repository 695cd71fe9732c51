"""FEAST event-based feature extraction."""

from ._core import *  # noqa: F401,F403
from ._core import (
    Config,
    EventStream,
    FeastError,
    FeastNetwork,
    FeastParams,
    FeatureExtractor,
    SurfaceParams,
    init_network,
    infer_stream,
    train_stream,
)

__version__ = "0.1.0"
