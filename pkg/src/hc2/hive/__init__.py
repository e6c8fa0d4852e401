"""The meta-ensemble: component registry, tilted combination, checkpoints and the build controller."""

from hc2.hive.checkpoint import Checkpoint, CheckpointError
from hc2.hive.combine import combine, tilted_weights
from hc2.hive.components import COMPONENTS, PRESETS, VARIANTS, make_component
from hc2.hive.controller import ComponentReport, Hc2Config, Hc2Model, build_hc2, component_stream, predict_hc2

__all__ = [
    "COMPONENTS",
    "PRESETS",
    "VARIANTS",
    "Checkpoint",
    "CheckpointError",
    "ComponentReport",
    "Hc2Config",
    "Hc2Model",
    "build_hc2",
    "combine",
    "component_stream",
    "make_component",
    "predict_hc2",
    "tilted_weights",
]
