"""Quantum-inspired image augmentation by per-qubit Bloch rotations."""
from .augment import AugmentParams, ImageBuffer, minmax_renormalize
from .dsl import AugmentSpec, parse_spec, run_pipeline
from .errors import InvalidInputError, ResourceLimitError
from .qcore import (
    AmplitudeState,
    RotationPlan,
    apply_plan,
    apply_qrz_fast,
    embed,
    extract,
    invert_plan,
    rotation_gate,
    sample_plan,
)

__all__ = [
    "AmplitudeState",
    "AugmentParams",
    "AugmentSpec",
    "ImageBuffer",
    "InvalidInputError",
    "ResourceLimitError",
    "RotationPlan",
    "apply_plan",
    "apply_qrz_fast",
    "embed",
    "extract",
    "invert_plan",
    "minmax_renormalize",
    "parse_spec",
    "rotation_gate",
    "run_pipeline",
    "sample_plan",
]
