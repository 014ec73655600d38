"""Built-in benchmark models."""

from .synthetic import SyntheticSpec, generate_synthetic, synthetic_model
from .wing import build_wing, wing_model

__all__ = ["SyntheticSpec", "build_wing", "generate_synthetic", "synthetic_model", "wing_model"]
