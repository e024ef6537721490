"""Component-based surrogate modeling for building energy prediction.

Train one regressor per engineering component from a deterministic physics
oracle, compose the trained components into a hierarchical predictor whose
interfaces carry engineering quantities, and explore designs through
sensitivities, local surrogate trees and an HTTP service.
"""

__version__ = "0.1.0"

from .design import DesignConfig, design_space, representative_config, validate_config

__all__ = [
    "DesignConfig",
    "design_space",
    "representative_config",
    "validate_config",
    "__version__",
]
