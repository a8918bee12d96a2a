"""Simulation, fluid-limit integration and stability analysis for a service
system whose agents are invited on demand and behave randomly."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    CtmcState,
    FluidState,
    ModelParams,
    ParameterError,
    Trajectory,
    load_params,
    scale_center,
    validate_params,
    z_from_yw,
)
from .cubic import CubicPoly, char_poly, cubic_discriminant, cubic_roots  # noqa: E402
from .stability import StabilityReport, Verdict, classify  # noqa: E402
from .fluid import FluidConfig, FluidVerdict, integrate  # noqa: E402
from .simulator import EventKind, SimConfig, simulate, simulate_scaled  # noqa: E402
from .experiments import EXAMPLE_INITS, EXAMPLES  # noqa: E402

__all__ = [
    "CtmcState", "FluidState", "ModelParams", "ParameterError", "Trajectory",
    "load_params", "scale_center", "validate_params", "z_from_yw",
    "CubicPoly", "char_poly", "cubic_discriminant", "cubic_roots",
    "StabilityReport", "Verdict", "classify",
    "FluidConfig", "FluidVerdict", "integrate",
    "EventKind", "SimConfig", "simulate", "simulate_scaled",
    "EXAMPLES", "EXAMPLE_INITS",
]
