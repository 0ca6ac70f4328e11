"""Phase-fraction kinetics of Ti-6Al-4V under arbitrary temperature histories."""
from .calibrate import LMConfig, LMResult, levenberg_marquardt
from .config import RunConfig, load_config
from .diagrams import generate_cct, generate_ttt, simulate_cct_curve
from .errors import (CalibrationError, ConfigError, DomainError, IntegrationError, ParseError,
                     Ti64Error)
from .field import evaluate_field
from .integrator import Scheme, StepConfig, Trajectory, advance, integrate
from .params import DEFAULT_PARAMS, ModelParams
from .paths import SampledPath, SibParams, SibPath, constant_path, linear_ramp, ttt_path
from .phase_model import PhaseState

__all__ = [
    "CalibrationError", "ConfigError", "DEFAULT_PARAMS", "DomainError", "IntegrationError",
    "LMConfig", "LMResult", "ModelParams", "ParseError", "PhaseState", "RunConfig",
    "SampledPath", "Scheme", "SibParams", "SibPath", "StepConfig", "Ti64Error", "Trajectory",
    "advance", "constant_path", "evaluate_field", "generate_cct", "generate_ttt",
    "integrate", "levenberg_marquardt", "linear_ramp", "load_config", "simulate_cct_curve",
    "ttt_path",
]
