"""Multi-channel, multi-tone active noise equalizer: simulation and
transfer-function analysis.

The adaptive equalizer drives each tone at each sensor towards a chosen
fraction ``beta`` of its original amplitude.  Around that time-domain
engine the package assembles the linear systems whose solutions give the
sensor transfer functions ``H_k(z)``, locates their poles by radial search
and cross-checks both views against each other.
"""

from .equalizer import AdaptiveState, SimulationTrace, run_simulation, steady_state_amplitude, tone_amplitude
from .errors import (
    ANEError,
    DivergenceError,
    NearSingularError,
    PathEvaluationError,
    PoleProximityError,
    ScenarioError,
)
from .kernels import BACKEND
from .linalg import solve
from .poles import PoleEstimate, estimate_all, estimate_pole, radial_profile
from .scenario import EqualizerConfig, Scenario, load_scenario, make_scenario, parse_scenario
from .signal_model import FirPath, GainTablePath, NoiseField, PathMatrix, ReferenceSpec, path_gain
from .tf import (
    SweepTable,
    TfSystem,
    TfValue,
    closed_form_single,
    control_frequency_gain,
    sweep,
    transfer_function,
)
from .validation import ValidationReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "ANEError", "AdaptiveState", "BACKEND", "DivergenceError", "EqualizerConfig", "FirPath",
    "GainTablePath", "NearSingularError", "NoiseField", "PathEvaluationError", "PathMatrix",
    "PoleEstimate", "PoleProximityError", "ReferenceSpec", "Scenario", "ScenarioError",
    "SimulationTrace", "SweepTable", "TfSystem", "TfValue", "ValidationReport",
    "closed_form_single", "control_frequency_gain", "estimate_all", "estimate_pole",
    "load_scenario", "make_scenario", "parse_scenario", "path_gain", "radial_profile",
    "run_simulation", "run_suite", "solve", "steady_state_amplitude", "sweep",
    "tone_amplitude", "transfer_function",
]
