"""Estimate the linearly drifting frequency of a sinusoid from its samples."""
from ._jit import USE_NUMBA
from .drem import DremOutput, RegressionSnapshot, mix, mix_series, stack
from .errors import (
    ConfigurationError,
    DomainError,
    FormatError,
    NumericalError,
    SinfreqError,
    SynchronizationError,
)
from .estimator import Estimator, EstimatorConfig, EstimatorState, run_estimator
from .lti_filters import FilterGraph, FilterNetwork, compose
from .regressor import ChannelOutputs, RegressorBank, RegressorChannel, make_channel
from .runner import RunSummary, ScenarioConfig, run
from .signal_gen import SignalSpec, analytic_derivatives, check_eq4, omega_true, sample

__version__ = "0.1.0"
