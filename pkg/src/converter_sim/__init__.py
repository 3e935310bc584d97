"""Simulation, control, and verification toolkit for a bidirectional
two-stage (buck+boost) DC-DC converter with supercapacitor storage."""

from .controller import (
    ControllerState,
    References,
    Sigma1Gains,
    Sigma2Gains,
)
from .plant import ControlInput, ConverterParams, PlantState
from .simulator import Scenario, SimResult, simulate, simulate_averaged, simulate_switched

__all__ = [
    "ControlInput",
    "ControllerState",
    "ConverterParams",
    "PlantState",
    "References",
    "Scenario",
    "Sigma1Gains",
    "Sigma2Gains",
    "SimResult",
    "simulate",
    "simulate_averaged",
    "simulate_switched",
]

__version__ = "0.1.0"
