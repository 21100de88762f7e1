"""Quantum speed limit times for open qubit systems under non-Markovian noise."""

from .channels import ChannelConfig, decoherence_function, decoherence_rate, evolve_many, generator
from .errors import QslError
from .nonmarkov import NonMarkovReport, gamma_negative_intervals, nonmarkovianity
from .speedlimit import QslRequest, QslResult, kappa_tau_sweep, qsl, qsl_curve, trajectory
from .statespec import parse_state
from .witness import WitnessVerdict, coherent_bell_witness, ghz_witness

__version__ = "0.1.0"

__all__ = [
    "ChannelConfig",
    "NonMarkovReport",
    "QslError",
    "QslRequest",
    "QslResult",
    "WitnessVerdict",
    "coherent_bell_witness",
    "decoherence_function",
    "decoherence_rate",
    "evolve_many",
    "gamma_negative_intervals",
    "generator",
    "ghz_witness",
    "kappa_tau_sweep",
    "nonmarkovianity",
    "parse_state",
    "qsl",
    "qsl_curve",
    "trajectory",
]
