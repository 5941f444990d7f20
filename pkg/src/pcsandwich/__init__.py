"""Pauli check sandwiching: find checks, build mitigated circuits, simulate them."""
from .channels import KrausChannel, transform_multilayer, transform_single_layer
from .checks import CheckLayer, CheckSet, find_checks
from .circuit import Circuit, Gate, parse
from .density import DensityMatrix, NoiseSpec, fidelity, postselect_zeros, simulate
from .experiments import ExperimentConfig, run_sweep
from .pauli import PauliString
from .sandwich import SandwichedCircuit, build

__all__ = [
    "CheckLayer", "CheckSet", "Circuit", "DensityMatrix", "ExperimentConfig", "Gate",
    "KrausChannel", "NoiseSpec", "PauliString", "SandwichedCircuit", "build", "fidelity",
    "find_checks", "parse", "postselect_zeros", "run_sweep", "simulate",
    "transform_multilayer", "transform_single_layer",
]
