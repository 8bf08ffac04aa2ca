"""Logical randomized benchmarking and mirrored-circuit threshold scans."""

from .clifford2q import all_cliffords, inverse_word, sample_two_qubit_clifford
from .fitting import DecayFit, FitError, error_per_clifford, fit_decay
from .mirror import MirrorConfig, mean_fidelity, mirrored_circuit, run_mirror
from .rb import RBConfig, fit_rb, rb_sequence, run_rb
from .threshold import ThresholdModel, decay_rates, find_threshold, fit_threshold_model

__all__ = [
    "all_cliffords", "inverse_word", "sample_two_qubit_clifford",
    "DecayFit", "FitError", "error_per_clifford", "fit_decay",
    "MirrorConfig", "mean_fidelity", "mirrored_circuit", "run_mirror",
    "RBConfig", "fit_rb", "rb_sequence", "run_rb",
    "ThresholdModel", "decay_rates", "find_threshold", "fit_threshold_model",
]
