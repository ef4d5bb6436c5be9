"""Statevector simulation and statistics for Bell tests with unanimous friends."""

from .circuits import Settings, analytic_probabilities, build_circuit, build_ibm_circuit, build_ionq_circuit
from .noise import NoiseModel, sample_label_counts
from .stats import CountsTable, chsh, signaling_scan

__version__ = "0.1.0"
