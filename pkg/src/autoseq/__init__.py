"""Automatic sequences: automata, exponential sums and weighted ergodic averages."""

from .analysis import (
    decay_exponent,
    invertible_decomposition,
    is_balanced,
    is_totally_balanced,
    mean,
    partial_sum,
)
from .automaton import (
    AutomaticSequence,
    Automaton,
    AutomatonError,
    base_change,
    evaluate,
    kernel_family,
    minimize,
    normalize_leading_zeros,
    product,
    restrict_ap,
    shift,
)
from .builtins import builtin_automaton, builtin_names, builtin_sequence
from .equidist import classify_arc, partition_bound_check, vdc_check
from .ergodic import DynSystem, Observable, convergence_report, spectral_oracle, weighted_average
from .expsum import exp_sum_direct, exp_sum_interval, exp_sum_transfer, sup_linear
from .phase import PhasePolynomial, parse_phase
from .structure import check_aperiodic, cycle_gcd, decompose_aperiodic, frequencies, invertibility, scc_analysis
from .textfmt import format_automaton, parse_automaton, parse_automaton_file

__version__ = "0.1.0"
