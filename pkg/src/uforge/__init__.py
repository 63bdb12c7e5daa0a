"""Compile SU(d) unitaries from alternating pulses of two fixed Hamiltonians."""
from .kernels import BACKEND
from .linalg import (
    BranchCutError,
    InvalidOperandError,
    gell_mann_basis,
    mat_exp,
    matrix_log_principal,
    numerical_rank,
    su_devectorize,
    su_vectorize,
)
from .generators import ControlPair, GeneratorPair, local_chain_pair, random_dense_pair
from .sequence import PulseSequence, evaluate, inverse, partial_derivative, repeat_compile
from .tangent import build_frame, frame_rank, verify_conjecture_I, verify_conjecture_II
from .freelie import (
    Bracket,
    Leaf,
    evaluate_tree,
    lyndon_to_commutator,
    lyndon_words,
    parse_tree,
    verify_conjecture_III,
    witt_dimension,
)
from .infinitesimal import compile_nested, group_commutator, order_slope
from .optimizer import DescentConfig, TrainingSet, compile_target, error_gradient, error_training, synthesize
from .control import DriftControls, drift_conjugated_generator, drift_tangent_rank, time_ordered_exp

__version__ = "0.1.0"
