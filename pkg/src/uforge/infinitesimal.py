"""Group-commutator compilation of nested commutators.

For single pulses ``exp(-iAt)`` and ``exp(-iBt)`` the group commutator has
principal log ``t^2 [A,B] + O(t^3)``. Compiling a degree-k tree recursively
gives a product whose log is ``t^k`` times :func:`leading_generator` plus
``O(t^(k+1))``.
"""
from dataclasses import dataclass, field
import warnings

import numpy as np

from .freelie import Leaf, evaluate_tree, tree_leaves
from .linalg import BranchCutError, matrix_log_principal
from .sequence import PulseSequence, evaluate, inverse

DEFAULT_T_GRID = tuple(2.0**-j for j in range(4, 11))


def group_commutator(s1, s2):
    """Sequence evaluating to ``U2 U1 U2^-1 U1^-1`` with ``Ui = evaluate(si)``."""
    if s1.controls is not s2.controls:
        raise ValueError("sequences use different control pairs")
    return inverse(s1).then(inverse(s2)).then(s1).then(s2)


@dataclass(frozen=True, eq=False)
class CommutatorProgram:
    tree: object
    base_time: float
    sequence: PulseSequence

    @property
    def claimed_order(self):
        return self.tree.degree


def _compile(tree, controls, t):
    if isinstance(tree, Leaf):
        return PulseSequence(controls, (("AB"[tree.index], t),))
    return group_commutator(_compile(tree.left, controls, t), _compile(tree.right, controls, t))


def compile_nested(tree, controls, t):
    if not t > 0:
        raise ValueError(f"base time must be positive, got {t}")
    if any(i > 1 for i in tree_leaves(tree)):
        raise ValueError("trees over the two generators A, B only")
    return CommutatorProgram(tree, float(t), _compile(tree, controls, t))


def sequence_length(tree):
    """Pulse count of the compiled program: leaf 1, node ``2(|L| + |R|)``."""
    if isinstance(tree, Leaf):
        return 1
    return 2 * (sequence_length(tree.left) + sequence_length(tree.right))


def leading_generator(tree, controls):
    """Coefficient of ``t^k`` in the log of the compiled product.

    The group commutator of ``exp(L)`` and ``exp(R)`` has log ``[R, L]`` at
    leading order, so each bracket flips sign relative to
    ``evaluate_tree(tree, [-iA, -iB])``.
    """
    sign = (-1) ** (tree.degree - 1)
    return sign * evaluate_tree(tree, [-1j * controls.a, -1j * controls.b])


def program_deviation(program):
    """Frobenius distance between the product's principal log and its leading term."""
    log_u = matrix_log_principal(evaluate(program.sequence))
    target = program.base_time**program.claimed_order * leading_generator(program.tree, program.sequence.controls)
    return float(np.linalg.norm(log_u - target))


@dataclass
class SlopeFit:
    slope: float
    t_values: list = field(default_factory=list)
    deviations: list = field(default_factory=list)
    excluded: list = field(default_factory=list)
    exact: bool = False

    def to_dict(self):
        return vars(self).copy()


def order_slope(tree, controls, t_grid=DEFAULT_T_GRID, floor=1e-13):
    """Least-squares slope of ``log(deviation)`` against ``log t``.

    Grid points where the principal log is undefined are dropped with a
    warning. When every deviation sits at the rounding floor (a leaf, which
    compiles exactly) the slope is ``nan`` and ``exact`` is set.
    """
    t_grid = sorted(float(t) for t in t_grid)
    if len(t_grid) < 4 or t_grid[-1] / t_grid[0] < 4.0:
        raise ValueError("need at least 4 grid points spanning two octaves")
    ts, devs, excluded = [], [], []
    for t in t_grid:
        try:
            dev = program_deviation(compile_nested(tree, controls, t))
        except BranchCutError:
            warnings.warn(f"principal log undefined at t={t}; point excluded")
            excluded.append(t)
            continue
        ts.append(t)
        devs.append(dev)
    if all(dv <= floor for dv in devs):
        return SlopeFit(float("nan"), ts, devs, excluded, exact=True)
    keep = [(t, dv) for t, dv in zip(ts, devs) if dv > floor]
    if len(keep) < 2:
        return SlopeFit(float("nan"), ts, devs, excluded)
    x = np.log([t for t, _ in keep])
    y = np.log([dv for _, dv in keep])
    slope = float(np.polyfit(x, y, 1)[0])
    return SlopeFit(slope, ts, devs, excluded)
