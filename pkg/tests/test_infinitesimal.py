import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uforge.freelie import Bracket, Leaf, evaluate_tree, parse_tree
from uforge.generators import random_dense_pair
from uforge.infinitesimal import (
    compile_nested,
    group_commutator,
    leading_generator,
    order_slope,
    program_deviation,
    sequence_length,
)
from uforge.linalg import commutator, mat_exp, matrix_log_principal
from uforge.sequence import PulseSequence, evaluate

seeds = st.integers(0, 2**32 - 1)


def left_nested(k):
    """[A,[A,...,[A,B]]] of degree k."""
    t = Leaf(1)
    for _ in range(k - 1):
        t = Bracket(Leaf(0), t)
    return t


def test_self_commutator_is_identity():
    pair = random_dense_pair(3, 0)
    s = PulseSequence.alternating(pair, [0.3, 0.7, 0.2])
    assert np.linalg.norm(evaluate(group_commutator(s, s)) - np.eye(3)) <= 1e-10


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_matches_four_factor_product(seed, n1, n2):
    pair = random_dense_pair(3, seed)
    rng = np.random.default_rng(seed)
    s1 = PulseSequence.alternating(pair, rng.uniform(-1, 1, n1))
    s2 = PulseSequence.alternating(pair, rng.uniform(-1, 1, n2), start="B")
    U1, U2 = evaluate(s1), evaluate(s2)
    gc = group_commutator(s1, s2)
    assert len(gc) == 2 * (n1 + n2)
    assert np.linalg.norm(evaluate(gc) - U2 @ U1 @ U2.conj().T @ U1.conj().T) <= 1e-10


def test_mismatched_controls():
    s1 = PulseSequence(random_dense_pair(2, 0), [("A", 0.1)])
    s2 = PulseSequence(random_dense_pair(2, 1), [("B", 0.1)])
    with pytest.raises(ValueError):
        group_commutator(s1, s2)


def test_log_is_t_squared_commutator():
    pair = random_dense_pair(4, 3)
    t = 1e-3
    U = evaluate(group_commutator(PulseSequence(pair, [("A", t)]), PulseSequence(pair, [("B", t)])))
    assert np.linalg.norm(matrix_log_principal(U) - t**2 * commutator(pair.a, pair.b)) <= 1e-8


def test_four_factor_identity_oracle():
    # e^{-iBt} e^{-iAt} e^{iBt} e^{iAt} built from mat_exp directly
    pair = random_dense_pair(3, 9)
    t = 0.01
    direct = mat_exp(pair.b, t) @ mat_exp(pair.a, t) @ mat_exp(pair.b, -t) @ mat_exp(pair.a, -t)
    prog = compile_nested(parse_tree("[A,B]"), pair, t)
    assert np.allclose(evaluate(prog.sequence), direct, atol=1e-14)


@pytest.mark.parametrize("tree,n", [("A", 1), ("[A,B]", 4), ("[A,[A,B]]", 10), ("[B,[A,B]]", 10)])
def test_program_lengths(tree, n):
    prog = compile_nested(parse_tree(tree), random_dense_pair(2, 0), 0.01)
    assert len(prog.sequence) == n == sequence_length(prog.tree)
    assert prog.claimed_order == prog.tree.degree


@pytest.mark.parametrize("k", range(2, 9))
def test_nested_length_formula(k):
    assert sequence_length(left_nested(k)) == 2**k + 2 ** (k - 1) - 2


def test_non_positive_time():
    with pytest.raises(ValueError):
        compile_nested(Leaf(0), random_dense_pair(2, 0), 0.0)


def test_leaf_is_exact():
    pair = random_dense_pair(3, 0)
    fit = order_slope(Leaf(0), pair)
    assert fit.exact and np.isnan(fit.slope)
    assert max(fit.deviations) <= 1e-13


@pytest.mark.parametrize("tree,expected,tol", [("[A,B]", 3.0, 0.2), ("[A,[A,B]]", 4.0, 0.3), ("[B,[A,B]]", 4.0, 0.3)])
@pytest.mark.parametrize("seed", [0, 1])
def test_slopes(tree, expected, tol, seed):
    fit = order_slope(parse_tree(tree), random_dense_pair(4, seed))
    assert abs(fit.slope - expected) <= tol


def test_leading_generator_sign_convention():
    # a degree-k program's log divided by t^k tends to the leading generator
    pair = random_dense_pair(3, 2)
    tree = parse_tree("[A,[A,B]]")
    t = 2.0**-9
    L = matrix_log_principal(evaluate(compile_nested(tree, pair, t).sequence)) / t**3
    G = leading_generator(tree, pair)
    assert np.linalg.norm(L - G) <= 1e-2 * np.linalg.norm(G)
    assert np.allclose(G, evaluate_tree(tree, [-1j * pair.a, -1j * pair.b]))


def test_compiled_product_exactly_unitary():
    prog = compile_nested(parse_tree("[[A,B],[A,[A,B]]]"), random_dense_pair(4, 0), 0.3)
    U = evaluate(prog.sequence)
    assert np.linalg.norm(U.conj().T @ U - np.eye(4)) <= 1e-12


def test_branch_cut_points_are_excluded():
    from uforge.generators import GeneratorPair

    X = np.array([[0, 1], [1, 0]]) * np.pi / 2
    Z = np.array([[1, 0], [0, -1]]) * np.pi / 2
    pair = GeneratorPair(X, Z)
    grid = [1.0, 2.0**-3, 2.0**-4, 2.0**-5, 2.0**-6]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fit = order_slope(parse_tree("[A,B]"), pair, grid)
    assert fit.excluded == [1.0]
    assert any("excluded" in str(w.message) for w in caught)


def test_deviation_small_at_small_t():
    prog = compile_nested(parse_tree("[A,B]"), random_dense_pair(3, 0), 1e-3)
    assert program_deviation(prog) <= 1e-8


def test_grid_validation():
    with pytest.raises(ValueError):
        order_slope(parse_tree("[A,B]"), random_dense_pair(2, 0), [0.1, 0.09, 0.08, 0.07])
