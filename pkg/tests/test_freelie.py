from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uforge.freelie import (
    Bracket,
    Leaf,
    LyndonWord,
    TreeParseError,
    evaluate_tree,
    is_lyndon,
    log2_order_bound,
    lyndon_basis,
    lyndon_to_commutator,
    lyndon_words,
    mobius,
    parse_tree,
    predicted_saturation_order,
    standard_factorization,
    verify_conjecture_III,
    witt_dimension,
)
from uforge.generators import random_dense_pair
from uforge.linalg import commutator

seeds = st.integers(0, 2**32 - 1)


def brute_lyndon_count(q, k):
    """Oracle: count words of length k strictly below all their rotations."""
    return sum(all(w < w[i:] + w[:i] for i in range(1, k)) for w in product(range(q), repeat=k))


def random_anti_hermitian_pair(d, seed):
    p = random_dense_pair(d, seed)
    return [-1j * p.a, -1j * p.b]


def words(q, k):
    return [str(w) for w in lyndon_words(q, k) if len(w) == k]


class TestLyndonWords:
    def test_first_three(self):
        assert [str(w) for w in lyndon_words(2, 2)] == ["a", "b", "ab"]

    def test_length_three_and_five(self):
        assert words(2, 3) == ["aab", "abb"]
        assert words(2, 5) == ["aaaab", "aaabb", "aabab", "aabbb", "ababb", "abbbb"]

    @pytest.mark.parametrize("q,kmax", [(2, 12), (3, 7)])
    def test_counts_match_brute_force(self, q, kmax):
        listed = lyndon_words(q, kmax)
        for k in range(1, kmax + 1):
            assert sum(len(w) == k for w in listed) == brute_lyndon_count(q, k)

    @pytest.mark.parametrize("q,kmax", [(2, 12), (3, 12)])
    def test_counts_match_witt(self, q, kmax):
        listed = lyndon_words(q, kmax)
        for k in range(1, kmax + 1):
            assert sum(len(w) == k for w in listed) == witt_dimension(q, k)

    def test_order_is_length_then_lex(self):
        ws = lyndon_words(3, 6)
        keys = [(len(w), w.symbols) for w in ws]
        assert keys == sorted(keys) and len(set(keys)) == len(keys)

    def test_constructor_checks(self):
        with pytest.raises(ValueError):
            LyndonWord.parse("ba")
        with pytest.raises(ValueError):
            LyndonWord.parse("abab")
        with pytest.raises(ValueError):
            LyndonWord((0, 2), q=2)
        assert is_lyndon((0, 0, 1)) and not is_lyndon((0, 1, 0))


class TestWitt:
    def test_binary_sequence(self):
        assert [witt_dimension(2, k) for k in range(1, 12)] == [2, 1, 2, 3, 6, 9, 18, 30, 56, 99, 186]

    def test_ternary(self):
        assert [witt_dimension(3, k) for k in (1, 2, 3)] == [3, 3, 8]

    def test_mobius(self):
        assert [mobius(n) for n in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]

    def test_rejects_small(self):
        with pytest.raises(ValueError):
            witt_dimension(1, 3)


class TestStandardFactorization:
    @pytest.mark.parametrize("word,left,right", [("aabb", "a", "abb"), ("ab", "a", "b"), ("aababb", "a", "ababb")])
    def test_examples(self, word, left, right):
        v, w = standard_factorization(LyndonWord.parse(word))
        assert (str(v), str(w)) == (left, right)

    def test_factors_are_lyndon_and_ordered(self):
        for u in lyndon_words(2, 10):
            if len(u) > 1:
                v, w = standard_factorization(u)
                assert v.symbols + w.symbols == u.symbols and v.symbols < w.symbols

    def test_letter_rejected(self):
        with pytest.raises(ValueError):
            standard_factorization(LyndonWord.parse("a"))


class TestTrees:
    def test_bijection_examples(self):
        assert lyndon_to_commutator(LyndonWord.parse("a")) == Leaf(0)
        assert str(lyndon_to_commutator(LyndonWord.parse("ab"))) == "[A,B]"
        assert str(lyndon_to_commutator(LyndonWord.parse("aababb"))) == "[A,[[A,B],[[A,B],B]]]"

    def test_degree_and_leaf_order_preserved(self):
        from uforge.freelie import tree_leaves

        for u in lyndon_words(2, 8):
            t = lyndon_to_commutator(u)
            assert t.degree == len(u) and tree_leaves(t) == u.symbols

    @pytest.mark.parametrize("text", ["[A,[A,B]]", "[[A,B],[A,[A,B]]]", "B"])
    def test_parse_round_trip(self, text):
        assert str(parse_tree(text)) == text

    def test_parse_compact_and_lowercase(self):
        assert parse_tree("[B[A[A,B]]]") == parse_tree("[b, [a, [a, b]]]")

    @pytest.mark.parametrize("text,pos", [("[A,B", 4), ("[A,B]]", 5), ("(A,B)", 0), ("", 0), ("[A,?]", 3)])
    def test_parse_errors_report_position(self, text, pos):
        with pytest.raises(TreeParseError) as err:
            parse_tree(text)
        assert err.value.position == pos

    def test_self_commutator_vanishes(self):
        A = random_anti_hermitian_pair(3, 0)[0]
        assert np.allclose(evaluate_tree(parse_tree("[A,B]"), [A, A]), 0)

    def test_missing_generator(self):
        with pytest.raises(ValueError):
            evaluate_tree(parse_tree("[A,C]"), random_anti_hermitian_pair(2, 0))

    @given(seeds, st.integers(2, 5))
    def test_lyndon_trees_traceless(self, seed, d):
        gens = random_anti_hermitian_pair(d, seed)
        for t in lyndon_basis(2, 6):
            if t.degree > 1:
                assert abs(np.trace(evaluate_tree(t, gens))) <= 1e-12

    @given(seeds, st.integers(2, 6))
    def test_skew_and_jacobi(self, seed, d):
        rng = np.random.default_rng(seed)
        X, Y, Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(3))
        assert np.linalg.norm(commutator(X, Y) + commutator(Y, X)) <= 1e-10
        jac = commutator(X, commutator(Y, Z)) + commutator(Y, commutator(Z, X)) + commutator(Z, commutator(X, Y))
        assert np.linalg.norm(jac) <= 1e-10

    @given(seeds, st.sampled_from([3, 5]))
    def test_order_four_relation_from_jacobi(self, seed, d):
        # Jacobi on ([A,B], A, B) forces [A,[B,[A,B]]] = +[B,[A,[A,B]]]
        gens = random_anti_hermitian_pair(d, seed)
        lhs = evaluate_tree(parse_tree("[A,[B,[A,B]]]"), gens)
        rhs = evaluate_tree(parse_tree("[B,[A,[A,B]]]"), gens)
        assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(1.0, np.linalg.norm(lhs))

    @given(seeds, st.sampled_from([3, 5]))
    def test_order_six_redundancy(self, seed, d):
        gens = random_anti_hermitian_pair(d, seed)
        ev = lambda s: evaluate_tree(parse_tree(s), gens)
        combo = (ev("[B[A[A[B[A,B]]]]]") + ev("[A[B[A[B[B,A]]]]]")
                 - (ev("[A[A[B[B[B,A]]]]]") + ev("[B[B[A[A[A,B]]]]]")) / 3)
        assert np.linalg.norm(combo) <= 1e-10


class TestConjectureIII:
    def ranks(self, d, k, seed=0):
        return [r.cumulative_rank for r in verify_conjecture_III(d, k, seed).rows]

    def test_d2(self):
        assert self.ranks(2, 3) == [2, 3, 3]

    def test_d3(self):
        assert self.ranks(3, 5) == [2, 3, 5, 8, 8]

    def test_d4(self):
        report = verify_conjecture_III(4, 6, 0)
        assert [r.cumulative_rank for r in report.rows] == [2, 3, 5, 8, 14, 15]
        assert [r.lyndon_count for r in report.rows] == [2, 1, 2, 3, 6, 9]
        assert report.passed and report.saturation_order == 6

    @pytest.mark.parametrize("seed", range(5))
    def test_rank_monotone_and_capped(self, seed):
        r = self.ranks(3, 6, seed)
        assert r == sorted(r) and max(r) <= 8

    def test_saturation_predictions(self):
        assert [predicted_saturation_order(d) for d in (2, 3, 4, 8)] == [2, 4, 6, 8]
        for d in (2, 3, 4, 8, 20):
            assert predicted_saturation_order(d) <= log2_order_bound(d)

    def test_table_and_dict(self):
        report = verify_conjecture_III(2, 3, 0)
        assert report.table().splitlines()[0].split() == ["order", "a_k", "indep", "rank", "expect"]
        assert report.to_dict()["saturation_order"] == 2

    def test_commuting_generators_fail(self):
        from uforge.generators import GeneratorPair

        Z = np.diag([1.0, -1.0, 0.0]) / 2
        W = np.diag([1.0, 1.0, -2.0]) / 4
        assert not verify_conjecture_III(3, 3, 0, controls=GeneratorPair(Z, W)).passed

    def test_bracket_degree(self):
        t = Bracket(Leaf(0), Bracket(Leaf(0), Leaf(1)))
        assert t.degree == 3
