"""Lyndon words, Witt dimensions and the Lyndon basis of the free Lie algebra.

Letters are integers ``0..q-1``, printed as ``a, b, c, ...`` for words and
``A, B, C, ...`` for generators inside commutator trees.
"""
from dataclasses import dataclass, field
import math
import string

import numpy as np

from .linalg import DEFAULT_RANK_TOL, commutator, singular_values
from .generators import random_dense_pair
from . import kernels


@dataclass(frozen=True)
class LyndonWord:
    symbols: tuple
    q: int = 2

    def __post_init__(self):
        symbols = tuple(int(s) for s in self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise ValueError("Lyndon words are non-empty")
        if any(not 0 <= s < self.q for s in symbols):
            raise ValueError(f"symbols must lie in 0..{self.q - 1}")
        if not is_lyndon(symbols):
            raise ValueError(f"{_letters(symbols)} is not a Lyndon word")

    @classmethod
    def parse(cls, text, q=2):
        return cls(tuple(string.ascii_lowercase.index(c) for c in text), q)

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        return _letters(self.symbols)


def _letters(symbols):
    return "".join(string.ascii_lowercase[s] for s in symbols)


def is_lyndon(symbols):
    """Strictly smaller than every non-trivial rotation."""
    w = tuple(symbols)
    return len(w) > 0 and all(w < w[i:] + w[:i] for i in range(1, len(w)))


def lyndon_words(q, max_len):
    """All Lyndon words of length <= max_len, ordered by length then lexicographically.

    Generation uses Duval's successor algorithm, which produces the words in
    plain lexicographic order.
    """
    if q < 2 or max_len < 1:
        raise ValueError("need q >= 2 and max_len >= 1")
    words = []
    w = [-1]
    while w:
        w[-1] += 1
        words.append(tuple(w))
        m = len(w)
        while len(w) < max_len:
            w.append(w[-m])
        while w and w[-1] == q - 1:
            w.pop()
    words.sort(key=lambda u: (len(u), u))
    return [LyndonWord(u, q) for u in words]


def mobius(n):
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


def witt_dimension(q, k):
    """Dimension of the degree-k part of the free Lie algebra on q generators."""
    if q < 2 or k < 1:
        raise ValueError("need q >= 2 and k >= 1")
    total = sum(mobius(k // e) * q**e for e in range(1, k + 1) if k % e == 0)
    return total // k


def standard_factorization(word):
    """Split ``u = v w`` with ``w`` the lexicographically least proper suffix."""
    u = word.symbols
    if len(u) < 2:
        raise ValueError("single letters have no standard factorization")
    split = min(range(1, len(u)), key=lambda i: u[i:])
    return LyndonWord(u[:split], word.q), LyndonWord(u[split:], word.q)


class CommutatorTree:
    degree: int


@dataclass(frozen=True)
class Leaf(CommutatorTree):
    index: int

    @property
    def degree(self):
        return 1

    def __str__(self):
        return string.ascii_uppercase[self.index]


@dataclass(frozen=True)
class Bracket(CommutatorTree):
    left: CommutatorTree
    right: CommutatorTree
    degree: int = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "degree", self.left.degree + self.right.degree)

    def __str__(self):
        return f"[{self.left},{self.right}]"


def lyndon_to_commutator(word):
    if len(word) == 1:
        return Leaf(word.symbols[0])
    v, w = standard_factorization(word)
    return Bracket(lyndon_to_commutator(v), lyndon_to_commutator(w))


class TreeParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


def parse_tree(text):
    """Parse bracket notation such as ``[A,[A,B]]``.

    Commas are optional, so the compact form ``[B[A[A,B]]]`` is accepted too.
    Letters may be upper or lower case.
    """
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def node():
        nonlocal pos
        skip()
        if pos >= len(text):
            raise TreeParseError("unexpected end of input", pos)
        c = text[pos]
        if c.isalpha() and c.isascii():
            pos += 1
            return Leaf(string.ascii_uppercase.index(c.upper()))
        if c != "[":
            raise TreeParseError(f"unexpected character {c!r}", pos)
        pos += 1
        left = node()
        skip()
        if pos < len(text) and text[pos] == ",":
            pos += 1
        right = node()
        skip()
        if pos >= len(text) or text[pos] != "]":
            raise TreeParseError("expected ']'", pos)
        pos += 1
        return Bracket(left, right)

    tree = node()
    skip()
    if pos != len(text):
        raise TreeParseError(f"trailing character {text[pos]!r}", pos)
    return tree


def tree_leaves(tree):
    if isinstance(tree, Leaf):
        return (tree.index,)
    return tree_leaves(tree.left) + tree_leaves(tree.right)


def evaluate_tree(tree, generators, cache=None):
    """Matrix value of a commutator tree with leaf ``i`` mapped to ``generators[i]``."""
    if cache is not None and tree in cache:
        return cache[tree]
    if isinstance(tree, Leaf):
        if not 0 <= tree.index < len(generators):
            raise ValueError(f"no generator for leaf {tree}")
        value = np.asarray(generators[tree.index], dtype=np.complex128)
    else:
        value = commutator(evaluate_tree(tree.left, generators, cache),
                           evaluate_tree(tree.right, generators, cache))
    if cache is not None:
        cache[tree] = value
    return value


def lyndon_basis(q, max_order):
    return [lyndon_to_commutator(w) for w in lyndon_words(q, max_order)]


@dataclass
class OrderRow:
    order: int
    lyndon_count: int
    independent: int
    cumulative_rank: int
    expected_rank: int


@dataclass
class FreeLieReport:
    dimension: int
    max_order: int
    seed: int
    rel_tol: float
    rows: list

    @property
    def target_rank(self):
        return self.dimension**2 - 1

    @property
    def passed(self):
        return all(r.cumulative_rank == r.expected_rank for r in self.rows)

    @property
    def saturation_order(self):
        for r in self.rows:
            if r.cumulative_rank == self.target_rank:
                return r.order
        return None

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "max_order": self.max_order,
            "seed": self.seed,
            "rel_tol": self.rel_tol,
            "rows": [vars(r) for r in self.rows],
            "target_rank": self.target_rank,
            "saturation_order": self.saturation_order,
            "passed": self.passed,
        }

    def table(self):
        lines = [f"{'order':>5} {'a_k':>6} {'indep':>6} {'rank':>6} {'expect':>6}"]
        for r in self.rows:
            lines.append(f"{r.order:>5} {r.lyndon_count:>6} {r.independent:>6} "
                         f"{r.cumulative_rank:>6} {r.expected_rank:>6}")
        return "\n".join(lines)


def verify_conjecture_III(d, max_order, seed, rel_tol=DEFAULT_RANK_TOL, controls=None):
    """Cumulative rank in su(d) of the Lyndon-basis commutators of a random pair.

    Leaves are evaluated as ``-iA`` and ``-iB`` so every commutator is
    anti-Hermitian regardless of degree; each is Frobenius-normalized
    before vectorization.
    """
    if d < 2 or max_order < 1:
        raise ValueError("need d >= 2 and max_order >= 1")
    if controls is None:
        controls = random_dense_pair(d, seed)
    gens = [-1j * controls.a, -1j * controls.b]
    cache = {}
    trees = lyndon_basis(2, max_order)
    rows = []
    vectors = np.zeros((0, d * d - 1))
    rank = 0
    expected_total = 0
    for k in range(1, max_order + 1):
        level = [t for t in trees if t.degree == k]
        mats = np.array([evaluate_tree(t, gens, cache) for t in level])
        norms = np.linalg.norm(mats, axis=(1, 2))
        mats = mats / np.where(norms > 0, norms, 1.0)[:, None, None]
        vectors = np.vstack([vectors, kernels.su_coords(mats)])
        s = singular_values(vectors)
        new_rank = int(np.sum(s > rel_tol * s[0])) if s[0] > 0 else 0
        expected_total += witt_dimension(2, k)
        rows.append(OrderRow(k, len(level), new_rank - rank, new_rank,
                             min(expected_total, d * d - 1)))
        rank = new_rank
    return FreeLieReport(d, max_order, seed, rel_tol, rows)


def predicted_saturation_order(d, q=2):
    """Smallest k with sum_{j<=k} a_j >= d^2 - 1."""
    total, k = 0, 0
    while total < d * d - 1:
        k += 1
        total += witt_dimension(q, k)
    return k


def log2_order_bound(d, slack=3):
    return 2 * math.log2(d) + slack
