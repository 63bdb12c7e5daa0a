"""Control Hamiltonian pairs: dense GUE pairs and 1-D nearest-neighbour chains."""
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .linalg import (
    InvalidOperandError,
    commutator,
    normalize_trace_norm,
    project_traceless,
    validate_hermitian,
)

NONCOMMUTING_TOL = 1e-8


class InvalidDimensionError(InvalidOperandError):
    pass


class PairKind(str, Enum):
    DENSE_RANDOM = "dense-random"
    LOCAL_RANDOM = "local-random"
    LOCAL_HOMOGENEOUS = "local-homogeneous"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class GeneratorPair:
    """Two Hermitian generators with a cached spectral decomposition.

    Pulse sequences only need this much; :class:`ControlPair` adds the
    traceless / unit-norm / non-commuting contract on top.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = validate_hermitian(self.a)
        b = validate_hermitian(self.b)
        if a.shape != b.shape:
            raise InvalidOperandError(f"generator shapes differ: {a.shape} vs {b.shape}")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def dim(self):
        return self.a.shape[0]

    @cached_property
    def mats(self):
        m = np.array([self.a, self.b])
        m.setflags(write=False)
        return m

    @cached_property
    def spectral(self):
        """``(eigvals, eigvecs)`` stacked as ``(2, d)`` and ``(2, d, d)``."""
        wa, va = np.linalg.eigh(self.a)
        wb, vb = np.linalg.eigh(self.b)
        return np.array([wa, wb]), np.array([va, vb])

    @cached_property
    def op_norms(self):
        w, _ = self.spectral
        return np.max(np.abs(w), axis=1)

    def generator(self, name):
        return {"A": self.a, "B": self.b}[name]


@dataclass(frozen=True, eq=False)
class ControlPair(GeneratorPair):
    kind: PairKind = PairKind.CUSTOM
    seed: int | None = None

    def __post_init__(self):
        super().__post_init__()
        validate_hermitian(self.a, traceless=True, norm_one=True)
        validate_hermitian(self.b, traceless=True, norm_one=True)
        if np.linalg.norm(commutator(self.a, self.b)) <= NONCOMMUTING_TOL:
            raise InvalidOperandError("control Hamiltonians commute")


def random_traceless_hermitian(d, rng):
    """GUE draw with the trace removed, scaled to unit trace norm."""
    G = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    H = project_traceless((G + G.conj().T) / 2)
    return normalize_trace_norm(H)


def random_dense_pair(d, seed):
    if d < 2:
        raise InvalidDimensionError(f"need d >= 2, got {d}")
    rng = np.random.default_rng(seed)
    a = random_traceless_hermitian(d, rng)
    b = random_traceless_hermitian(d, rng)
    return ControlPair(a, b, PairKind.DENSE_RANDOM, seed)


def embed_two_qubit(block, first, n_qubits):
    """Place a 4x4 block on qubits ``(first, first+1)``, 1-based, of an n-qubit chain."""
    left = np.eye(2 ** (first - 1))
    right = np.eye(2 ** (n_qubits - first - 1))
    return np.kron(np.kron(left, block), right)


def chain_sites(n_qubits):
    """First qubits of the A-bonds ``(1,2),(3,4),...`` and B-bonds ``(2,3),(4,5),...``.

    For even ``n`` qubit ``n`` carries no B-bond; for odd ``n`` it carries
    no A-bond.
    """
    a_sites = list(range(1, n_qubits, 2))
    b_sites = list(range(2, n_qubits, 2))
    return a_sites, b_sites


def local_chain_pair(n_qubits, seed, homogeneous=False):
    if n_qubits < 3:
        raise InvalidDimensionError(f"need at least 3 qubits, got {n_qubits}")
    rng = np.random.default_rng(seed)
    a_sites, b_sites = chain_sites(n_qubits)
    if homogeneous:
        block_a = random_traceless_hermitian(4, rng)
        block_b = random_traceless_hermitian(4, rng)
        a_blocks = [block_a] * len(a_sites)
        b_blocks = [block_b] * len(b_sites)
    else:
        a_blocks = [random_traceless_hermitian(4, rng) for _ in a_sites]
        b_blocks = [random_traceless_hermitian(4, rng) for _ in b_sites]
    a = sum(embed_two_qubit(blk, i, n_qubits) for blk, i in zip(a_blocks, a_sites))
    b = sum(embed_two_qubit(blk, j, n_qubits) for blk, j in zip(b_blocks, b_sites))
    kind = PairKind.LOCAL_HOMOGENEOUS if homogeneous else PairKind.LOCAL_RANDOM
    return ControlPair(normalize_trace_norm(a), normalize_trace_norm(b), kind, seed)
