"""Alternating pulse sequences ``U = exp(-iB tau_N) exp(-iA t_N) ... exp(-iA t_1)``.

Pulse order convention: ``seq.pulses[0]`` is the first pulse applied, i.e.
the rightmost factor of the product. Appending a pulse multiplies the
evaluated unitary on the left. Pulse positions are 0-based.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .generators import GeneratorPair
from .linalg import InvalidOperandError, validate_hermitian

GENERATOR_IDS = {"A": 0, "B": 1}


class InvalidIndexError(IndexError):
    pass


class InvalidFormError(ValueError):
    """A sequence is not in the canonical alternating A,B,A,B,... form."""


@dataclass(frozen=True)
class PulseSequence:
    controls: GeneratorPair
    pulses: tuple = ()

    def __post_init__(self):
        pulses = tuple((str(g), float(t)) for g, t in self.pulses)
        for g, t in pulses:
            if g not in GENERATOR_IDS:
                raise InvalidOperandError(f"unknown generator {g!r}")
            if not np.isfinite(t):
                raise InvalidOperandError("pulse durations must be finite")
        object.__setattr__(self, "pulses", pulses)

    @classmethod
    def alternating(cls, controls, durations, start="A"):
        """Canonical form from a flat duration list ``t1, tau1, t2, tau2, ...``."""
        names = ("A", "B") if start == "A" else ("B", "A")
        return cls(controls, tuple((names[k % 2], t) for k, t in enumerate(durations)))

    @classmethod
    def from_times(cls, controls, t, tau):
        if len(tau) not in (len(t), len(t) - 1):
            raise InvalidOperandError("tau must have as many entries as t, or one fewer")
        flat = [x for pair in zip(t, tau) for x in pair]
        if len(tau) < len(t):
            flat.append(t[-1])
        return cls.alternating(controls, flat)

    def __len__(self):
        return len(self.pulses)

    @property
    def dim(self):
        return self.controls.dim

    @property
    def generators(self):
        return tuple(g for g, _ in self.pulses)

    @property
    def gen_ids(self):
        return np.array([GENERATOR_IDS[g] for g, _ in self.pulses], dtype=np.int64)

    @property
    def durations(self):
        return np.array([t for _, t in self.pulses], dtype=np.float64)

    @property
    def is_canonical(self):
        return all(g == "AB"[k % 2] for k, (g, _) in enumerate(self.pulses))

    def with_durations(self, durations):
        durations = np.asarray(durations, dtype=np.float64)
        if durations.shape != (len(self),):
            raise InvalidOperandError(f"expected {len(self)} durations, got {durations.shape}")
        return PulseSequence(self.controls, tuple(zip(self.generators, durations.tolist())))

    def scaled(self, c):
        return self.with_durations(c * self.durations)

    def then(self, other):
        """Sequence applying ``self`` first and ``other`` afterwards."""
        if other.controls is not self.controls:
            raise InvalidOperandError("sequences use different control pairs")
        return PulseSequence(self.controls, self.pulses + other.pulses)

    def factors(self, sign=-1.0):
        w, V = self.controls.spectral
        return kernels.expm_stack(V, w, self.gen_ids, self.durations, sign)


def evaluate(seq):
    if len(seq) == 0:
        return np.eye(seq.dim, dtype=np.complex128)
    return kernels.prefix_products(seq.factors())[-1]


def inverse(seq):
    return PulseSequence(seq.controls, tuple((g, -t) for g, t in reversed(seq.pulses)))


def partial_derivative(seq, index):
    """``dU/d(duration of pulse index)``: ``(-iG)`` inserted left of that pulse's factor."""
    if not 0 <= index < len(seq):
        raise InvalidIndexError(f"pulse index {index} out of range for {len(seq)} pulses")
    F = seq.factors()
    P = kernels.prefix_products(F)
    S = kernels.suffix_products(F)
    G = seq.controls.generator(seq.pulses[index][0])
    return S[index] @ (-1j * G) @ P[index]


def tangent_matrices(seq):
    """``U^dagger dU/dx_k`` for every pulse, as a ``(n, d, d)`` stack.

    With ``P_k`` the product of the first ``k+1`` factors this equals
    ``P_k^dagger (-i G_k) P_k``, so the full product never needs inverting.
    """
    if len(seq) == 0:
        return np.zeros((0, seq.dim, seq.dim), dtype=np.complex128)
    P = kernels.prefix_products(seq.factors())
    return kernels.conjugate_stack(P, seq.controls.mats, seq.gen_ids)


def conjugated_generator(prefix, delta, generator="B"):
    """``W exp(-iG delta) W^dagger`` with ``W = evaluate(inverse(prefix))``.

    ``prefix`` holds the first pulses of a forward sequence; the result is the
    group element produced by lengthening the pulse that follows the prefix by
    ``delta`` and then undoing the whole sequence.
    """
    if abs(delta) > np.pi + 1e-12:
        raise InvalidOperandError(f"|delta| must be <= pi, got {delta}")
    W = evaluate(inverse(prefix))
    w, V = prefix.controls.spectral
    g = GENERATOR_IDS[generator]
    E = kernels.expm_stack(V[g : g + 1], w[g : g + 1], np.zeros(1, dtype=np.int64), np.array([delta]))[0]
    return W @ E @ W.conj().T


def insert_delta(seq, position, delta):
    """Forward sequence with pulse ``position`` lengthened by ``delta``, followed by ``inverse(seq)``.

    Evaluates to ``conjugated_generator(prefix, delta, g)`` where ``prefix``
    is the first ``position`` pulses and ``g`` the generator of the lengthened
    pulse.
    """
    if not 0 <= position < len(seq):
        raise InvalidIndexError(f"pulse index {position} out of range for {len(seq)} pulses")
    pulses = list(seq.pulses)
    g, t = pulses[position]
    pulses[position] = (g, t + delta)
    return PulseSequence(seq.controls, tuple(pulses)).then(inverse(seq))


def repeat_compile(seq, m):
    if int(m) != m or m < 1:
        raise ValueError(f"repeat count must be a positive integer, got {m}")
    return PulseSequence(seq.controls, seq.pulses * int(m))


def validate_density_matrix(rho, atol=1e-10):
    rho = validate_hermitian(rho, atol=atol)
    if abs(np.trace(rho).real - 1.0) > atol:
        raise InvalidOperandError("density matrix must have unit trace")
    if np.min(np.linalg.eigvalsh(rho)) < -atol:
        raise InvalidOperandError("density matrix must be positive semi-definite")
    return rho


def otoc(w, v, u_t, rho):
    """Out-of-time-ordered correlator ``Tr(W_t^dagger V^dagger W_t V rho)``, ``W_t = U^dagger W U``."""
    rho = validate_density_matrix(rho)
    w = np.asarray(w, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    u_t = np.asarray(u_t, dtype=np.complex128)
    wt = u_t.conj().T @ w @ u_t
    return complex(np.trace(wt.conj().T @ v.conj().T @ wt @ v @ rho))
