"""Gradient-descent synthesis of a target unitary from training pairs.

The loss is ``E = 1 - (1/M) sum_l Re <out_l| U(t, tau) |in_l>``. For unit
vectors this equals ``(1/2M) sum_l ||U in_l - out_l||^2``, which is how it
is evaluated: the subtraction-free form keeps precision down to ``E ~ 1e-30``.
"""
from dataclasses import dataclass, field, replace
import math

import numpy as np

from . import kernels
from .linalg import InvalidOperandError, mat_exp, validate_hermitian, validate_unitary
from .sequence import PulseSequence, evaluate, inverse, repeat_compile
from .tangent import sample_durations

LOSSES = ("re", "abs")


@dataclass(frozen=True, eq=False)
class TrainingSet:
    inputs: np.ndarray
    outputs: np.ndarray

    def __post_init__(self):
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=np.complex128))
        outputs = np.atleast_2d(np.asarray(self.outputs, dtype=np.complex128))
        if inputs.shape != outputs.shape or inputs.shape[0] == 0:
            raise InvalidOperandError(f"input/output shapes differ or are empty: {inputs.shape} vs {outputs.shape}")
        for name, states in (("input", inputs), ("output", outputs)):
            bad = np.abs(np.linalg.norm(states, axis=1) - 1.0) > 1e-12
            if np.any(bad):
                raise InvalidOperandError(f"{name} state {int(np.argmax(bad))} is not unit-norm")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)

    @classmethod
    def from_unitary(cls, U):
        """The computational basis and its images: ``d`` pairs that pin ``U`` down exactly."""
        U = validate_unitary(U)
        return cls(np.eye(U.shape[0]), U.T)

    @property
    def dim(self):
        return self.inputs.shape[1]

    def __len__(self):
        return self.inputs.shape[0]

    @property
    def overlap_operator(self):
        """``X = (1/M) sum_l |in_l><out_l|`` so the mean overlap is ``Tr(U X)``."""
        return self.inputs.T @ self.outputs.conj() / len(self)


def _check_dims(seq, ts):
    if seq.dim != ts.dim:
        raise InvalidOperandError(f"sequence acts on d={seq.dim}, training set on d={ts.dim}")


def _loss(U, ts, loss):
    if loss == "re":
        diff = U @ ts.inputs.T - ts.outputs.T
        return float(np.sum(np.abs(diff) ** 2) / (2 * len(ts)))
    z = np.trace(U @ ts.overlap_operator)
    return float(1.0 - abs(z))


def error_training(seq, ts, loss="re"):
    _check_dims(seq, ts)
    return _loss(evaluate(seq), ts, loss)


def _error_and_gradient(seq, ts, loss):
    X = ts.overlap_operator
    if len(seq) == 0:
        return _loss(np.eye(seq.dim), ts, loss), np.zeros(0)
    F = seq.factors()
    P = kernels.prefix_products(F)
    S = kernels.suffix_products(F)
    U = P[-1]
    dz = kernels.overlap_derivatives(P, S, seq.controls.mats, seq.gen_ids, X)
    if loss == "re":
        grad = -dz.real
    else:
        z = np.trace(U @ X)
        grad = -np.real(np.conj(z) * dz) / max(abs(z), 1e-300)
    return _loss(U, ts, loss), grad


def error_gradient(seq, ts, loss="re"):
    """``dE/dx_k`` for every pulse duration ``x_k``."""
    _check_dims(seq, ts)
    return _error_and_gradient(seq, ts, loss)[1]


@dataclass(frozen=True)
class DescentConfig:
    max_iterations: int = 5000
    initial_step: float = 1.0
    step_shrink: float = 0.5
    convergence_threshold: float = 1e-6
    block_size: int = 4
    max_blocks: int = 3
    seed: int = 0
    init: str = "mirror"
    duration_scale: float | None = None
    loss: str = "re"
    stall_window: int = 50
    stall_tol: float = 1e-10
    armijo: float = 1e-4

    def __post_init__(self):
        positive = ("max_iterations", "initial_step", "convergence_threshold", "block_size", "max_blocks", "stall_window")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.step_shrink < 1:
            raise ValueError("step_shrink must lie in (0, 1)")
        if self.init not in ("mirror", "random"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}")


@dataclass
class DescentReport:
    final_error: float
    error_trace: list
    step_trace: list
    block_trace: list
    blocks_used: int
    final_sequence: PulseSequence
    converged: bool
    config: DescentConfig = None

    @property
    def iterations(self):
        return len(self.error_trace) - 1

    def trace_rows(self):
        return [
            {"iteration": i, "error": e, "step": s, "block_count": b}
            for i, (e, s, b) in enumerate(zip(self.error_trace, self.step_trace, self.block_trace))
        ]

    def to_dict(self):
        return {
            "config": vars(self.config) if self.config is not None else None,
            "final_error": self.final_error,
            "converged": self.converged,
            "blocks_used": self.blocks_used,
            "iterations": self.iterations,
            "n_pulses": len(self.final_sequence),
            "trace": self.trace_rows(),
        }


def _new_block(controls, cfg, rng, n_existing, near_identity):
    start = "AB"[n_existing % 2]
    n = cfg.block_size
    if cfg.init == "mirror":
        durations = sample_durations(controls, n, rng, cfg.duration_scale, start)
        fwd = PulseSequence.alternating(controls, durations, start)
        return fwd.then(inverse(fwd))
    if near_identity:
        durations = 1e-3 * (1.0 - rng.random(n))
    else:
        durations = sample_durations(controls, n, rng, cfg.duration_scale, start)
    return PulseSequence.alternating(controls, durations, start)


def synthesize(target, controls, cfg=DescentConfig()):
    """Fit durations so the sequence reproduces ``target`` (a unitary or a :class:`TrainingSet`).

    Descent uses Barzilai-Borwein trial steps with Armijo backtracking, so
    every accepted step lowers ``E``. When progress stalls a fresh block is
    appended. With ``init="mirror"`` a block is a random sequence followed
    by its inverse: it evaluates to the identity, yet sits at a generic
    point where the gradients span su(d).
    """
    ts = target if isinstance(target, TrainingSet) else TrainingSet.from_unitary(target)
    if ts.dim != controls.dim:
        raise InvalidOperandError(f"target has d={ts.dim}, controls d={controls.dim}")
    rng = np.random.default_rng(cfg.seed)

    zero = PulseSequence.alternating(controls, np.zeros(cfg.block_size))
    E0 = error_training(zero, ts, cfg.loss)
    if E0 <= cfg.convergence_threshold:
        return DescentReport(E0, [E0], [0.0], [1], 1, zero, True, cfg)

    seq = _new_block(controls, cfg, rng, 0, near_identity=False)
    x = seq.durations
    blocks = 1
    step = cfg.initial_step
    prev = None
    E, g = _error_and_gradient(seq, ts, cfg.loss)
    errors, steps, block_trace = [E], [0.0], [blocks]
    phase_start = 0

    for _ in range(cfg.max_iterations):
        if E <= cfg.convergence_threshold:
            break
        if prev is not None:
            s_vec, y_vec = x - prev[0], g - prev[1]
            sy = float(s_vec @ y_vec)
            step = float(s_vec @ s_vec) / sy if sy > 0 else 2.0 * step
        gg = float(g @ g)
        accepted = False
        alpha = step
        while alpha > 1e-16:
            x_new = x - alpha * g
            E_new = error_training(seq.with_durations(x_new), ts, cfg.loss)
            if E_new <= E - cfg.armijo * alpha * gg:
                accepted = True
                break
            alpha *= cfg.step_shrink
        stalled = not accepted
        if accepted:
            prev = (x, g)
            x = x_new
            seq = seq.with_durations(x)
            step = alpha
            E, g = _error_and_gradient(seq, ts, cfg.loss)
            errors.append(E)
            steps.append(alpha)
            block_trace.append(blocks)
            w = cfg.stall_window
            if len(errors) - phase_start > w:
                old = errors[-1 - w]
                stalled = (old - E) < cfg.stall_tol * old
        if stalled and E > cfg.convergence_threshold:
            if blocks >= cfg.max_blocks:
                break
            seq = seq.then(_new_block(controls, cfg, rng, len(seq), near_identity=True))
            x = seq.durations
            blocks += 1
            prev = None
            step = cfg.initial_step
            E, g = _error_and_gradient(seq, ts, cfg.loss)
            phase_start = len(errors)

    return DescentReport(E, errors, steps, block_trace, blocks, seq, E <= cfg.convergence_threshold, cfg)


@dataclass
class CompileReport:
    descent: DescentReport
    repeats: int
    step_time: float
    sequence: PulseSequence
    frobenius_error: float

    @property
    def total_pulses(self):
        return len(self.sequence)

    def to_dict(self):
        return {
            "repeats": self.repeats,
            "step_time": self.step_time,
            "total_pulses": self.total_pulses,
            "frobenius_error": self.frobenius_error,
            "descent": self.descent.to_dict(),
        }


def repetition_count(t, epsilon):
    return max(1, math.ceil(abs(t) / epsilon - 1e-12))


def compile_target(H, t, epsilon, controls, cfg=DescentConfig(), frobenius_tol=1e-6):
    """Realize ``exp(-iHt)`` by synthesizing a short step and repeating it.

    The step is ``exp(-iH sign(t) eps')`` with ``eps' = |t|/m`` and
    ``m = ceil(|t|/epsilon)``. Per-step errors add at most linearly under
    repetition, so the descent threshold is tightened until ``m`` copies
    stay within ``frobenius_tol``.
    """
    H = validate_hermitian(H, traceless=True, norm_one=True)
    if abs(t) > np.pi:
        raise ValueError(f"|t| must be <= pi, got {t}")
    if not 0 < epsilon <= abs(t):
        raise ValueError(f"need 0 < epsilon <= |t|, got epsilon={epsilon}, t={t}")
    m = repetition_count(t, epsilon)
    step_time = abs(t) / m
    d = H.shape[0]
    V = mat_exp(H, math.copysign(step_time, t))
    threshold = min(cfg.convergence_threshold, (frobenius_tol / m) ** 2 / (2 * d))
    if cfg.loss != "re":
        cfg = replace(cfg, loss="re")
    report = synthesize(V, controls, replace(cfg, convergence_threshold=threshold))
    seq = repeat_compile(report.final_sequence, m)
    err = float(np.linalg.norm(evaluate(seq) - mat_exp(H, t)))
    return CompileReport(report, m, step_time, seq, err)
