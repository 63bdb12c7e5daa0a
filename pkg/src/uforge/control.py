"""Controls in the presence of an always-on drift Hamiltonian ``H0``.

Drift time cannot be reversed, so every drift-bearing pulse here has a
non-negative duration; conjugation ``V H V^dagger`` is the only place an
inverse appears.
"""
from dataclasses import dataclass, field
import warnings

import numpy as np

from . import kernels
from .generators import GeneratorPair, NONCOMMUTING_TOL
from .linalg import DEFAULT_RANK_TOL, InvalidOperandError, commutator, singular_values, validate_hermitian
from .sequence import PulseSequence


@dataclass(frozen=True, eq=False)
class DriftControls:
    h0: np.ndarray
    ha: np.ndarray
    hb: np.ndarray
    gamma0: float = 1.0
    relaxed: bool = False

    def __post_init__(self):
        for name in ("h0", "ha", "hb"):
            object.__setattr__(self, name, validate_hermitian(getattr(self, name)))
        if not self.h0.shape == self.ha.shape == self.hb.shape:
            raise InvalidOperandError("drift and control Hamiltonians differ in shape")
        checks = [("Ha", "Hb", self.ha, self.hb)]
        if not self.relaxed:
            checks += [("H0", "Ha", self.h0, self.ha), ("H0", "Hb", self.h0, self.hb)]
        for n1, n2, x, y in checks:
            if np.linalg.norm(commutator(x, y)) <= NONCOMMUTING_TOL:
                raise InvalidOperandError(f"[{n1},{n2}] vanishes")

    @property
    def dim(self):
        return self.h0.shape[0]

    def pulse_pair(self):
        """The two effective generators ``H0 + gamma0*Ha`` and ``H0 + gamma0*Hb``."""
        return GeneratorPair(self.h0 + self.gamma0 * self.ha, self.h0 + self.gamma0 * self.hb)


@dataclass
class DriftDirection:
    matrix: np.ndarray
    warnings: list = field(default_factory=list)


def _forward_pulses(t, tau):
    t = [float(x) for x in t]
    tau = [float(x) for x in tau]
    if len(tau) not in (len(t), len(t) - 1):
        raise InvalidOperandError("tau must have as many entries as t, or one fewer")
    pulses = []
    for k, tk in enumerate(t):
        pulses.append(("A", tk))
        if k < len(tau):
            pulses.append(("B", tau[k]))
    if any(x < 0 for _, x in pulses):
        raise InvalidOperandError("drift cannot run backwards: durations must be non-negative")
    return tuple(pulses)


def _conjugator(pair, pulses):
    """``V = exp(i G_1 x_1) exp(i G_2 x_2) ...`` in the displayed left-to-right order."""
    seq = PulseSequence(pair, pulses)
    if len(seq) == 0:
        return np.eye(pair.dim, dtype=np.complex128)
    # V^dagger = exp(-i G_n x_n) ... exp(-i G_1 x_1) is the forward product
    return kernels.prefix_products(seq.factors())[-1].conj().T


def drift_conjugated_generator(dc, t, tau, insertion="Hb", bound=0.05):
    """``V H V^dagger`` with ``V`` the forward drift product and ``H`` the inserted control."""
    pulses = _forward_pulses(t, tau)
    notes = []
    too_long = [x for _, x in pulses if x > bound]
    if too_long:
        msg = f"{len(too_long)} duration(s) exceed the smallness bound {bound}"
        warnings.warn(msg)
        notes.append(msg)
    H = {"Ha": dc.ha, "Hb": dc.hb}[insertion]
    V = _conjugator(dc.pulse_pair(), pulses)
    return DriftDirection(V @ H @ V.conj().T, notes)


def time_ordered_exp(h0, hc, gamma, delta_t):
    """``prod_i exp(i (H0 + gamma_i Hc) dt)`` with ``i = 1`` the rightmost factor."""
    gamma = np.asarray(gamma, dtype=np.float64).ravel()
    if gamma.size == 0:
        raise ValueError("need at least one control sample")
    if not delta_t > 0:
        raise ValueError("delta_t must be positive")
    h0 = validate_hermitian(h0)
    hc = validate_hermitian(hc)
    Hs = h0[None] + gamma[:, None, None] * hc[None]
    w, V = np.linalg.eigh(Hs)
    F = kernels.expm_stack(V, w, np.arange(gamma.size), np.full(gamma.size, float(delta_t)), sign=1.0)
    return kernels.prefix_products(F)[-1]


def sample_gamma(fn, T, m, rule="left"):
    """Samples ``gamma_i = fn(t_i)`` on ``m`` equal steps of ``[0, T]``.

    ``rule="left"`` gives a first-order product formula, ``"mid"`` second order.
    """
    dt = T / m
    offset = {"left": 0.0, "mid": 0.5}[rule]
    return fn((np.arange(m) + offset) * dt), dt


def resample_nearest(times, values, m, T=None):
    """Nearest-neighbour resampling of ``(time, value)`` samples onto ``m`` left endpoints."""
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if times.size == 0:
        raise ValueError("empty sample list")
    order = np.argsort(times)
    times, values = times[order], values[order]
    T = times[-1] if T is None else T
    grid = np.arange(m) * (T / m)
    idx = np.clip(np.searchsorted(times, grid, side="right") - 1, 0, times.size - 1)
    return values[idx], T / m


@dataclass
class DriftRankReport:
    dimension: int
    n_steps: int
    duration_scale: float
    seed: int
    rank: int
    singular_values: list
    relaxed: bool

    @property
    def target_rank(self):
        return self.dimension**2 - 1

    @property
    def passed(self):
        return self.rank == self.target_rank

    def to_dict(self):
        out = vars(self).copy()
        out.update(target_rank=self.target_rank, passed=self.passed)
        return out


def drift_tangent_rank(dc, n_steps, duration_scale, seed, rel_tol=DEFAULT_RANK_TOL):
    """Rank of the first-order directions ``V_p H V_p^dagger``, ``H in {Ha, Hb}``, over all prefixes ``p``."""
    d = dc.dim
    if n_steps < -(-d * d // 2):
        raise ValueError(f"need n_steps >= ceil(d^2/2) = {-(-d * d // 2)}")
    rng = np.random.default_rng(seed)
    durations = duration_scale * (1.0 - rng.random(n_steps))
    pulses = tuple(("AB"[k % 2], x) for k, x in enumerate(durations))
    pair = dc.pulse_pair()
    seq = PulseSequence(pair, pulses)
    P = kernels.prefix_products(seq.factors())
    # V_p = P_p^dagger; include the empty prefix (V = I)
    Vs = np.concatenate([np.eye(d, dtype=np.complex128)[None], np.conj(np.swapaxes(P, 1, 2))])
    dirs = []
    for H in (dc.ha, dc.hb):
        M = Vs @ H @ np.conj(np.swapaxes(Vs, 1, 2))
        tr = np.trace(M, axis1=1, axis2=2) / d
        dirs.append(1j * (M - tr[:, None, None] * np.eye(d)))
    vectors = kernels.su_coords(np.concatenate(dirs))
    s = singular_values(vectors)
    rank = int(np.sum(s > rel_tol * s[0])) if s[0] > 0 else 0
    return DriftRankReport(d, n_steps, duration_scale, seed, rank, s.tolist(), dc.relaxed)
