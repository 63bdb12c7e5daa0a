"""Tangent frames ``{U^dagger dU/dt_k, U^dagger dU/dtau_k}`` and the spanning experiments."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import math

import numpy as np

from . import kernels
from .generators import local_chain_pair, random_dense_pair
from .linalg import DEFAULT_RANK_TOL, numerical_rank, singular_values
from .sequence import InvalidFormError, PulseSequence, tangent_matrices


@dataclass(frozen=True, eq=False)
class TangentFrame:
    dim: int
    vectors: np.ndarray
    source: PulseSequence

    def __len__(self):
        return self.vectors.shape[0]


def build_frame(seq):
    if not seq.is_canonical:
        raise InvalidFormError("tangent frames need the alternating A,B,A,B,... form")
    X = tangent_matrices(seq)
    d = seq.dim
    # the trace is analytically zero; strip rounding residue before vectorizing
    tr = np.trace(X, axis1=1, axis2=2) / d
    X = X - tr[:, None, None] * np.eye(d)
    vectors = kernels.su_coords(X) if len(seq) else np.zeros((0, d * d - 1))
    return TangentFrame(d, vectors, seq)


def frame_rank(frame, rel_tol=DEFAULT_RANK_TOL):
    if len(frame) == 0:
        return 0
    return numerical_rank(frame.vectors, rel_tol)


def frame_gap(frame):
    """``s_{d^2-1} / s_1``: how far the last needed singular value sits above zero."""
    s = singular_values(frame.vectors)
    need = frame.dim**2 - 1
    if len(s) < need or s[0] == 0.0:
        return 0.0
    return float(s[need - 1] / s[0])


def sample_durations(controls, n_pulses, rng, scale=None, start="A"):
    """Random durations for a canonical sequence of ``n_pulses`` pulses.

    With ``scale=None`` each duration is uniform on ``(0, pi/||G||_2]`` for
    its generator ``G``, so a single pulse sweeps at most half a period of
    the fastest eigenphase. A number gives uniform ``(0, scale]`` instead.
    """
    u = 1.0 - rng.random(n_pulses)  # (0, 1]
    offset = 0 if start == "A" else 1
    if scale is None:
        norms = controls.op_norms
        caps = np.array([np.pi / norms[(k + offset) % 2] for k in range(n_pulses)])
    else:
        caps = np.full(n_pulses, float(scale))
    return u * caps


@dataclass
class ConjectureReport:
    conjecture: str
    dimension: int
    n_pairs: int
    trials: int
    seed: int
    rel_tol: float
    ranks: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @property
    def target_rank(self):
        return self.dimension**2 - 1

    @property
    def under_parameterized(self):
        return 2 * self.n_pairs < self.target_rank

    @property
    def passed(self):
        return len(self.ranks) == self.trials and all(r == self.target_rank for r in self.ranks)

    @property
    def min_gap(self):
        return min(self.gaps) if self.gaps else 0.0

    def to_dict(self):
        out = asdict(self)
        out.update(
            target_rank=self.target_rank,
            under_parameterized=self.under_parameterized,
            min_gap=self.min_gap,
            passed=self.passed,
        )
        return out


def _trial(args):
    make_pair, pair_args, n_pairs, trial_seed, scale, rel_tol = args
    controls = make_pair(*pair_args, trial_seed)
    rng = np.random.default_rng([trial_seed, 1])
    durations = sample_durations(controls, 2 * n_pairs, rng, scale)
    frame = build_frame(PulseSequence.alternating(controls, durations))
    return frame_rank(frame, rel_tol), frame_gap(frame)


def _local_pair(n_qubits, homogeneous, seed):
    return local_chain_pair(n_qubits, seed, homogeneous)


def _run(report, make_pair, pair_args, scale, jobs):
    work = [
        (make_pair, pair_args, report.n_pairs, report.seed + i, scale, report.rel_tol)
        for i in range(report.trials)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_trial, work))
    else:
        results = [_trial(w) for w in work]
    report.ranks = [int(r) for r, _ in results]
    report.gaps = [float(g) for _, g in results]
    return report


def verify_conjecture_I(d, trials, seed, n_pairs=None, rel_tol=DEFAULT_RANK_TOL, duration_scale=None, jobs=1):
    """Rank of the tangent frame at random points for random dense pairs.

    Trial ``i`` draws its control pair from ``seed + i``. ``n_pairs``
    defaults to ``ceil(d^2/2)`` so the frame has at least ``d^2`` vectors.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    n_pairs = math.ceil(d * d / 2) if n_pairs is None else int(n_pairs)
    report = ConjectureReport("I", d, n_pairs, trials, seed, rel_tol,
                              params={"duration_scale": duration_scale})
    return _run(report, random_dense_pair, (d,), duration_scale, jobs)


def verify_conjecture_II(n_qubits, trials, seed, homogeneous=False, n_pairs=None,
                         rel_tol=DEFAULT_RANK_TOL, duration_scale=None, jobs=1):
    if n_qubits < 3:
        raise ValueError("need at least 3 qubits")
    d = 2**n_qubits
    n_pairs = math.ceil(d * d / 2) if n_pairs is None else int(n_pairs)
    report = ConjectureReport("II", d, n_pairs, trials, seed, rel_tol,
                              params={"n_qubits": n_qubits, "homogeneous": homogeneous,
                                      "duration_scale": duration_scale})
    return _run(report, _local_pair, (n_qubits, homogeneous), duration_scale, jobs)
