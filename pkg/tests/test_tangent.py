import numpy as np
import pytest
from hypothesis import given, strategies as st

from uforge.generators import random_dense_pair
from uforge.linalg import su_vectorize
from uforge.sequence import InvalidFormError, PulseSequence
from uforge.tangent import (
    build_frame,
    frame_gap,
    frame_rank,
    sample_durations,
    verify_conjecture_I,
    verify_conjecture_II,
)

seeds = st.integers(0, 2**32 - 1)


def generic_seq(d, n_pairs, seed):
    pair = random_dense_pair(d, seed)
    return PulseSequence.alternating(pair, sample_durations(pair, 2 * n_pairs, np.random.default_rng(seed)))


def test_single_pulse_frame():
    pair = random_dense_pair(3, 0)
    frame = build_frame(PulseSequence(pair, [("A", 0.8)]))
    assert np.allclose(frame.vectors[0], su_vectorize(-1j * pair.a), atol=1e-14)


def test_frame_size_and_ambient_bound():
    frame = build_frame(generic_seq(2, 2, 1))
    assert len(frame) == 4 and frame.vectors.shape == (4, 3)
    assert frame_rank(frame) <= 3


def test_identity_point_has_rank_two():
    pair = random_dense_pair(3, 2)
    frame = build_frame(PulseSequence.alternating(pair, np.zeros(8)))
    va, vb = su_vectorize(-1j * pair.a), su_vectorize(-1j * pair.b)
    for k, v in enumerate(frame.vectors):
        assert np.allclose(v, va if k % 2 == 0 else vb, atol=1e-14)
    assert frame_rank(frame) == 2


def test_non_canonical_rejected():
    pair = random_dense_pair(2, 0)
    with pytest.raises(InvalidFormError):
        build_frame(PulseSequence(pair, [("B", 0.1), ("A", 0.2)]))


def test_d2_fifty_seeds_full_rank():
    assert all(frame_rank(build_frame(generic_seq(2, 2, s))) == 3 for s in range(50))


def test_d2_unit_interval_durations_full_rank():
    for s in range(50):
        pair = random_dense_pair(2, s)
        seq = PulseSequence.alternating(pair, 1.0 - np.random.default_rng(s).random(4))
        assert frame_rank(build_frame(seq)) == 3


@pytest.mark.parametrize("d", [3, 4])
def test_frozen_a_durations_lose_rank(d):
    pair = random_dense_pair(d, 5)
    dur = sample_durations(pair, 2 * (d * d // 2 + 1), np.random.default_rng(5))
    dur[0::2] = 0.0
    assert frame_rank(build_frame(PulseSequence.alternating(pair, dur))) < d * d - 1


@given(seeds, st.sampled_from([0.5, 2.0]))
def test_rank_invariant_under_duration_rescaling(seed, c):
    seq = generic_seq(3, 5, seed)
    assert frame_rank(build_frame(seq.scaled(c))) == frame_rank(build_frame(seq))


@given(seeds, st.integers(2, 4), st.integers(1, 10))
def test_rank_bounded(seed, d, n_pairs):
    frame = build_frame(generic_seq(d, n_pairs, seed))
    assert frame_rank(frame) <= min(2 * n_pairs, d * d - 1)


def test_sampled_durations_within_half_period():
    pair = random_dense_pair(4, 0)
    dur = sample_durations(pair, 1000, np.random.default_rng(0))
    caps = np.pi / pair.op_norms
    assert np.all(dur[0::2] > 0) and np.all(dur[0::2] <= caps[0])
    assert np.all(dur[1::2] > 0) and np.all(dur[1::2] <= caps[1])
    assert np.all(sample_durations(pair, 10, np.random.default_rng(0), scale=0.1) <= 0.1)


@pytest.mark.parametrize("d", [2, 3])
def test_conjecture_I_small(d):
    report = verify_conjecture_I(d, 20, 0)
    assert report.passed and report.ranks == [d * d - 1] * 20
    assert report.min_gap >= 10 * report.rel_tol


def test_under_parameterized_flag():
    report = verify_conjecture_I(3, 5, 0, n_pairs=2)
    assert report.under_parameterized and not report.passed
    assert max(report.ranks) <= 4


def test_trial_seeds_are_deterministic_and_parallel_safe():
    serial = verify_conjecture_I(3, 4, 17)
    parallel = verify_conjecture_I(3, 4, 17, jobs=2)
    assert serial.ranks == parallel.ranks and serial.gaps == parallel.gaps
    assert verify_conjecture_I(3, 1, 19).gaps == serial.gaps[2:3]


def test_report_fields():
    out = verify_conjecture_I(2, 2, 0).to_dict()
    for key in ("dimension", "n_pairs", "trials", "ranks", "gaps", "min_gap", "passed"):
        assert key in out


@pytest.mark.parametrize("homogeneous", [False, True])
def test_conjecture_II_three_qubits(homogeneous):
    report = verify_conjecture_II(3, 3, 0, homogeneous)
    assert report.passed and report.dimension == 8


def test_frame_gap_zero_when_deficient():
    pair = random_dense_pair(3, 0)
    assert frame_gap(build_frame(PulseSequence.alternating(pair, [0.1, 0.2]))) == 0.0
