"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--dims 2 4 8] [--pulses 64] [--repeat 20]

Also times one full gradient evaluation (the optimizer's inner loop). Both
backends are called directly, so the UFORGE_DISABLE_NUMBA flag is ignored.
"""
import argparse
import timeit

import numpy as np

from uforge.generators import random_dense_pair
from uforge.kernels import numba_impl, numpy_impl
from uforge.sequence import PulseSequence


def kernel_inputs(d, n, seed=0):
    pair = random_dense_pair(d, seed)
    rng = np.random.default_rng(seed)
    seq = PulseSequence.alternating(pair, rng.random(n))
    vals, vecs = pair.spectral
    ids = np.ascontiguousarray(seq.gen_ids, dtype=np.int64)
    dur = np.ascontiguousarray(seq.durations)
    F = numpy_impl.expm_stack(vecs, vals, ids, dur, -1.0)
    P = numpy_impl.prefix_products(F)
    S = numpy_impl.suffix_products(F)
    mats = np.ascontiguousarray(pair.mats)
    X = np.eye(d, dtype=np.complex128) / d
    Xs = numpy_impl.conjugate_stack(P, mats, ids)
    return {
        "expm_stack": (vecs, vals, ids, dur, -1.0),
        "prefix_products": (F,),
        "suffix_products": (F,),
        "conjugate_stack": (P, mats, ids),
        "overlap_derivatives": (P, S, mats, ids, X),
        "su_coords": (Xs,),
    }


def gradient_pass(impl, args):
    F = impl.expm_stack(*args["expm_stack"])
    P = impl.prefix_products(F)
    S = impl.suffix_products(F)
    _, mats, ids = args["conjugate_stack"]
    return impl.overlap_derivatives(P, S, mats, ids, args["overlap_derivatives"][-1])


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 4, 8])
    ap.add_argument("--pulses", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if numba_impl is None:
        raise SystemExit("numba backend unavailable (disabled or not installed)")

    print(f"{'kernel':<22}{'d':>4}{'numpy us':>12}{'numba us':>12}{'speedup':>10}")
    for d in args.dims:
        inputs = kernel_inputs(d, args.pulses)
        rows = [(name, lambda impl, n=name, a=a: getattr(impl, n)(*a)) for name, a in inputs.items()]
        rows.append(("gradient pass", lambda impl: gradient_pass(impl, inputs)))
        for name, call in rows:
            ref = call(numpy_impl)
            got = call(numba_impl)  # also triggers compilation
            if not np.allclose(ref, got, atol=1e-10):
                raise SystemExit(f"{name}: backends disagree at d={d}")
            t_np = best_of(lambda: call(numpy_impl), args.repeat) * 1e6
            t_nb = best_of(lambda: call(numba_impl), args.repeat) * 1e6
            print(f"{name:<22}{d:>4}{t_np:>12.1f}{t_nb:>12.1f}{t_np / t_nb:>9.2f}x")


if __name__ == "__main__":
    main()
