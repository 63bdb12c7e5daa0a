"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``UFORGE_DISABLE_NUMBA`` is unset (or ``0``). Set it to ``1`` to
force the numpy implementations, e.g. for debugging or on platforms
without an LLVM toolchain.

All kernels operate on stacks of dense ``complex128`` matrices:

``expm_stack(vecs, vals, gen_ids, durations, sign)``
    ``out[k] = V_g diag(exp(i*sign*lam_g*t_k)) V_g^dagger`` with ``g = gen_ids[k]``.
``prefix_products(F)``
    ``P[k] = F[k] @ ... @ F[0]``.
``suffix_products(F)``
    ``S[k] = F[n-1] @ ... @ F[k+1]`` (identity for the last slot).
``conjugate_stack(P, mats, gen_ids)``
    ``P[k]^dagger (-i G_k) P[k]``.
``overlap_derivatives(P, S, mats, gen_ids, X)``
    ``Tr(S[k] (-i G_k) P[k] X)``.
``su_coords(Xs)``
    generalized Gell-Mann coordinates of anti-Hermitian traceless matrices.
"""
import os

import numpy as np

from . import _numpy as numpy_impl

_disabled = os.environ.get("UFORGE_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

numba_impl = None
if not _disabled:
    try:
        from . import _numba as numba_impl
    except ImportError:  # pragma: no cover - depends on the install
        numba_impl = None

_impl = numba_impl if numba_impl is not None else numpy_impl
BACKEND = "numba" if numba_impl is not None else "numpy"


def _c(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def expm_stack(vecs, vals, gen_ids, durations, sign=-1.0):
    return _impl.expm_stack(
        _c(vecs),
        np.ascontiguousarray(vals, dtype=np.float64),
        np.ascontiguousarray(gen_ids, dtype=np.int64),
        np.ascontiguousarray(durations, dtype=np.float64),
        float(sign),
    )


def prefix_products(F):
    return _impl.prefix_products(_c(F))


def suffix_products(F):
    return _impl.suffix_products(_c(F))


def conjugate_stack(P, mats, gen_ids):
    return _impl.conjugate_stack(_c(P), _c(mats), np.ascontiguousarray(gen_ids, dtype=np.int64))


def overlap_derivatives(P, S, mats, gen_ids, X):
    return _impl.overlap_derivatives(
        _c(P), _c(S), _c(mats), np.ascontiguousarray(gen_ids, dtype=np.int64), _c(X)
    )


def su_coords(Xs):
    return _impl.su_coords(_c(Xs))
