"""Dense complex linear algebra on su(d).

Matrices are plain ``numpy`` arrays throughout. The validators below
enforce the invariants of Hermitian, unitary and su(d) operands and raise
:class:`InvalidOperandError` on violation.
"""
import numpy as np
import scipy.linalg

from . import kernels

HERMITIAN_ATOL = 1e-12
UNITARY_RTOL = 1e-10
DEFAULT_RANK_TOL = 1e-8


class InvalidOperandError(ValueError):
    """An operand violates the contract of the operation it was passed to."""


class BranchCutError(ArithmeticError):
    """The principal matrix logarithm is undefined (eigenvalue near -1)."""


def _square(M, name="matrix"):
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise InvalidOperandError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    return M


def _scale(M):
    return max(1.0, float(np.max(np.abs(M))))


def is_hermitian(H, atol=HERMITIAN_ATOL):
    H = np.asarray(H)
    return H.ndim == 2 and H.shape[0] == H.shape[1] and bool(
        np.max(np.abs(H - H.conj().T), initial=0.0) <= atol * _scale(H)
    )


def validate_hermitian(H, traceless=False, norm_one=False, atol=HERMITIAN_ATOL):
    """Return ``H`` as a complex array after checking the requested invariants."""
    H = _square(H, "Hermitian operator")
    d = H.shape[0]
    if not is_hermitian(H, atol):
        raise InvalidOperandError("operator is not Hermitian")
    if traceless and abs(np.trace(H)) > atol * d * _scale(H):
        raise InvalidOperandError(f"operator is not traceless (trace={np.trace(H):.3e})")
    if norm_one and abs(trace_norm(H) - 1.0) > 1e-10:
        raise InvalidOperandError(f"operator trace norm is {trace_norm(H):.15g}, expected 1")
    return H


def validate_unitary(U, rtol=UNITARY_RTOL):
    U = _square(U, "unitary operator")
    d = U.shape[0]
    if np.linalg.norm(U.conj().T @ U - np.eye(d)) > rtol * d:
        raise InvalidOperandError("operator is not unitary")
    return U


def is_special_unitary(U, rtol=UNITARY_RTOL):
    U = np.asarray(U)
    d = U.shape[0]
    return bool(
        np.linalg.norm(U.conj().T @ U - np.eye(d)) <= rtol * d
        and abs(abs(np.linalg.det(U)) - 1.0) <= rtol
    )


def trace_norm(H):
    """Schatten-1 norm: the sum of singular values."""
    return float(np.sum(np.linalg.svd(np.asarray(H), compute_uv=False)))


def normalize_trace_norm(H):
    return np.asarray(H) / trace_norm(H)


def project_traceless(H):
    H = np.asarray(H, dtype=np.complex128)
    d = H.shape[0]
    return H - np.trace(H) / d * np.eye(d)


def commutator(X, Y):
    return X @ Y - Y @ X


def mat_exp(H, t):
    """``exp(-i H t)`` for Hermitian ``H`` via its eigendecomposition."""
    H = validate_hermitian(H)
    w, V = np.linalg.eigh(H)
    return kernels.expm_stack(V[None], w[None], np.zeros(1, dtype=np.int64), np.array([float(t)]))[0]


def gell_mann_basis(d):
    """Generalized Gell-Mann matrices normalized to ``Tr(l_j l_k) = delta_jk``.

    Ordered as symmetric pairs ``(j<k)`` row-major, then antisymmetric pairs
    in the same order, then the ``d-1`` diagonal matrices. This is the
    coordinate order used by :func:`su_vectorize`.
    """
    if d < 2:
        raise InvalidOperandError("su(d) needs d >= 2")
    basis = []
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    s = 1 / np.sqrt(2)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=np.complex128)
        m[j, k] = m[k, j] = s
        basis.append(m)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=np.complex128)
        m[j, k] = -1j * s
        m[k, j] = 1j * s
        basis.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        basis.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(np.complex128))
    return np.array(basis)


def _check_su(X, atol):
    X = _square(X, "su(d) element")
    scale = max(1.0, float(np.linalg.norm(X)))
    if np.max(np.abs(X + X.conj().T)) > atol * scale:
        raise InvalidOperandError("matrix is not anti-Hermitian")
    if abs(np.trace(X)) > atol * scale * X.shape[0]:
        raise InvalidOperandError(f"matrix is not traceless (trace={np.trace(X):.3e})")
    return X


def su_vectorize(X, atol=1e-10):
    """Real coordinates of an anti-Hermitian traceless ``X`` in the basis ``i*l_k``."""
    X = _check_su(X, atol)
    return kernels.su_coords(X[None])[0]


def su_vectorize_many(Xs, atol=1e-10):
    Xs = np.asarray(Xs, dtype=np.complex128)
    if Xs.ndim != 3:
        raise InvalidOperandError("expected a stack of square matrices")
    for X in Xs:
        _check_su(X, atol)
    return kernels.su_coords(Xs)


def su_devectorize(coords, d=None):
    coords = np.asarray(coords, dtype=np.float64)
    if d is None:
        d = int(round(np.sqrt(coords.size + 1)))
    if coords.shape != (d * d - 1,):
        raise InvalidOperandError(f"expected {d * d - 1} coordinates for su({d}), got {coords.shape}")
    return 1j * np.tensordot(coords, gell_mann_basis(d), axes=1)


def singular_values(vectors):
    M = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if M.size == 0:
        raise InvalidOperandError("numerical rank of an empty list")
    return np.linalg.svd(M, compute_uv=False)


def numerical_rank(vectors, rel_tol=DEFAULT_RANK_TOL):
    """Number of singular values above ``rel_tol`` times the largest one."""
    if len(vectors) == 0:
        raise InvalidOperandError("numerical rank of an empty list")
    s = singular_values(vectors)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def matrix_log_principal(U, branch_tol=1e-8):
    """Principal logarithm of a unitary, returned as an anti-Hermitian matrix."""
    U = validate_unitary(U)
    T, Z = scipy.linalg.schur(U, output="complex")
    lam = np.diag(T)
    if np.any(np.abs(lam + 1.0) <= branch_tol):
        raise BranchCutError("unitary has an eigenvalue at -1; principal log undefined")
    phases = np.angle(lam)
    return (Z * (1j * phases)) @ Z.conj().T
