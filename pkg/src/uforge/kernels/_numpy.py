"""Vectorized numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_numba``.
"""
import numpy as np


def expm_stack(vecs, vals, gen_ids, durations, sign):
    V = vecs[gen_ids]
    phases = np.exp(1j * sign * vals[gen_ids] * durations[:, None])
    return (V * phases[:, None, :]) @ np.conj(np.swapaxes(V, 1, 2))


def prefix_products(F):
    n, d = F.shape[0], F.shape[1]
    P = np.empty_like(F)
    acc = np.eye(d, dtype=np.complex128)
    for k in range(n):
        acc = F[k] @ acc
        P[k] = acc
    return P


def suffix_products(F):
    n, d = F.shape[0], F.shape[1]
    S = np.empty_like(F)
    acc = np.eye(d, dtype=np.complex128)
    for k in range(n - 1, -1, -1):
        S[k] = acc
        acc = acc @ F[k]
    return S


def conjugate_stack(P, mats, gen_ids):
    G = -1j * mats[gen_ids]
    return np.conj(np.swapaxes(P, 1, 2)) @ G @ P


def overlap_derivatives(P, S, mats, gen_ids, X):
    # Tr(S_k (-iG_k) P_k X) = sum_ij (-iG_k)_ij (P_k X S_k)_ji
    M = P @ X @ S
    G = -1j * mats[gen_ids]
    return np.einsum("kij,kji->k", G, M)


def su_coords(Xs):
    n, d = Xs.shape[0], Xs.shape[1]
    H = -1j * Xs
    iu, ju = np.triu_indices(d, 1)
    off = H[:, iu, ju]
    diag = np.real(np.diagonal(H, axis1=1, axis2=2))
    ls = np.arange(1, d)
    csum = np.cumsum(diag, axis=1)[:, :-1]
    dcoords = (csum - ls * diag[:, 1:]) / np.sqrt(ls * (ls + 1.0))
    root2 = np.sqrt(2.0)
    return np.concatenate([root2 * off.real, -root2 * off.imag, dcoords], axis=1)
