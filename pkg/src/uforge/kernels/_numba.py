"""Loop kernels compiled with numba.

Same signatures and results as ``_numpy``; see that module for the math.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def expm_stack(vecs, vals, gen_ids, durations, sign):
    n = gen_ids.shape[0]
    d = vecs.shape[1]
    out = np.empty((n, d, d), dtype=np.complex128)
    for k in range(n):
        g = gen_ids[k]
        V = vecs[g]
        ph = np.exp(1j * sign * vals[g] * durations[k])
        for i in range(d):
            for j in range(d):
                acc = 0j
                for m in range(d):
                    acc += V[i, m] * ph[m] * np.conj(V[j, m])
                out[k, i, j] = acc
    return out


@njit(cache=True)
def prefix_products(F):
    n = F.shape[0]
    d = F.shape[1]
    P = np.empty_like(F)
    acc = np.eye(d, dtype=np.complex128)
    for k in range(n):
        acc = np.dot(F[k], acc)
        P[k] = acc
    return P


@njit(cache=True)
def suffix_products(F):
    n = F.shape[0]
    d = F.shape[1]
    S = np.empty_like(F)
    acc = np.eye(d, dtype=np.complex128)
    for k in range(n - 1, -1, -1):
        S[k] = acc
        acc = np.dot(acc, F[k])
    return S


@njit(cache=True)
def conjugate_stack(P, mats, gen_ids):
    n = P.shape[0]
    out = np.empty_like(P)
    for k in range(n):
        Pk = P[k]
        G = -1j * mats[gen_ids[k]]
        out[k] = np.dot(np.conj(Pk.T), np.dot(G, Pk))
    return out


@njit(cache=True)
def overlap_derivatives(P, S, mats, gen_ids, X):
    n = P.shape[0]
    d = P.shape[1]
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        M = np.dot(np.dot(P[k], X), S[k])
        G = mats[gen_ids[k]]
        acc = 0j
        for i in range(d):
            for j in range(d):
                acc += G[i, j] * M[j, i]
        out[k] = -1j * acc
    return out


@njit(cache=True)
def su_coords(Xs):
    n = Xs.shape[0]
    d = Xs.shape[1]
    npair = d * (d - 1) // 2
    out = np.empty((n, d * d - 1), dtype=np.float64)
    root2 = np.sqrt(2.0)
    for k in range(n):
        p = 0
        for i in range(d):
            for j in range(i + 1, d):
                h = -1j * Xs[k, i, j]
                out[k, p] = root2 * h.real
                out[k, npair + p] = -root2 * h.imag
                p += 1
        csum = 0.0
        for l in range(1, d):
            csum += (-1j * Xs[k, l - 1, l - 1]).real
            hll = (-1j * Xs[k, l, l]).real
            out[k, 2 * npair + l - 1] = (csum - l * hll) / np.sqrt(l * (l + 1.0))
    return out
