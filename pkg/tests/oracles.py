"""Reference computations written independently of the library code."""
import itertools
import math

import numpy as np

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def multi_index(flat, dims):
    idx = []
    for d in reversed(dims):
        idx.append(flat % d)
        flat //= d
    return tuple(reversed(idx))


def flat_index(idx, dims):
    f = 0
    for i, d in zip(idx, dims):
        f = f * d + i
    return f


def partial_transpose_loops(m, dims, j):
    """Transpose factor ``j`` (1-based) entry by entry."""
    D = int(np.prod(dims))
    out = np.zeros((D, D), dtype=complex)
    for r in range(D):
        for c in range(D):
            ri, ci = list(multi_index(r, dims)), list(multi_index(c, dims))
            ri[j - 1], ci[j - 1] = ci[j - 1], ri[j - 1]
            out[flat_index(ri, dims), flat_index(ci, dims)] = m[r, c]
    return out


def partial_trace_loops(m, dims, keep):
    """Reduced matrix of factor ``keep`` (1-based)."""
    k = keep - 1
    d = dims[k]
    out = np.zeros((d, d), dtype=complex)
    others = [range(x) for i, x in enumerate(dims) if i != k]
    for a in range(d):
        for b in range(d):
            for rest in itertools.product(*others):
                ri = list(rest)
                ri.insert(k, a)
                ci = list(rest)
                ci.insert(k, b)
                out[a, b] += m[flat_index(ri, dims), flat_index(ci, dims)]
    return out


def min_pt_eigenvalue(m, dims):
    pt = partial_transpose_loops(np.asarray(m), dims, 2)
    return float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])


def bell_vector():
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / math.sqrt(2)
    return v


def maximally_entangled(d1, d2):
    v = np.zeros(d1 * d2, dtype=complex)
    d = min(d1, d2)
    for i in range(d):
        v[i * d2 + i] = 1 / math.sqrt(d)
    return v


def werner_matrix(t):
    v = bell_vector()
    return t * np.outer(v, v.conj()) + (1 - t) * np.eye(4) / 4


def pure_qubit_pair_modulus(psi):
    """``1/(1 + 4|det Psi|)`` with ``Psi`` the 2x2 coefficient matrix."""
    return 1.0 / (1.0 + 4.0 * abs(np.linalg.det(np.asarray(psi).reshape(2, 2))))


def heisenberg_matrix():
    return sum(np.kron(a, a) for a in (SX, SY, SZ))


def bloch_vector(theta, phi):
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def product_energy_grid(h, n=40):
    """Min and max of ``<a x b|h|a x b>`` over an ``n^4`` Bloch-angle grid."""
    th = np.linspace(0, math.pi, n)
    ph = np.linspace(0, 2 * math.pi, n, endpoint=False)
    T, P = np.meshgrid(th, ph, indexing="ij")
    vs = np.stack([np.cos(T / 2), np.exp(1j * P) * np.sin(T / 2)], axis=-1).reshape(-1, 2)
    prod = np.einsum("ai,bj->abij", vs, vs).reshape(len(vs), len(vs), 4)
    e = np.einsum("abi,ij,abj->ab", prod.conj(), h, prod).real
    return float(e.min()), float(e.max())
