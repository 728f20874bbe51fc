"""Reference computations that share no code path with the library.

Everything here works in the full d**2 operator space with plain loops,
traces and least-squares solves; no span basis, frame operator
eigendecomposition or pseudo-inverse of (I-M) pi (I-M) is used.
"""

import numpy as np


def lam(elements):
    return np.array([np.asarray(p).reshape(-1) for p in elements]).T


def kkt_coefficients(elements, pi, x):
    """argmin sum_i pi_i |f_i|^2 subject to sum_i f_i P_i = X.

    Solves [[pi, -L^dag], [L, 0]] [f; mu] = [0; vec X].  The constraint rows
    may be redundant, so the system is solved in the least-squares sense;
    f is still unique because pi > 0.
    """
    L = lam(elements)
    n, m = L.shape[1], L.shape[0]
    kkt = np.zeros((n + m, n + m), dtype=complex)
    kkt[:n, :n] = np.diag(pi)
    kkt[:n, n:] = -L.conj().T
    kkt[n:, :n] = L
    rhs = np.concatenate([np.zeros(n), np.asarray(x).reshape(-1)])
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    assert np.allclose(kkt @ sol, rhs, atol=1e-9), "constraint not satisfiable"
    return sol[:n]


def canonical_dual_direct(elements):
    """chi_n = F^-1 P_n by a least-squares solve of F chi = P in d**2 space."""
    L = lam(elements)
    F = L @ L.conj().T
    d = int(round(np.sqrt(L.shape[0])))
    chi = np.linalg.lstsq(F, L, rcond=1e-12)[0]
    return [chi[:, i].reshape(d, d) for i in range(L.shape[1])]


def direct_noise(elements, dual, states, weights, x):
    """Ensemble-averaged error written out term by term."""
    rho_e = sum(w * r for w, r in zip(weights, states))
    term1 = 0.0
    for p, dl in zip(elements, dual):
        f = np.trace(np.asarray(dl).conj().T @ x)
        term1 += np.trace(rho_e @ p).real * abs(f) ** 2
    term2 = sum(w * abs(np.trace(r @ x)) ** 2 for w, r in zip(weights, states))
    return term1 - term2


def direct_min_noise(elements, states, weights, x):
    rho_e = sum(w * r for w, r in zip(weights, states))
    pi = np.array([np.trace(rho_e @ p).real for p in elements])
    f = kkt_coefficients(elements, pi, x)
    term2 = sum(w * abs(np.trace(r @ x)) ** 2 for w, r in zip(weights, states))
    return float(pi @ np.abs(f) ** 2 - term2)
