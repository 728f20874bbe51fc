"""Reference measurements and random instances used by tests and examples."""

from __future__ import annotations

import numpy as np

from .hs import PAULI_X, PAULI_Y, PAULI_Z, Ensemble, Povm, make_ensemble, validate_povm

TETRAHEDRON = np.array([
    [1, 1, 1],
    [1, -1, -1],
    [-1, 1, -1],
    [-1, -1, 1],
]) / np.sqrt(3)


def bloch_operator(r) -> np.ndarray:
    """I + r . sigma for a 3-vector r."""
    return np.eye(2) + r[0] * PAULI_X + r[1] * PAULI_Y + r[2] * PAULI_Z


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def z_povm() -> Povm:
    return validate_povm([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])


def tetrahedron_povm() -> Povm:
    """Qubit SIC-POVM: P_i = (I + s_i . sigma) / 4."""
    return validate_povm([bloch_operator(s) / 4 for s in TETRAHEDRON])


def mub6_povm() -> Povm:
    """(I +/- sigma_k) / 6 for k = x, y, z, in the order x+, x-, y+, y-, z+, z-."""
    ops = []
    for sigma in (PAULI_X, PAULI_Y, PAULI_Z):
        ops.append((np.eye(2) + sigma) / 6)
        ops.append((np.eye(2) - sigma) / 6)
    return validate_povm(ops)


def random_povm(rng: np.random.Generator, dim: int, n_outcomes: int) -> Povm:
    """Rescale random positive operators A_i to S^-1/2 A_i S^-1/2 with S = sum A_i."""
    g = rng.normal(size=(n_outcomes, dim, dim)) + 1j * rng.normal(size=(n_outcomes, dim, dim))
    a = g @ g.conj().transpose(0, 2, 1)
    w, v = np.linalg.eigh(a.sum(axis=0))
    s_inv_half = (v / np.sqrt(w)) @ v.conj().T
    ops = s_inv_half @ a @ s_inv_half
    ops = (ops + ops.conj().transpose(0, 2, 1)) / 2
    return validate_povm(list(ops))


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_ensemble(rng: np.random.Generator, dim: int, n_states: int = 3) -> Ensemble:
    w = rng.dirichlet(np.ones(n_states))
    return make_ensemble([random_density(rng, dim) for _ in range(n_states)], w)


def random_in_span(rng: np.random.Generator, povm: Povm) -> np.ndarray:
    c = rng.normal(size=povm.n_outcomes) + 1j * rng.normal(size=povm.n_outcomes)
    return np.einsum("n,nij->ij", c, povm.elements)


def maximally_mixed(dim: int) -> Ensemble:
    return make_ensemble([np.eye(dim) / dim], [1.0])


def skewed_ensemble() -> Ensemble:
    """{(|0><0|, 3/4), (|1><1|, 1/4)}, average state diag(3/4, 1/4)."""
    return make_ensemble([pure_state([1, 0]), pure_state([0, 1])], [0.75, 0.25])


def plus_ensemble() -> Ensemble:
    return make_ensemble([pure_state([1, 1])], [1.0])
