"""Operators on a finite-dimensional Hilbert space, viewed as vectors.

An operator ``A`` of shape ``(d, d)`` is identified with the ``d**2`` vector
``A.reshape(-1)`` (row-major).  With that convention the Hilbert-Schmidt
product ``Tr[A^dag B]`` is ``np.vdot(vec(A), vec(B))``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    IncompleteSum,
    InvalidEnsemble,
    InvalidPovm,
    InvalidState,
    NegativeProbability,
    NotHermitian,
    NotInSpan,
    NotPositive,
)
from .tolerances import DEFAULT, Tolerances

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def as_operator(a, dim: int | None = None) -> np.ndarray:
    """Coerce ``a`` to a square complex matrix with finite entries."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"operator must be square, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionError(f"expected a {dim}x{dim} operator, got {a.shape[0]}x{a.shape[1]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("operator has non-finite entries")
    return a


def vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).reshape(-1)


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim)


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt product ``Tr[a^dag b]``."""
    a = as_operator(a)
    b = as_operator(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return complex(np.vdot(a.reshape(-1), b.reshape(-1)))


def hs_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a).reshape(-1)))


def hermitian_deviation(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T)))


def _psd_violation(a: np.ndarray, tol: Tolerances) -> float | None:
    """Return the offending min eigenvalue, or None if ``a`` is PSD."""
    eigs = np.linalg.eigvalsh((a + a.conj().T) / 2)
    scale = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    if eigs[0] < -tol.psd * scale:
        return float(eigs[0])
    return None


def density_matrix(rho, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Validate a density matrix and return it as a read-only array."""
    rho = as_operator(rho)
    dev = hermitian_deviation(rho)
    if dev > tol.herm:
        raise InvalidState("not Hermitian", dev)
    min_eig = _psd_violation(rho, tol)
    if min_eig is not None:
        raise InvalidState("not positive semidefinite", min_eig)
    tr_dev = abs(np.trace(rho) - 1)
    if tr_dev > tol.trace:
        raise InvalidState("trace differs from one", tr_dev)
    return _frozen(rho)


@dataclass(frozen=True, eq=False)
class Povm:
    elements: np.ndarray  # shape (N, d, d)
    warnings: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.elements.shape[0]

    def lambda_matrix(self) -> np.ndarray:
        """The d**2 x N matrix whose i-th column is vec(P_i)."""
        return self.elements.reshape(self.n_outcomes, -1).T


def validate_povm(candidates, tol: Tolerances = DEFAULT) -> Povm:
    """Check positivity, Hermiticity and completeness of ``candidates``.

    Every violated condition is collected before raising
    :class:`InvalidPovm`.  Elements that vanish are accepted with a warning.
    """
    ops = [np.asarray(c, dtype=complex) for c in candidates]
    if not ops:
        raise DimensionError("a POVM needs at least one element")
    ops = [as_operator(ops[0])] + [as_operator(op) for op in ops[1:]]
    d = ops[0].shape[0]
    for op in ops:
        if op.shape != (d, d):
            raise DimensionError(f"mixed dimensions in POVM: {d} and {op.shape[0]}")

    violations = []
    notes = []
    for i, op in enumerate(ops):
        dev = hermitian_deviation(op)
        if dev > tol.herm:
            violations.append(NotHermitian(i, dev))
        min_eig = _psd_violation(op, tol)
        if min_eig is not None:
            violations.append(NotPositive(i, min_eig))
        if np.max(np.abs(op)) <= tol.herm:
            notes.append(f"element {i} is zero and never fires")
    dev = float(np.max(np.abs(sum(ops) - np.eye(d))))
    if dev > tol.complete:
        violations.append(IncompleteSum(dev))
    if violations:
        raise InvalidPovm(violations)
    for note in notes:
        warnings.warn(note, stacklevel=2)
    return Povm(_frozen(np.stack(ops)), tuple(notes))


def born_probabilities(povm: Povm, rho, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Outcome probabilities ``Tr[P_i rho]``; rounding noise is clamped away."""
    rho = as_operator(rho)
    if rho.shape[0] != povm.dim:
        raise DimensionError(f"state is {rho.shape[0]}-dimensional, POVM is {povm.dim}-dimensional")
    p = np.einsum("nij,ji->n", povm.elements, rho).real
    for i, v in enumerate(p):
        if v < -tol.psd:
            raise NegativeProbability(i, float(v))
    p = np.clip(p, 0.0, 1.0)
    return p / p.sum()


@dataclass(frozen=True, eq=False)
class OperatorSpan:
    """Orthonormal basis of Span{P_i} in Hilbert-Schmidt space."""

    dim: int
    basis: np.ndarray  # shape (s, d, d)
    singular_values: np.ndarray  # length N, zero-padded
    rank_cutoff: float

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    @property
    def isometry(self) -> np.ndarray:
        """d**2 x s matrix with orthonormal columns vec(B_a)."""
        return self.basis.reshape(self.rank, -1).T

    def coordinates(self, ops) -> np.ndarray:
        """Coordinates of the operators ``ops`` (N, d, d) as columns (s x N)."""
        ops = np.asarray(ops)
        return self.isometry.conj().T @ ops.reshape(ops.shape[0], -1).T

    def to_operators(self, coords: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`coordinates` for column vectors in S."""
        cols = self.isometry @ coords
        return cols.T.reshape(-1, self.dim, self.dim)


def span_of_columns(lam: np.ndarray, dim: int, tol: Tolerances = DEFAULT) -> OperatorSpan:
    u, s, _ = np.linalg.svd(lam, full_matrices=False)
    n = lam.shape[1]
    padded = np.zeros(n)
    padded[: s.size] = s
    cutoff = tol.rank_cutoff * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    basis = u[:, :rank].T.reshape(rank, dim, dim)
    return OperatorSpan(dim, _frozen(basis), padded, float(cutoff))


def span_basis(povm: Povm, tol: Tolerances = DEFAULT) -> OperatorSpan:
    return span_of_columns(povm.lambda_matrix(), povm.dim, tol)


def project_onto_span(span: OperatorSpan, x) -> tuple[np.ndarray, float]:
    x = as_operator(x, span.dim)
    u = span.isometry
    v = vec(x)
    v_s = u @ (u.conj().T @ v)
    return unvec(v_s, span.dim), float(np.linalg.norm(v - v_s))


def require_in_span(span: OperatorSpan, x, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Return ``x`` as an operator, raising NotInSpan if it leaves S."""
    x = as_operator(x, span.dim)
    _, residual = project_onto_span(span, x)
    if residual > tol.span * hs_norm(x):
        raise NotInSpan(residual)
    return x


def is_informationally_complete(span: OperatorSpan) -> bool:
    return span.rank == span.dim**2


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Weighted collection of density matrices."""

    states: np.ndarray  # shape (K, d, d)
    weights: np.ndarray  # shape (K,)
    average_state: np.ndarray = field(init=False)

    def __post_init__(self):
        avg = np.einsum("k,kij->ij", self.weights, self.states)
        object.__setattr__(self, "average_state", _frozen(avg))

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def __len__(self) -> int:
        return self.states.shape[0]


def make_ensemble(states, weights, tol: Tolerances = DEFAULT) -> Ensemble:
    states = [density_matrix(s, tol) for s in states]
    if not states:
        raise InvalidEnsemble("ensemble has no states")
    d = states[0].shape[0]
    if any(s.shape[0] != d for s in states):
        raise DimensionError("ensemble states have mixed dimensions")
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(states),):
        raise InvalidEnsemble(f"{len(states)} states but {w.size} weights")
    if np.any(w < 0):
        raise InvalidEnsemble("negative ensemble weight")
    if abs(w.sum() - 1) > tol.trace:
        raise InvalidEnsemble(f"weights sum to {w.sum()!r}")
    w = w.copy()
    w.setflags(write=False)
    return Ensemble(_frozen(np.stack(states)), w)
