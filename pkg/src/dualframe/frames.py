"""POVM elements as a frame for their span, and the duals of that frame.

All linear algebra happens in the coordinates of an orthonormal basis of
S = Span{P_i}; the frame operator is singular on the complement of S.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CountMismatch, DimensionError, SingularFrame
from .hs import OperatorSpan, Povm, as_operator, hs_norm, project_onto_span, span_basis
from .tolerances import DEFAULT, Tolerances

KINDS = ("canonical", "alternate", "optimal")


@dataclass(frozen=True, eq=False)
class DualFrame:
    elements: np.ndarray  # shape (N, d, d)
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown dual kind {self.kind!r}")

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.elements.shape[0]

    def gamma_matrix(self) -> np.ndarray:
        """N x d**2 matrix with rows conj(vec(D_i)), so that Gamma @ vec(X) = f[X]."""
        return self.elements.reshape(self.n_outcomes, -1).conj()


@dataclass(frozen=True, eq=False)
class FrameAnalysis:
    span: OperatorSpan
    frame_matrix: np.ndarray
    lower_bound: float
    upper_bound: float
    canonical_dual: DualFrame


@dataclass(frozen=True, eq=False)
class Coefficients:
    values: np.ndarray
    target: np.ndarray
    dual_kind: str


def _dual(ops: np.ndarray, kind: str) -> DualFrame:
    ops = np.array(ops, dtype=complex)
    ops.setflags(write=False)
    return DualFrame(ops, kind)


def inverse_positive(mat: np.ndarray, tol: Tolerances = DEFAULT) -> tuple[np.ndarray, np.ndarray]:
    """Invert a Hermitian positive definite matrix by eigendecomposition.

    Returns the inverse and the eigenvalues.  Raises SingularFrame when the
    smallest eigenvalue falls below the relative rank cutoff.
    """
    w, v = np.linalg.eigh((mat + mat.conj().T) / 2)
    if w[0] <= tol.rank_cutoff * max(w[-1], 0.0):
        raise SingularFrame(float(w[0]))
    return (v / w) @ v.conj().T, w


def canonical_coordinates(frame_coords: np.ndarray, tol: Tolerances = DEFAULT):
    """Frame operator F = V V^dag, its eigenvalues, and F^-1 V."""
    frame = frame_coords @ frame_coords.conj().T
    f_inv, w = inverse_positive(frame, tol)
    return frame, w, f_inv @ frame_coords


def analyze_frame(povm: Povm, span: OperatorSpan | None = None,
                  tol: Tolerances = DEFAULT) -> FrameAnalysis:
    if span is None:
        span = span_basis(povm, tol)
    if span.dim != povm.dim:
        raise DimensionError("span and POVM dimensions differ")
    coords = span.coordinates(povm.elements)
    frame, w, dual_coords = canonical_coordinates(coords, tol)
    canonical = _dual(span.to_operators(dual_coords), "canonical")
    frame = (frame + frame.conj().T) / 2
    frame.setflags(write=False)
    return FrameAnalysis(span, frame, float(w[0]), float(w[-1]), canonical)


def _flat(ops: np.ndarray) -> np.ndarray:
    return ops.reshape(ops.shape[0], -1).T


def alternate_dual(povm: Povm, analysis: FrameAnalysis, perturbations,
                   base: DualFrame | None = None) -> DualFrame:
    """Build eta_n = chi_n + delta_n - sum_m delta_m <P_m|chi_n>.

    ``chi`` is the canonical dual unless ``base`` supplies another dual; the
    result reproduces every operator of the span either way.  Components of
    the perturbations outside the span are kept.
    """
    deltas = [as_operator(p) for p in perturbations]
    if len(deltas) != povm.n_outcomes:
        raise CountMismatch(povm.n_outcomes, len(deltas))
    if any(p.shape[0] != povm.dim for p in deltas):
        raise DimensionError("perturbation dimension differs from POVM")
    chi = (base or analysis.canonical_dual).elements
    lam = povm.lambda_matrix()
    chi_cols = _flat(chi)
    delta_cols = _flat(np.stack(deltas))
    overlaps = lam.conj().T @ chi_cols  # <P_m|chi_n>
    eta = chi_cols + delta_cols - delta_cols @ overlaps
    return _dual(eta.T.reshape(-1, povm.dim, povm.dim), "alternate")


def dual_residual(lam: np.ndarray, dual: DualFrame, span: OperatorSpan) -> float:
    """Operator norm of (sum_i |P_i><D_i| - I) compressed to S."""
    u = span.isometry
    recon = u.conj().T @ lam @ dual.gamma_matrix() @ u
    return float(np.linalg.norm(recon - np.eye(span.rank), 2))


def verify_dual(povm: Povm, dual: DualFrame, span: OperatorSpan) -> float:
    """Residual of the dual-frame identity on S; small means ``dual`` is a dual.

    The expansion X = sum_i <D_i|X> P_i holds for all X in S exactly when
    sum_i |P_i><D_i| restricts to the identity on S.  That map is the adjoint
    of sum_i |D_i><P_i|, so both share this residual.
    """
    if dual.n_outcomes != povm.n_outcomes:
        raise CountMismatch(povm.n_outcomes, dual.n_outcomes)
    if dual.dim != povm.dim or span.dim != povm.dim:
        raise DimensionError("dual, POVM and span dimensions differ")
    return dual_residual(povm.lambda_matrix(), dual, span)


def expansion_coefficients(dual: DualFrame, x, span: OperatorSpan | None = None,
                           tol: Tolerances = DEFAULT) -> Coefficients:
    """f_i[X] = Tr[D_i^dag X].

    With ``span`` given, an X outside the span triggers a warning; the
    coefficients then only rebuild its projection.
    """
    x = as_operator(x)
    if x.shape[0] != dual.dim:
        raise DimensionError(f"operator is {x.shape[0]}-dimensional, dual is {dual.dim}-dimensional")
    if span is not None:
        _, residual = project_onto_span(span, x)
        if residual > tol.span * hs_norm(x):
            warnings.warn(f"operator lies outside the POVM span (residual {residual:.3e})", stacklevel=2)
    values = dual.gamma_matrix() @ x.reshape(-1)
    return Coefficients(values, x, dual.kind)


def reconstruct(povm: Povm, coefficients) -> np.ndarray:
    """sum_i c_i P_i."""
    c = getattr(coefficients, "values", coefficients)
    return np.einsum("n,nij->ij", np.asarray(c), povm.elements)
