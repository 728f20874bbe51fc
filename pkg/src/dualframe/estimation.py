"""Optimal processing of POVM outcomes for estimating ensemble averages.

The outcome weights pi_i = Tr[rho_E P_i] set the cost sum_i pi_i |f_i|^2 of
a coefficient vector.  Among all duals of the POVM frame, the one
minimizing that cost for every X at once is built from the canonical dual
and the projector M_ij = <Delta_i|P_j> onto the row space of Lambda.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionError, InvalidDual, MissingGamma, SingularFrame, ZeroWeightOutcome
from .frames import DualFrame, canonical_coordinates, dual_residual, expansion_coefficients, inverse_positive
from .hs import (
    Ensemble,
    OperatorSpan,
    Povm,
    born_probabilities,
    hs_norm,
    require_in_span,
    span_basis,
    span_of_columns,
)
from .tolerances import DEFAULT, Tolerances

WEIGHTS_DEFINITION = "pi_i = Tr[rho_E P_i]"


@dataclass(frozen=True, eq=False)
class OutcomeWeights:
    values: np.ndarray
    zero_mask: np.ndarray
    source_ensemble: Ensemble | None = None

    @property
    def zero_indices(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.zero_mask)]


@dataclass(frozen=True, eq=False)
class CoefficientMap:
    lambda_matrix: np.ndarray
    dim: int
    gamma_matrix: np.ndarray | None = None
    m_matrix: np.ndarray | None = None

    def require_gamma(self) -> np.ndarray:
        if self.gamma_matrix is None:
            raise MissingGamma()
        return self.gamma_matrix


@dataclass(frozen=True, eq=False)
class NoiseReport:
    delta: float
    second_moment_term: float
    ensemble_square_term: float
    dual_kind: str
    target: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "second_moment_term": self.second_moment_term,
            "ensemble_square_term": self.ensemble_square_term,
            "dual_kind": self.dual_kind,
            "diagnostics": dict(self.diagnostics),
        }


def outcome_weights(povm: Povm, ensemble: Ensemble, tol: Tolerances = DEFAULT) -> OutcomeWeights:
    if ensemble.dim != povm.dim:
        raise DimensionError(f"ensemble is {ensemble.dim}-dimensional, POVM is {povm.dim}-dimensional")
    pi = born_probabilities(povm, ensemble.average_state, tol)
    pi.setflags(write=False)
    return OutcomeWeights(pi, pi <= tol.weight, ensemble)


def ensemble_square_term(ensemble: Ensemble, x) -> float:
    """sum_k p_k |Tr[rho_k X]|^2."""
    means = np.einsum("kij,ji->k", ensemble.states, np.asarray(x))
    return float(np.dot(ensemble.weights, np.abs(means) ** 2))


def build_lambda(povm: Povm) -> CoefficientMap:
    lam = np.array(povm.lambda_matrix())
    lam.setflags(write=False)
    return CoefficientMap(lam, povm.dim)


def gamma_from_dual(cmap: CoefficientMap, dual: DualFrame, span: OperatorSpan | None = None,
                    tol: Tolerances = DEFAULT) -> CoefficientMap:
    """Attach the generalized inverse whose rows are conj(vec(D_i))."""
    if span is None:
        span = span_of_columns(cmap.lambda_matrix, cmap.dim, tol)
    residual = dual_residual(cmap.lambda_matrix, dual, span)
    if residual > tol.dual:
        raise InvalidDual(residual)
    gamma = dual.gamma_matrix()
    m = gamma @ cmap.lambda_matrix if dual.kind == "canonical" else cmap.m_matrix
    return replace(cmap, gamma_matrix=gamma, m_matrix=m)


def check_min_norm_condition(cmap: CoefficientMap, weights: OutcomeWeights) -> float:
    """Spectral norm of the anti-Hermitian part of pi Gamma Lambda.

    A generalized inverse minimizes the pi-weighted norm exactly when
    pi Gamma Lambda is Hermitian.
    """
    gamma = cmap.require_gamma()
    a = weights.values[:, None] * (gamma @ cmap.lambda_matrix)
    return float(np.linalg.norm(a - a.conj().T, 2))


def hermitian_pinv(a: np.ndarray, rel_cutoff: float, scale: float | None = None) -> np.ndarray:
    """Moore-Penrose inverse of a Hermitian matrix via eigendecomposition.

    Eigenvalues with magnitude at or below ``rel_cutoff * scale`` are treated
    as zero; ``scale`` defaults to the largest eigenvalue magnitude.
    """
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    if scale is None:
        scale = np.max(np.abs(w)) if w.size else 0.0
    keep = np.abs(w) > rel_cutoff * scale
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    return (v * inv) @ v.conj().T


def live_outcomes(povm: Povm, weights: OutcomeWeights, span: OperatorSpan,
                  allow_zero: bool = False, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Mask of outcomes with positive weight.

    Zero-weight outcomes whose element does not vanish are an error unless
    ``allow_zero``; the remaining outcomes must then still span S.
    """
    live = ~weights.zero_mask
    dead = [i for i in np.flatnonzero(~live) if hs_norm(povm.elements[i]) > tol.herm]
    if dead and not allow_zero:
        raise ZeroWeightOutcome(dead)
    if dead:
        coords = span.coordinates(povm.elements[live])
        sv = np.linalg.svd(coords, compute_uv=False)
        rank = int(np.sum(sv > tol.rank_cutoff * sv[0])) if sv.size else 0
        if rank < span.rank:
            raise ZeroWeightOutcome(
                dead, f"outcomes {dead} never fire and the rest do not span the POVM span")
    return live


def optimal_dual(povm: Povm, ensemble: Ensemble, span: OperatorSpan | None = None,
                 allow_zero: bool = False,
                 tol: Tolerances = DEFAULT) -> tuple[DualFrame, CoefficientMap]:
    """Dual frame minimizing sum_i pi_i |f_i[X]|^2 for every X in the span.

    D_i = Delta_i - sum_j conj(K_ij) Delta_j with
    K = [(I - M) pi (I - M)]^+ pi, where Delta is the canonical dual, M the
    projector M_ij = <Delta_i|P_j> and ^+ the Moore-Penrose inverse.
    Zero-weight outcomes (only with ``allow_zero``) get D_i = 0 and the
    construction runs on the remaining outcomes.
    """
    if span is None:
        span = span_basis(povm, tol)
    weights = outcome_weights(povm, ensemble, tol)
    live = live_outcomes(povm, weights, span, allow_zero, tol)

    coords = span.coordinates(povm.elements[live])
    _, _, canon = canonical_coordinates(coords, tol)
    m = canon.conj().T @ coords
    pi = np.diag(weights.values[live])
    comp = np.eye(m.shape[0]) - m
    # ||I - M|| <= 1, so max(pi) bounds the spectrum; when the dual is unique
    # the matrix is pure rounding noise and must map to zero
    k = hermitian_pinv(comp @ pi @ comp, tol.rank_cutoff, scale=float(pi.max())) @ pi
    opt = canon - canon @ k.conj().T

    n = povm.n_outcomes
    dual_coords = np.zeros((span.rank, n), dtype=complex)
    dual_coords[:, live] = opt
    m_full = np.zeros((n, n), dtype=complex)
    m_full[np.ix_(live, live)] = m

    ops = span.to_operators(dual_coords)
    ops.setflags(write=False)
    dual = DualFrame(ops, "optimal")
    cmap = replace(build_lambda(povm), m_matrix=m_full)
    return dual, gamma_from_dual(cmap, dual, span, tol)


def moment_matrix(povm: Povm, weights: OutcomeWeights, span: OperatorSpan,
                  live: np.ndarray, tol: Tolerances = DEFAULT) -> np.ndarray:
    """(Lambda pi^-1 Lambda^dag)^-1 restricted to S, in span coordinates."""
    coords = span.coordinates(povm.elements[live])
    g = (coords / weights.values[live]) @ coords.conj().T
    inv, _ = inverse_positive(g, tol)
    return inv


def verify_identity_eq15(cmap: CoefficientMap, span: OperatorSpan, weights: OutcomeWeights,
                         tol: Tolerances = DEFAULT) -> float:
    """Check sum_i |D_i><P_i| = I_S and Gamma^dag pi Gamma = (Lambda pi^-1 Lambda^dag)^-1 on S.

    Returns the larger of the two residuals.  The second identity only
    holds for the optimal dual.
    """
    gamma = cmap.require_gamma()
    lam = cmap.lambda_matrix
    u = span.isometry
    gamma_h = gamma.conj().T
    r1 = np.linalg.norm(gamma_h @ lam.conj().T @ u - u, 2)

    live = ~weights.zero_mask
    coords = u.conj().T @ lam[:, live]
    g = (coords / weights.values[live]) @ coords.conj().T
    target, _ = inverse_positive(g, tol)
    lhs = (gamma_h * weights.values) @ gamma @ u
    r2 = np.linalg.norm(lhs - u @ target, 2)
    return float(max(r1, r2))


def noise(povm: Povm, dual: DualFrame, ensemble: Ensemble, x,
          span: OperatorSpan | None = None, tol: Tolerances = DEFAULT) -> NoiseReport:
    """Ensemble-averaged statistical error of estimating <X> with ``dual``.

    delta = sum_i pi_i |f_i[X]|^2 - sum_k p_k |Tr[rho_k X]|^2
    """
    if span is None:
        span = span_basis(povm, tol)
    x = require_in_span(span, x, tol)
    cmap = gamma_from_dual(build_lambda(povm), dual, span, tol)
    weights = outcome_weights(povm, ensemble, tol)
    f = expansion_coefficients(dual, x).values
    term1 = float(np.dot(weights.values, np.abs(f) ** 2))
    term2 = ensemble_square_term(ensemble, x)
    try:
        eq15 = verify_identity_eq15(cmap, span, weights, tol)
    except SingularFrame:  # zero weights leave S uncovered
        eq15 = float("nan")
    diagnostics = {
        "eq12_residual": check_min_norm_condition(cmap, weights),
        "eq15_residual": eq15,
        "span_rank": span.rank,
        "zero_weight_indices": weights.zero_indices,
        "weights_definition": WEIGHTS_DEFINITION,
    }
    return NoiseReport(term1 - term2, term1, term2, dual.kind, x, diagnostics)


def min_noise(povm: Povm, ensemble: Ensemble, x, span: OperatorSpan | None = None,
              allow_zero: bool = False, tol: Tolerances = DEFAULT) -> tuple[float, np.ndarray]:
    """Minimum error over all duals, from the POVM and ensemble alone.

    delta = <X|(Lambda pi^-1 Lambda^dag)^-1|X> - sum_k p_k |Tr[rho_k X]|^2
    """
    if span is None:
        span = span_basis(povm, tol)
    x = require_in_span(span, x, tol)
    weights = outcome_weights(povm, ensemble, tol)
    live = live_outcomes(povm, weights, span, allow_zero, tol)
    moments = moment_matrix(povm, weights, span, live, tol)
    xc = span.isometry.conj().T @ x.reshape(-1)
    first = float(np.real(np.vdot(xc, moments @ xc)))
    return first - ensemble_square_term(ensemble, x), moments
