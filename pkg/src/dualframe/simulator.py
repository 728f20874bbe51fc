"""Monte Carlo check of the noise formulas.

Random streams come from numpy's Philox counter-based generator keyed by a
SeedSequence built from ``(seed, replica)``; the same inputs give the same
counts on every platform numpy supports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDual
from .estimation import noise, outcome_weights
from .frames import DualFrame, expansion_coefficients, verify_dual
from .hs import Ensemble, OperatorSpan, Povm, born_probabilities, require_in_span, span_basis
from .tolerances import DEFAULT, Tolerances

MODES = ("per_state", "pooled")


def generator(*key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(k) for k in key])))


@dataclass(frozen=True, eq=False)
class OutcomeCounts:
    counts: np.ndarray
    shots: int
    seed: int
    state_label: str

    def frequencies(self) -> np.ndarray:
        return self.counts / self.shots


@dataclass(frozen=True, eq=False)
class SimulationResult:
    estimate: complex
    true_value: complex
    empirical_variance_times_n: float
    analytic_delta: float
    reference_variance: float
    mode: str
    shots: int
    repetitions: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "estimate": [self.estimate.real, self.estimate.imag],
            "true_value": [self.true_value.real, self.true_value.imag],
            "empirical_variance_times_n": self.empirical_variance_times_n,
            "analytic_delta": self.analytic_delta,
            "reference_variance": self.reference_variance,
            "mode": self.mode,
            "shots": self.shots,
            "repetitions": self.repetitions,
            "seed": self.seed,
        }


def _check_shots(shots: int):
    if shots < 1:
        raise ValueError("shots must be at least 1")


def _two_stage(rng: np.random.Generator, weights: np.ndarray, probs: np.ndarray, shots: int) -> np.ndarray:
    """Draw the prepared state for each shot, then its outcome."""
    if len(weights) == 1:
        return rng.multinomial(shots, probs[0])
    per_state = rng.multinomial(shots, weights)
    counts = np.zeros(probs.shape[1], dtype=np.int64)
    for n_k, p_k in zip(per_state, probs):
        if n_k:
            counts += rng.multinomial(n_k, p_k)
    return counts


def sample_outcomes(povm: Povm, rho, shots: int, seed: int,
                    state_label: str = "rho", tol: Tolerances = DEFAULT) -> OutcomeCounts:
    _check_shots(shots)
    p = born_probabilities(povm, rho, tol)
    counts = generator(seed).multinomial(shots, p)
    return OutcomeCounts(counts, shots, seed, state_label)


def sample_ensemble(ensemble: Ensemble, povm: Povm, shots: int, seed: int,
                    tol: Tolerances = DEFAULT) -> OutcomeCounts:
    _check_shots(shots)
    probs = np.array([born_probabilities(povm, rho, tol) for rho in ensemble.states])
    counts = _two_stage(generator(seed), ensemble.weights, probs, shots)
    return OutcomeCounts(counts, shots, seed, "ensemble")


def _sample_variance(values: np.ndarray) -> float:
    dev = values - values.mean()
    return float(np.sum(np.abs(dev) ** 2) / (len(values) - 1))


def run_experiment(povm: Povm, ensemble: Ensemble, dual: DualFrame, x, shots: int,
                   repetitions: int, seed: int, mode: str = "per_state",
                   span: OperatorSpan | None = None, tol: Tolerances = DEFAULT) -> SimulationResult:
    """Estimate <X> from simulated counts over independent replicas.

    ``per_state`` samples every rho_k separately and averages the per-state
    variances with weights p_k; its reference is the ensemble-averaged noise.
    ``pooled`` draws the state anew for each shot, so its reference is the
    variance of f under the outcome distribution of rho_E.  Replica r uses
    the stream keyed by (seed, r).
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if repetitions < 2:
        raise ValueError("at least two repetitions are needed for a variance")
    _check_shots(shots)
    if span is None:
        span = span_basis(povm, tol)
    x = require_in_span(span, x, tol)
    residual = verify_dual(povm, dual, span)
    if residual > tol.dual:
        raise InvalidDual(residual)

    f = expansion_coefficients(dual, x).values
    analytic = noise(povm, dual, ensemble, x, span, tol).delta
    probs = np.array([born_probabilities(povm, rho, tol) for rho in ensemble.states])
    w = ensemble.weights
    true_value = complex(np.trace(ensemble.average_state @ x))

    if mode == "per_state":
        est = np.empty((repetitions, len(w)), dtype=complex)
        for r in range(repetitions):
            rng = generator(seed, r)
            for k, p_k in enumerate(probs):
                est[r, k] = f @ rng.multinomial(shots, p_k) / shots
        estimate = complex(est.mean(axis=0) @ w)
        variance = float(sum(w_k * _sample_variance(est[:, k]) for k, w_k in enumerate(w)))
        reference = analytic
    else:
        est = np.empty(repetitions, dtype=complex)
        for r in range(repetitions):
            est[r] = f @ _two_stage(generator(seed, r), w, probs, shots) / shots
        estimate = complex(est.mean())
        variance = _sample_variance(est)
        pi = outcome_weights(povm, ensemble, tol).values
        reference = float(pi @ np.abs(f) ** 2 - abs(pi @ f) ** 2)

    return SimulationResult(estimate, true_value, shots * variance, analytic, reference,
                            mode, shots, repetitions, seed)
