"""Numerical thresholds shared by every module."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-9
    psd: float = 1e-9  # relative to the largest eigenvalue
    trace: float = 1e-9
    complete: float = 1e-9
    ortho: float = 1e-9
    span: float = 1e-9
    rank_cutoff: float = 1e-10  # relative to the largest singular value
    dual: float = 1e-8
    consistency: float = 1e-7
    weight: float = 1e-12

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT = Tolerances()
