"""Exact circuit-distance search by exhaustive enumeration.

Enumeration runs in increasing weight, lexicographic within a weight, and
stops at the first witness, so reported witnesses are deterministic.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dem import DetectorErrorModel


@dataclass(frozen=True)
class DistanceResult:
    weight: int
    witness: tuple[int, ...]  # column indices

    def witness_vector(self, num_errors: int) -> np.ndarray:
        e = np.zeros(num_errors, dtype=np.uint8)
        e[list(self.witness)] = 1
        return e


def _packed_columns(matrix) -> list[int]:
    cols = []
    for j in range(matrix.cols):
        acc = 0
        for i in matrix.column_key(j):
            acc |= 1 << i
        cols.append(acc)
    return cols


def circuit_distance(dem: DetectorErrorModel, max_w: int) -> DistanceResult | None:
    """Smallest error set flipping an observable while violating no detector."""
    if dem.num_observables == 0:
        raise ValueError("no observable defined")
    h = _packed_columns(dem.H)
    l = _packed_columns(dem.L)
    for weight in range(1, max_w + 1):
        for combo in itertools.combinations(range(dem.num_errors), weight):
            s = 0
            flip = 0
            for j in combo:
                s ^= h[j]
                flip ^= l[j]
            if s == 0 and flip != 0:
                return DistanceResult(weight, combo)
    return None


def min_undetected_weight(
    dem: DetectorErrorModel, max_w: int, require_observable_flip: bool = False
) -> DistanceResult | None:
    """Smallest nonzero error set with trivial syndrome."""
    if require_observable_flip:
        return circuit_distance(dem, max_w)
    h = _packed_columns(dem.H)
    for weight in range(1, max_w + 1):
        for combo in itertools.combinations(range(dem.num_errors), weight):
            s = 0
            for j in combo:
                s ^= h[j]
            if s == 0:
                return DistanceResult(weight, combo)
    return None


def verify_witness(dem: DetectorErrorModel, witness: tuple[int, ...]) -> bool:
    e = np.zeros(dem.num_errors, dtype=np.uint8)
    e[list(witness)] = 1
    s, flip = dem.syndrome(e)
    return not s.any() and bool(flip.any())
