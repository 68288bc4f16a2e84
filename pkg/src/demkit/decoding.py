"""Minimum-weight exhaustive decoding and syndrome lookup tables.

The decoder depends on the syndrome only through H e = s. Ties between
same-weight candidates break toward the higher prior product, then the
lexicographically smallest index tuple.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dem import DetectorErrorModel

LOOKUP_BUDGET = 5_000_000


def _pack_bits(bits: np.ndarray) -> int:
    acc = 0
    for i in np.flatnonzero(bits):
        acc |= 1 << int(i)
    return acc


class MinWeightDecoder:
    """Exhaustive minimum-weight decoder over a model's columns."""

    def __init__(self, dem: DetectorErrorModel, max_w: int):
        self.dem = dem
        self.max_w = max_w
        self.cols = [_pack_bits(dem.H.column_bits(j)) for j in range(dem.num_errors)]
        self.obs = [_pack_bits(dem.L.column_bits(j)) for j in range(dem.num_errors)]
        self.log_priors = np.log(np.clip(dem.priors, 1e-300, 1.0))
        self._by_syndrome: dict[int, list[int]] = {}
        for j, c in enumerate(self.cols):
            self._by_syndrome.setdefault(c, []).append(j)
        self._pairs: dict[int, list[tuple[int, int]]] | None = None

    def _pair_table(self) -> dict[int, list[tuple[int, int]]]:
        if self._pairs is None:
            self._pairs = {}
            for i, j in itertools.combinations(range(len(self.cols)), 2):
                self._pairs.setdefault(self.cols[i] ^ self.cols[j], []).append((i, j))
        return self._pairs

    def _candidates(self, s: int, weight: int) -> list[tuple[int, ...]]:
        e = len(self.cols)
        if weight == 0:
            return [()] if s == 0 else []
        if weight == 1:
            return [(j,) for j in self._by_syndrome.get(s, [])]
        if weight == 2:
            return self._pair_table().get(s, [])
        if weight == 3:
            out = []
            pairs = self._pair_table()
            for j in range(e):
                for pair in pairs.get(s ^ self.cols[j], ()):
                    if pair[1] < j:
                        out.append((pair[0], pair[1], j))
            return sorted(out)
        return [c for c in itertools.combinations(range(e), weight) if _xor_all(self.cols, c) == s]

    def decode(self, syndrome_bits: np.ndarray) -> tuple[int, ...] | None:
        """Column indices of the inferred error, or None within the budget."""
        s = _pack_bits(np.asarray(syndrome_bits, dtype=np.uint8))
        for weight in range(0, self.max_w + 1):
            candidates = self._candidates(s, weight)
            if candidates:
                return min(
                    candidates,
                    key=lambda combo: (-sum(self.log_priors[j] for j in combo), combo),
                )
        return None

    def observable_prediction(self, combo: tuple[int, ...]) -> int:
        acc = 0
        for j in combo:
            acc ^= self.obs[j]
        return acc


def _xor_all(cols, combo) -> int:
    acc = 0
    for j in combo:
        acc ^= cols[j]
    return acc


def decode_minweight(dem: DetectorErrorModel, s: np.ndarray, max_w: int) -> np.ndarray | None:
    """Minimum-weight error vector with H e = s, or None if none within max_w."""
    s = np.asarray(s, dtype=np.uint8) & 1
    if s.shape != (dem.num_detectors,):
        raise ValueError(f"syndrome length {s.shape} != detector count {dem.num_detectors}")
    combo = MinWeightDecoder(dem, max_w).decode(s)
    if combo is None:
        return None
    e = np.zeros(dem.num_errors, dtype=np.uint8)
    e[list(combo)] = 1
    return e


@dataclass
class LookupTable:
    t: int
    table: dict[bytes, tuple[int, tuple[int, ...]]]  # syndrome -> (obs flips, representative)

    def decode(self, syndrome_bits: np.ndarray) -> tuple[int, tuple[int, ...]] | None:
        return self.table.get(np.asarray(syndrome_bits, dtype=np.uint8).tobytes())


def build_lookup(dem: DetectorErrorModel, t: int, budget: int = LOOKUP_BUDGET) -> LookupTable:
    """Tabulate every achievable syndrome of weight <= t errors.

    Entries agree with decode_minweight: lowest weight wins, then prior
    product, then lexicographic order.
    """
    e = dem.num_errors
    total = sum(_comb(e, w) for w in range(t + 1))
    if total > budget:
        raise ValueError(f"lookup of {total} subsets exceeds budget {budget}")
    log_priors = np.log(np.clip(dem.priors, 1e-300, 1.0))
    h_cols = [dem.H.column_bits(j) for j in range(e)]
    l_cols = [_pack_bits(dem.L.column_bits(j)) for j in range(e)]
    table: dict[bytes, tuple[float, int, tuple[int, ...]]] = {}
    zero = np.zeros(dem.num_detectors, dtype=np.uint8)
    table[zero.tobytes()] = (0.0, 0, ())
    for weight in range(1, t + 1):
        for combo in itertools.combinations(range(e), weight):
            s = zero.copy()
            flips = 0
            score = 0.0
            for j in combo:
                s ^= h_cols[j]
                flips ^= l_cols[j]
                score += log_priors[j]
            key = s.tobytes()
            prev = table.get(key)
            if prev is None or (len(prev[2]) == weight and (-score, combo) < (-prev[0], prev[2])):
                table[key] = (score, flips, combo)
    return LookupTable(
        t=t, table={k: (flips, combo) for k, (score, flips, combo) in table.items()}
    )


def _comb(n: int, k: int) -> int:
    import math

    return math.comb(n, k)


def logical_error(
    dem: DetectorErrorModel, m: np.ndarray, obs_index: int, e_inferred: np.ndarray
) -> int:
    """1 iff the decoder's prediction disagrees with the measured parity."""
    if dem.observables_m is None:
        raise ValueError("model does not track observable measurement vectors")
    m = np.asarray(m, dtype=np.uint8) & 1
    o_row = dem.observables_m.row_bits(obs_index)
    measured = int(o_row @ m) & 1
    predicted = int(dem.L.row_bits(obs_index) @ (np.asarray(e_inferred, dtype=np.uint8) & 1)) & 1
    return int(measured ^ predicted != int(dem.observable_b[obs_index]))


def logical_error_sampled(
    dem: DetectorErrorModel, e_sample: np.ndarray, e_inferred: np.ndarray, obs_index: int
) -> int:
    """Simulation form of the predicate, for models normalized to b = 0."""
    row = dem.L.row_bits(obs_index)
    actual = int(row @ (np.asarray(e_sample, dtype=np.uint8) & 1)) & 1
    predicted = int(row @ (np.asarray(e_inferred, dtype=np.uint8) & 1)) & 1
    return int(actual ^ predicted != int(dem.observable_b[obs_index]))
