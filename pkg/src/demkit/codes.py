"""CSS code layouts: repetition, rotated surface, and small color codes.

Layouts are validated by brute force (parameters [[n, k, d]] recomputed from
the stabilizer supports) before any schedule or experiment uses them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .gf2 import BitMatrix
from .pauli import PauliString


@dataclass
class CSSCode:
    name: str
    n: int
    x_supports: list[tuple[int, ...]]  # qubit sets of X-type stabilizers
    z_supports: list[tuple[int, ...]]
    logical_x: tuple[int, ...] = ()
    logical_z: tuple[int, ...] = ()

    def x_stabilizers(self) -> list[PauliString]:
        return [_support_pauli(self.n, s, "X") for s in self.x_supports]

    def z_stabilizers(self) -> list[PauliString]:
        return [_support_pauli(self.n, s, "Z") for s in self.z_supports]

    def all_stabilizers(self) -> list[PauliString]:
        return self.x_stabilizers() + self.z_stabilizers()

    @property
    def is_self_dual(self) -> bool:
        return {frozenset(s) for s in self.x_supports} == {frozenset(s) for s in self.z_supports}

    def validate(self, expect: tuple[int, int, int] | None = None, max_d: int = 6) -> tuple[int, int, int]:
        """Recompute [[n, k, d]]; raises when inconsistent or != ``expect``."""
        hx = _support_matrix(self.n, self.x_supports)
        hz = _support_matrix(self.n, self.z_supports)
        for xs in self.x_supports:
            for zs in self.z_supports:
                if len(set(xs) & set(zs)) % 2:
                    raise ValueError(f"{self.name}: anticommuting stabilizers {xs} / {zs}")
        k = self.n - hx.rank() - hz.rank()
        d = min(
            _min_logical_weight(hx, hz, self.n, max_d),
            _min_logical_weight(hz, hx, self.n, max_d),
        )
        params = (self.n, k, d)
        if expect is not None and params != expect:
            raise ValueError(f"{self.name}: parameters {params} != expected {expect}")
        return params


def _support_pauli(n: int, support: tuple[int, ...], letter: str) -> PauliString:
    return PauliString.from_label("*".join(f"{letter}{q}" for q in sorted(support)), n)


def _support_matrix(n: int, supports: list[tuple[int, ...]]) -> BitMatrix:
    rows = np.zeros((len(supports), n), dtype=np.uint8)
    for i, s in enumerate(supports):
        rows[i, list(s)] = 1
    return BitMatrix.from_array(rows) if len(supports) else BitMatrix(0, n)


def _min_logical_weight(h_detect: BitMatrix, h_span: BitMatrix, n: int, max_d: int) -> int:
    """Minimum weight of a vector killed by ``h_detect`` outside ``h_span``'s row space."""
    for w in range(1, max_d + 1):
        for combo in itertools.combinations(range(n), w):
            v = np.zeros(n, dtype=np.uint8)
            v[list(combo)] = 1
            if h_detect.rows and h_detect.mul_vec(v).any():
                continue
            if not h_span.row_space_contains(v):
                return w
    raise ValueError(f"no logical operator of weight <= {max_d} found")


def repetition_code(d: int) -> CSSCode:
    if d < 2:
        raise ValueError("repetition code needs d >= 2")
    return CSSCode(
        name=f"repetition-{d}",
        n=d,
        x_supports=[],
        z_supports=[tuple((i, i + 1)) for i in range(d - 1)],
        logical_x=tuple(range(d)),
        logical_z=(0,),
    )


def color_code_12_2_3() -> CSSCode:
    """Self-dual [[12, 2, 3]] code: four weight-4 plaquettes and one weight-6.

    Plaquettes are grouped for three-round scheduling: the two "blue"
    plaquettes are disjoint, as are the two "green" ones.
    """
    supports = [
        (0, 1, 4, 5),  # blue
        (2, 3, 6, 7),  # blue
        (4, 5, 8, 9),  # green
        (6, 7, 10, 11),  # green
        (0, 2, 4, 7, 8, 11),  # red
    ]
    return CSSCode(
        name="color-12-2-3",
        n=12,
        x_supports=list(supports),
        z_supports=list(supports),
        logical_x=(1, 5, 9),
        logical_z=(1, 5, 9),
    )


def surface_code(d: int) -> CSSCode:
    """Rotated surface code [[d^2, 1, d]]; data qubit (r, c) -> r * d + c."""
    if d < 2:
        raise ValueError("surface code needs d >= 2")
    x_supports: list[tuple[int, ...]] = []
    z_supports: list[tuple[int, ...]] = []
    for fr in range(d + 1):
        for fc in range(d + 1):
            cell = [
                (r, c)
                for r, c in (
                    (fr - 1, fc - 1),
                    (fr - 1, fc),
                    (fr, fc - 1),
                    (fr, fc),
                )
                if 0 <= r < d and 0 <= c < d
            ]
            if len(cell) < 2:
                continue
            qubits = tuple(sorted(r * d + c for r, c in cell))
            is_x = (fr + fc) % 2 == 0
            if len(cell) == 2:
                # boundary checks: X on top/bottom rows, Z on left/right columns
                if fr in (0, d) and is_x:
                    x_supports.append(qubits)
                elif fc in (0, d) and not is_x:
                    z_supports.append(qubits)
            else:
                (x_supports if is_x else z_supports).append(qubits)
    return CSSCode(
        name=f"surface-{d}",
        n=d * d,
        x_supports=x_supports,
        z_supports=z_supports,
        logical_x=tuple(range(0, d * d, d)),  # first column
        logical_z=tuple(range(d)),  # first row
    )
