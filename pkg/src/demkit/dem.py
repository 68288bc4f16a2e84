"""Detector error models: H = D * Omega plus priors and observables.

Columns with identical effect (same violated detectors, same observable
flips, and -- when tracked -- the same residual output error) are merged
with exclusive-or prior composition.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .circuit import Circuit
from .detectors import DetectorSet, derive_detectors, simulate_symbolic, expand_outcomes
from .frames import SyndromeMatrix, build_syndrome_matrix, enumerate_errors
from .gf2 import BitMatrix
from .pauli import PauliString


@dataclass
class DetectorErrorModel:
    H: BitMatrix  # detectors x errors
    L: BitMatrix  # observables x errors
    priors: np.ndarray  # probability per column
    merge_map: list[int]  # original error index -> column index
    detector_b: np.ndarray  # constant per detector
    observable_b: np.ndarray  # constant per observable
    D: BitMatrix | None = None  # detectors x measurements (when circuit-derived)
    observables_m: BitMatrix | None = None  # observables x measurements
    omega: BitMatrix | None = None  # measurements x original errors
    output_x: np.ndarray | None = None  # columns x n residual components
    output_z: np.ndarray | None = None
    klasses: tuple[str, ...] | None = None  # per column: "input" | "internal"
    descriptions: tuple[str, ...] = ()

    @property
    def num_detectors(self) -> int:
        return self.H.rows

    @property
    def num_errors(self) -> int:
        return self.H.cols

    @property
    def num_observables(self) -> int:
        return self.L.rows

    def syndrome(self, e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(violated detectors, flipped observables) of an error vector."""
        e = np.asarray(e, dtype=np.uint8) & 1
        if e.shape != (self.num_errors,):
            raise ValueError(f"error vector length {e.shape} != {self.num_errors} columns")
        return self.H.mul_vec(e), self.L.mul_vec(e)

    def column_effect(self, j: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.H.column_key(j), self.L.column_key(j)


def build(
    ds: DetectorSet,
    sm: SyndromeMatrix,
    observables: list[tuple[np.ndarray, int]] | None = None,
    priors: np.ndarray | None = None,
) -> DetectorErrorModel:
    """Compose a detector set and syndrome matrix into an (unmerged) model."""
    if ds.D.cols != sm.omega.rows:
        raise ValueError(
            f"detector columns ({ds.D.cols}) do not match measurement count ({sm.omega.rows})"
        )
    observables = observables or []
    H = ds.D @ sm.omega
    if observables:
        obs_rows = np.array([o for o, _ in observables], dtype=np.uint8)
        obs_matrix = BitMatrix.from_array(obs_rows)
        L = obs_matrix @ sm.omega
        obs_b = np.array([b for _, b in observables], dtype=np.uint8)
    else:
        obs_matrix = BitMatrix(0, sm.omega.rows)
        L = BitMatrix(0, sm.omega.cols)
        obs_b = np.zeros(0, dtype=np.uint8)
    if priors is None:
        priors = np.array([loc.prob for loc in sm.errors], dtype=float)
    if len(priors) != H.cols:
        raise ValueError("one prior per error column required")
    return DetectorErrorModel(
        H=H,
        L=L,
        priors=np.asarray(priors, dtype=float),
        merge_map=list(range(H.cols)),
        detector_b=ds.b.copy(),
        observable_b=obs_b,
        D=ds.D,
        observables_m=obs_matrix,
        omega=sm.omega,
        output_x=sm.output_x.copy(),
        output_z=sm.output_z.copy(),
        klasses=tuple(loc.klass for loc in sm.errors),
        descriptions=tuple(loc.describe() for loc in sm.errors),
    )


def build_dem(
    circuit: Circuit,
    sparsify: bool = False,
    logical_reps: list[PauliString] | None = None,
    initial_generators: list[PauliString] | None = None,
    merge: bool = False,
) -> DetectorErrorModel:
    """Full pipeline: derive detectors, propagate errors, attach observables.

    Declared detectors, when present, replace the derived basis (their
    constants are recomputed from the noise-free run). Observable constants
    come from the constant part of the declared parity's outcome expansion.
    """
    records = simulate_symbolic(circuit, initial_generators)
    expansion = expand_outcomes(records)
    m = len(records)

    if circuit.declared_detectors is not None:
        rows = np.zeros((len(circuit.declared_detectors), m), dtype=np.uint8)
        consts = np.zeros(len(circuit.declared_detectors), dtype=np.uint8)
        for i, decl in enumerate(circuit.declared_detectors):
            free: frozenset[int] = frozenset()
            for idx in decl.measurements:
                rows[i, idx - 1] = 1
                c, f = expansion[idx - 1]
                consts[i] ^= c
                free ^= f
            if free:
                raise ValueError(
                    f"declared detector over m{list(decl.measurements)} is not deterministic"
                )
        ds = DetectorSet(D=BitMatrix.from_array(rows), b=consts, m=m)
    else:
        ds = derive_detectors(circuit, initial_generators)

    observables = []
    for decl in circuit.declared_observables:
        o = np.zeros(m, dtype=np.uint8)
        const = 0
        for idx in decl.measurements:
            o[idx - 1] = 1
            const ^= expansion[idx - 1][0]
        observables.append((o, const))

    sm = build_syndrome_matrix(circuit, enumerate_errors(circuit))
    dem = build(ds, sm, observables)
    if sparsify:
        dem = sparsify_checks(dem)
    if merge:
        dem = merge_equivalent(dem)
    return dem


def sparsify_checks(dem: DetectorErrorModel) -> DetectorErrorModel:
    """Greedy row operations lowering the check matrix's total popcount.

    Rows of H, D, and the detector constants transform together so syndromes
    stay consistent; the greedy score counts H entries only.
    """
    h = dem.H.to_array()
    d = dem.D.to_array() if dem.D is not None else np.zeros((h.shape[0], 0), dtype=np.uint8)
    b = dem.detector_b.copy()
    weights = h.sum(axis=1)
    changed = True
    while changed:
        changed = False
        for i in range(h.shape[0]):
            for j in range(h.shape[0]):
                if i == j:
                    continue
                cand = h[i] ^ h[j]
                w = int(cand.sum())
                if w < weights[i]:
                    h[i] = cand
                    d[i] ^= d[j]
                    b[i] ^= b[j]
                    weights[i] = w
                    changed = True
    return replace(
        dem,
        H=BitMatrix.from_array(h),
        D=BitMatrix.from_array(d) if dem.D is not None else None,
        detector_b=b,
    )


def merge_equivalent(dem: DetectorErrorModel) -> DetectorErrorModel:
    """Merge columns with identical effect; priors fold by exclusive-or."""
    keys: dict[tuple, int] = {}
    new_index: list[int] = []
    order: list[int] = []
    for j in range(dem.num_errors):
        key = (dem.H.column_key(j), dem.L.column_key(j))
        if dem.output_x is not None:
            key += (dem.output_x[j].tobytes(), dem.output_z[j].tobytes())
        if key in keys:
            new_index.append(keys[key])
        else:
            keys[key] = len(order)
            new_index.append(len(order))
            order.append(j)

    cols = len(order)
    h = np.zeros((dem.num_detectors, cols), dtype=np.uint8)
    l = np.zeros((dem.num_observables, cols), dtype=np.uint8)
    priors = np.zeros(cols, dtype=float)
    klasses = [None] * cols
    descriptions = [[] for _ in range(cols)]
    h_old = dem.H.to_array()
    l_old = dem.L.to_array()
    for j in range(dem.num_errors):
        t = new_index[j]
        h[:, t] = h_old[:, j]
        if dem.num_observables:
            l[:, t] = l_old[:, j]
        p, q = priors[t], dem.priors[j]
        priors[t] = p * (1 - q) + q * (1 - p)
        if dem.klasses is not None:
            k = dem.klasses[j]
            klasses[t] = "input" if "input" in (klasses[t], k) else k
        if dem.descriptions:
            descriptions[t].append(dem.descriptions[j])

    merge_map = [new_index[dem.merge_map[i]] for i in range(len(dem.merge_map))]
    return replace(
        dem,
        H=BitMatrix.from_array(h) if cols else BitMatrix(dem.num_detectors, 0),
        L=BitMatrix.from_array(l) if cols else BitMatrix(dem.num_observables, 0),
        priors=priors,
        merge_map=merge_map,
        output_x=dem.output_x[order] if dem.output_x is not None else None,
        output_z=dem.output_z[order] if dem.output_z is not None else None,
        klasses=tuple(klasses) if dem.klasses is not None else None,
        descriptions=tuple("+".join(d) for d in descriptions),
    )


def syndrome(dem: DetectorErrorModel, e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return dem.syndrome(e)


# -- exports -------------------------------------------------------------------


def export_text(dem: DetectorErrorModel) -> str:
    lines = []
    for j in range(dem.num_errors):
        dets, obs = dem.column_effect(j)
        parts = [f"error({dem.priors[j]:g})"]
        parts += [f"D{i}" for i in dets]
        parts += [f"L{i}" for i in obs]
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


def export_dot(dem: DetectorErrorModel) -> str:
    out = ["graph tanner {"]
    for i in range(dem.num_detectors):
        out.append(f'  D{i} [shape=box label="D{i}"];')
    for j in range(dem.num_errors):
        label = dem.descriptions[j] if dem.descriptions else f"E{j + 1}"
        out.append(f'  e{j} [shape=circle label="{label}"];')
    for j in range(dem.num_errors):
        for i in dem.H.column_key(j):
            out.append(f"  e{j} -- D{i};")
    out.append("}")
    return "\n".join(out) + "\n"


def export_json(dem: DetectorErrorModel) -> str:
    import json

    payload = {
        "detectors": dem.num_detectors,
        "observables": dem.num_observables,
        "detector_constants": dem.detector_b.tolist(),
        "observable_constants": dem.observable_b.tolist(),
        "errors": [
            {
                "p": dem.priors[j],
                "detectors": list(dem.column_effect(j)[0]),
                "observables": list(dem.column_effect(j)[1]),
                "source": dem.descriptions[j] if dem.descriptions else None,
            }
            for j in range(dem.num_errors)
        ],
        "merge_map": dem.merge_map,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def export(dem: DetectorErrorModel, fmt: str) -> str:
    if fmt == "dem-text":
        return export_text(dem)
    if fmt == "dot":
        return export_dot(dem)
    if fmt == "json":
        return export_json(dem)
    raise ValueError(f"unknown export format {fmt!r}")
