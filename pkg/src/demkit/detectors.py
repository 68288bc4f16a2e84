"""Detector derivation by symbolic tableau simulation.

A detector is emitted for every measurement whose outcome is deterministic,
as the parity of that measurement with the earlier outcomes appearing in its
predicted sign. Each row's own measurement is its pivot, so rows are
independent by construction and one row appears per deterministic
measurement.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Instruction, ObservableDecl
from .gf2 import BitMatrix
from .pauli import PauliString, SymbolicSign, Tableau


class ObservableError(ValueError):
    """Declared parity is not a valid observable of the circuit."""


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome of one measurement in the noise-free symbolic run."""

    index: int  # 1-based
    random: bool
    sign: SymbolicSign  # predicted parity for deterministic outcomes
    hidden: bool  # depends on unrecorded reset randomness


@dataclass
class DetectorSet:
    D: BitMatrix  # d x m (or d x (m+1) after constant normalization)
    b: np.ndarray  # length d, uint8
    m: int  # number of measurements the columns refer to

    @property
    def num_detectors(self) -> int:
        return self.D.rows

    def rows_as_index_sets(self) -> list[tuple[int, ...]]:
        """1-based measurement indices of each detector row."""
        return [tuple(int(j) + 1 for j in np.flatnonzero(self.D.row_bits(i))) for i in range(self.D.rows)]


def measurement_operator(ins: Instruction, n: int) -> PauliString:
    if ins.kind == "MZ":
        return PauliString.single(n, ins.targets[0], "Z")
    if ins.kind == "MX":
        return PauliString.single(n, ins.targets[0], "X")
    if ins.kind == "MPP":
        return ins.mpp_pauli(n)
    raise ValueError(f"{ins.kind} is not a measurement")


def simulate_symbolic(
    circuit: Circuit, initial_generators: list[PauliString] | None = None
) -> list[MeasurementRecord]:
    """Noise-free symbolic run; returns one record per measurement.

    ``initial_generators`` restricts the initial stabilizer group (data qubits
    in an unknown code state); the default is |0...0>.
    """
    tableau = Tableau(circuit.n_qubits, initial_generators)
    records: list[MeasurementRecord] = []
    k = 0
    for ins in circuit.instructions:
        if ins.kind in ("TICK",) or ins.is_noise:
            continue
        if ins.kind == "R":
            tableau.reset(ins.targets[0])
        elif ins.is_measurement:
            k += 1
            outcome = tableau.measure(measurement_operator(ins, circuit.n_qubits), k)
            records.append(
                MeasurementRecord(
                    index=k,
                    random=outcome.random,
                    sign=outcome.sign,
                    hidden=bool(outcome.sign.hidden_terms),
                )
            )
        else:
            tableau.apply_clifford(ins.kind, ins.targets)
    return records


def derive_detectors(circuit: Circuit, initial_generators: list[PauliString] | None = None) -> DetectorSet:
    records = simulate_symbolic(circuit, initial_generators)
    m = len(records)
    rows = []
    consts = []
    for rec in records:
        if rec.random or rec.hidden:
            continue
        row = np.zeros(m, dtype=np.uint8)
        row[rec.index - 1] = 1
        for t in rec.sign.measurement_terms:
            row[t - 1] ^= 1
        rows.append(row)
        consts.append(rec.sign.constant)
    D = BitMatrix.from_array(np.array(rows, dtype=np.uint8)) if rows else BitMatrix(0, m)
    return DetectorSet(D=D, b=np.array(consts, dtype=np.uint8), m=m)


def normalize_constants(ds: DetectorSet) -> DetectorSet:
    """Append a constant column carrying b so every detector's b becomes 0."""
    dense = ds.D.to_array()
    extended = np.concatenate([dense, ds.b[:, None]], axis=1)
    return DetectorSet(D=BitMatrix.from_array(extended), b=np.zeros(ds.D.rows, dtype=np.uint8), m=ds.m)


def strip_constant_column(ds: DetectorSet) -> DetectorSet:
    dense = ds.D.to_array()
    return DetectorSet(D=BitMatrix.from_array(dense[:, :-1]), b=dense[:, -1].copy(), m=ds.m)


def expand_outcomes(records: list[MeasurementRecord]) -> list[tuple[int, frozenset[int]]]:
    """Per measurement: (constant, free random symbols) after full substitution."""
    expansion: dict[int, tuple[int, frozenset[int]]] = {}
    for rec in records:
        if rec.random or rec.hidden:
            expansion[rec.index] = (0, frozenset([rec.index]))
        else:
            const = rec.sign.constant
            free: frozenset[int] = frozenset()
            for t in rec.sign.measurement_terms:
                tc, tf = expansion[t]
                const ^= tc
                free ^= tf
            expansion[rec.index] = (const, free)
    return [expansion[rec.index] for rec in records]


def propagate_input_flips(circuit: Circuit, pauli: PauliString, start: int | None = None) -> np.ndarray:
    """Measurement flips caused by injecting ``pauli`` before instruction ``start``.

    ``start`` defaults to the first noise or measurement instruction, i.e.
    just after any noiseless state-preparation prefix.
    """
    from .frames import PauliFrame  # local import; frames depends on circuit only

    if start is None:
        start = 0
        for i, ins in enumerate(circuit.instructions):
            if ins.is_noise or ins.is_measurement:
                start = i
                break
        else:
            start = len(circuit.instructions)
    frame = PauliFrame(circuit.n_qubits)
    frame.x ^= pauli.x_bits
    frame.z ^= pauli.z_bits
    flips = np.zeros(circuit.num_measurements, dtype=np.uint8)
    k = 0
    for i, ins in enumerate(circuit.instructions):
        if ins.is_measurement:
            k += 1
        if i < start:
            continue
        if ins.is_measurement:
            if frame.anticommutes_with(measurement_operator(ins, circuit.n_qubits)):
                flips[k - 1] = 1
        elif ins.kind == "R":
            frame.reset(ins.targets[0])
        elif ins.kind not in ("TICK",) and not ins.is_noise:
            frame.apply_gate(ins.kind, ins.targets)
    return flips


def resolve_observable(
    circuit: Circuit,
    decl: ObservableDecl,
    logical_rep: PauliString | None = None,
    inject_at: int | None = None,
) -> tuple[np.ndarray, int]:
    """Resolve a declared observable to its vector and noise-free constant.

    The declared parity must be deterministic in the noise-free run, or --
    when a representative ``logical_rep`` of the initial logical operator is
    supplied -- must flip together with that operator while every derived
    detector stays unflipped (the parity then reads out the logical frame and
    the constant fixes the frame's reference value).
    """
    records = simulate_symbolic(circuit)
    m = len(records)
    for idx in decl.measurements:
        if not 1 <= idx <= m:
            raise ObservableError(f"measurement reference m{idx} out of range")
    o = np.zeros(m, dtype=np.uint8)
    for idx in decl.measurements:
        o[idx - 1] = 1

    expansion = expand_outcomes(records)
    const = 0
    free: frozenset[int] = frozenset()
    for idx in decl.measurements:
        c, f = expansion[idx - 1]
        const ^= c
        free ^= f
    if not free:
        return o, const

    if logical_rep is None:
        raise ObservableError(
            "declared parity depends on random outcomes "
            f"(measurements {sorted(free)}) and no logical operator was supplied"
        )
    flips = propagate_input_flips(circuit, logical_rep, inject_at)
    if int(flips @ o) % 2 != 1:
        raise ObservableError("declared parity does not read out the supplied logical operator")
    ds = derive_detectors(circuit)
    detector_flips = ds.D.mul_vec(flips)
    if detector_flips.any():
        raise ObservableError("supplied logical operator is detectable, not a logical frame")
    return o, const
