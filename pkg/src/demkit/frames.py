"""Error enumeration and Pauli-frame propagation.

Each error location is propagated through the circuit as a Pauli frame; a
measurement is flipped when the frame anticommutes with the measured operator
at measurement time. All frames are propagated together, column-vectorized
over error locations.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Instruction
from .detectors import DetectorSet, derive_detectors, measurement_operator, simulate_symbolic
from .gf2 import BitMatrix
from .pauli import PauliString, Tableau

_TWO_QUBIT_PAULIS = [
    (a, b) for a in "IXYZ" for b in "IXYZ" if (a, b) != ("I", "I")
]

GROUP_SEARCH_LIMIT = 1 << 16


class PauliFrame:
    """Single Pauli frame: which X/Z components differ from the reference run."""

    def __init__(self, n: int):
        self.n = n
        self.x = np.zeros(n, dtype=np.uint8)
        self.z = np.zeros(n, dtype=np.uint8)

    def apply_gate(self, kind: str, targets) -> None:
        x, z = self.x, self.z
        if kind == "H":
            q = targets[0]
            x[q], z[q] = z[q], x[q]
        elif kind == "S":
            q = targets[0]
            z[q] ^= x[q]
        elif kind in ("X", "Y", "Z"):
            pass  # Paulis commute with the frame up to sign
        elif kind == "CNOT":
            c, t = targets
            x[t] ^= x[c]
            z[c] ^= z[t]
        elif kind == "CZ":
            a, b = targets
            z[a] ^= x[b]
            z[b] ^= x[a]
        else:
            raise ValueError(f"cannot propagate frame through {kind!r}")

    def reset(self, q: int) -> None:
        self.x[q] = 0
        self.z[q] = 0

    def anticommutes_with(self, p: PauliString) -> bool:
        overlap = int(np.sum(self.x & p.z_bits) + np.sum(self.z & p.x_bits))
        return bool(overlap & 1)


@dataclass(frozen=True)
class ErrorLocation:
    """One possible fault: a Pauli after an instruction or a measurement flip."""

    id: int
    position: int  # instruction index
    prob: float
    pauli: PauliString | None = None  # None for measurement flips
    measurement: int | None = None  # 1-based, for measurement flips
    klass: str = "internal"  # "input" | "internal"

    @property
    def is_meas_flip(self) -> bool:
        return self.pauli is None

    def describe(self) -> str:
        if self.is_meas_flip:
            return f"flip(m{self.measurement})"
        return self.pauli.label()


@dataclass
class SyndromeMatrix:
    omega: BitMatrix  # m x e
    output_x: np.ndarray  # e x n residual X components at circuit end
    output_z: np.ndarray  # e x n
    errors: list[ErrorLocation]

    def output_op(self, j: int) -> PauliString:
        n = self.output_x.shape[1]
        return PauliString(n, self.output_x[j], self.output_z[j])

    def combined_output(self, e: np.ndarray) -> PauliString:
        """Residual operator of an error set (signs dropped)."""
        e = np.asarray(e, dtype=np.uint8) & 1
        n = self.output_x.shape[1]
        sel = np.flatnonzero(e)
        if sel.size == 0:
            return PauliString(n)
        x = np.bitwise_xor.reduce(self.output_x[sel], axis=0)
        z = np.bitwise_xor.reduce(self.output_z[sel], axis=0)
        return PauliString(n, x, z)


def enumerate_errors(circuit: Circuit) -> list[ErrorLocation]:
    """All error locations of the circuit's noise annotations, in canonical order.

    Order is instruction order, then target order, then Pauli kind: X,Y,Z for
    single-qubit depolarizing and IX..ZZ lexicographic for two-qubit.
    """
    n = circuit.n_qubits
    first_meas = next(
        (i for i, ins in enumerate(circuit.instructions) if ins.is_measurement),
        len(circuit.instructions),
    )
    out: list[ErrorLocation] = []
    meas_index = 0

    def add(position, prob, pauli=None, measurement=None):
        klass = "input" if pauli is not None and position < first_meas else "internal"
        out.append(
            ErrorLocation(
                id=len(out), position=position, prob=prob, pauli=pauli,
                measurement=measurement, klass=klass,
            )
        )

    for i, ins in enumerate(circuit.instructions):
        if ins.is_measurement:
            meas_index += 1
            if ins.prob is not None and ins.prob > 0:
                add(i, ins.prob, measurement=meas_index)
        elif ins.kind in ("X_ERROR", "Y_ERROR", "Z_ERROR"):
            if ins.prob > 0:
                letter = ins.kind[0]
                for q in ins.targets:
                    add(i, ins.prob, PauliString.single(n, q, letter))
        elif ins.kind == "DEPOLARIZE1":
            if ins.prob > 0:
                for q in ins.targets:
                    for letter in "XYZ":
                        add(i, ins.prob / 3.0, PauliString.single(n, q, letter))
        elif ins.kind == "DEPOLARIZE2":
            if ins.prob > 0:
                a, b = ins.targets
                for la, lb in _TWO_QUBIT_PAULIS:
                    label = "*".join(f"{l}{q}" for l, q in ((la, a), (lb, b)) if l != "I")
                    add(i, ins.prob / 15.0, PauliString.from_label(label, n))
    return out


def build_syndrome_matrix(circuit: Circuit, errors: list[ErrorLocation] | None = None) -> SyndromeMatrix:
    if errors is None:
        errors = enumerate_errors(circuit)
    n = circuit.n_qubits
    e = len(errors)
    m = circuit.num_measurements
    fx = np.zeros((e, n), dtype=np.uint8)
    fz = np.zeros((e, n), dtype=np.uint8)
    omega = np.zeros((m, e), dtype=np.uint8)

    inject: dict[int, list[ErrorLocation]] = {}
    flips_at: dict[int, list[int]] = {}
    for loc in errors:
        if loc.is_meas_flip:
            flips_at.setdefault(loc.measurement, []).append(loc.id)
        else:
            inject.setdefault(loc.position, []).append(loc)

    meas_index = 0
    for i, ins in enumerate(circuit.instructions):
        for loc in inject.get(i, ()):
            fx[loc.id] ^= loc.pauli.x_bits
            fz[loc.id] ^= loc.pauli.z_bits
        if ins.is_measurement:
            meas_index += 1
            op = measurement_operator(ins, n)
            support = np.flatnonzero(op.x_bits | op.z_bits)
            overlap = fx[:, support] @ op.z_bits[support] + fz[:, support] @ op.x_bits[support]
            omega[meas_index - 1] = (overlap & 1).astype(np.uint8)
            for j in flips_at.get(meas_index, ()):
                omega[meas_index - 1, j] ^= 1
        elif ins.kind == "R":
            q = ins.targets[0]
            fx[:, q] = 0
            fz[:, q] = 0
        elif ins.kind == "H":
            q = ins.targets[0]
            fx[:, q], fz[:, q] = fz[:, q].copy(), fx[:, q].copy()
        elif ins.kind == "S":
            q = ins.targets[0]
            fz[:, q] ^= fx[:, q]
        elif ins.kind == "CNOT":
            c, t = ins.targets
            fx[:, t] ^= fx[:, c]
            fz[:, c] ^= fz[:, t]
        elif ins.kind == "CZ":
            a, b = ins.targets
            fz[:, a] ^= fx[:, b]
            fz[:, b] ^= fx[:, a]
        # X/Y/Z gates, TICK, and noise lines leave frames unchanged
    return SyndromeMatrix(
        omega=BitMatrix.from_array(omega), output_x=fx, output_z=fz, errors=errors
    )


def with_circuit_level_noise(circuit: Circuit, p: float) -> Circuit:
    """Attach the full circuit-level noise model: an n-qubit depolarizing
    channel after every n-qubit gate, single-qubit depolarizing after reset,
    and a classical flip on every measurement."""
    out = Circuit(circuit.n_qubits)
    out.declared_observables = list(circuit.declared_observables)
    out.declared_detectors = (
        list(circuit.declared_detectors) if circuit.declared_detectors is not None else None
    )
    for ins in circuit.instructions:
        if ins.is_measurement:
            out.instructions.append(
                Instruction(ins.kind, ins.targets, p, ins.pauli_terms)
            )
        else:
            out.instructions.append(ins)
            if ins.kind in ("H", "S", "X", "Y", "Z"):
                out.instructions.append(Instruction("DEPOLARIZE1", ins.targets, p))
            elif ins.kind in ("CNOT", "CZ"):
                out.instructions.append(Instruction("DEPOLARIZE2", ins.targets, p))
            elif ins.kind == "R":
                out.instructions.append(Instruction("DEPOLARIZE1", ins.targets, p))
    return out


# -- residual-operator comparison modulo a stabilizer context ------------------


def end_time_group(
    circuit: Circuit, data_qubits: list[int], code_stabilizers: list[PauliString]
) -> list[PauliString]:
    """Generators of the end-of-circuit harmless group.

    The reference run starts with the data qubits in an unknown state fixed
    only by ``code_stabilizers`` and every other qubit in |0>; the returned
    generators (signs dropped) span everything a residual operator can be
    multiplied by without physical effect.
    """
    n = circuit.n_qubits
    gens = [p.copy() for p in code_stabilizers]
    data = set(data_qubits)
    for q in range(n):
        if q not in data:
            gens.append(PauliString.single(n, q, "Z"))
    tableau = Tableau(n, gens)
    k = 0
    for ins in circuit.instructions:
        if ins.kind == "TICK" or ins.is_noise:
            continue
        if ins.kind == "R":
            tableau.reset(ins.targets[0])
        elif ins.is_measurement:
            k += 1
            tableau.measure(measurement_operator(ins, n), k)
        else:
            tableau.apply_clifford(ins.kind, ins.targets)
    return [PauliString(n, g.x_bits.copy(), g.z_bits.copy()) for g in tableau.generators]


def min_weights_mod_group(
    op: PauliString, group: list[PauliString], qubits: list[int]
) -> tuple[int, int, PauliString]:
    """Minimal X and Z weight of ``op`` on ``qubits`` over the group's span.

    Returns (min X weight, min Z weight, a representative of minimal total
    weight). X and Z weights are each minimized independently.
    """
    if len(group) > 16 or (1 << len(group)) > GROUP_SEARCH_LIMIT:
        raise ValueError(f"stabilizer group too large to enumerate ({len(group)} generators)")
    idx = np.asarray(qubits, dtype=int)
    gx = np.array([g.x_bits[idx] for g in group], dtype=np.uint8).reshape(len(group), len(idx))
    gz = np.array([g.z_bits[idx] for g in group], dtype=np.uint8).reshape(len(group), len(idx))
    x = op.x_bits[idx].copy()
    z = op.z_bits[idx].copy()
    best_x = int(x.sum())
    best_z = int(z.sum())
    # representative choice prefers balanced parts: min (max(wx, wz), wx+wz)
    best_key = (max(best_x, best_z), best_x + best_z)
    best_rep = (x.copy(), z.copy())
    # Gray-code walk over all group elements
    cur_x, cur_z = x.copy(), z.copy()
    prev = 0
    for counter in range(1, 1 << len(group)):
        gray = counter ^ (counter >> 1)
        bit = (gray ^ prev).bit_length() - 1
        prev = gray
        cur_x ^= gx[bit]
        cur_z ^= gz[bit]
        wx, wz = int(cur_x.sum()), int(cur_z.sum())
        best_x = min(best_x, wx)
        best_z = min(best_z, wz)
        key = (max(wx, wz), wx + wz)
        if key < best_key:
            best_key = key
            best_rep = (cur_x.copy(), cur_z.copy())
    rep = PauliString(len(idx), best_rep[0], best_rep[1])
    return best_x, best_z, rep


def restrict_to(op: PauliString, qubits: list[int]) -> PauliString:
    idx = np.asarray(qubits, dtype=int)
    return PauliString(len(idx), op.x_bits[idx], op.z_bits[idx])


@dataclass
class CircuitContext:
    """A circuit analyzed for error-equivalence comparisons."""

    circuit: Circuit
    data_qubits: list[int]
    code_stabilizers: list[PauliString]
    detectors: DetectorSet = field(init=False)
    syndromes: SyndromeMatrix = field(init=False)
    harmless: list[PauliString] = field(init=False)

    def __post_init__(self):
        n = self.circuit.n_qubits
        init = [p.copy() for p in self.code_stabilizers]
        data = set(self.data_qubits)
        init += [PauliString.single(n, q, "Z") for q in range(n) if q not in data]
        self.detectors = derive_detectors(self.circuit, init)
        self.syndromes = build_syndrome_matrix(self.circuit)
        self.harmless = end_time_group(self.circuit, self.data_qubits, self.code_stabilizers)

    def syndrome_of(self, e: np.ndarray) -> np.ndarray:
        return self.detectors.D.mul_vec(self.syndromes.omega.mul_vec(e))

    def reduced_output(self, e: np.ndarray) -> tuple[int, int, PauliString]:
        op = self.syndromes.combined_output(e)
        return min_weights_mod_group(op, self.harmless, self.data_qubits)


def check_ft_extraction(
    circuit: Circuit,
    w: int,
    data_qubits: list[int],
    code_stabilizers: list[PauliString],
) -> "ExtractionReport":
    """Exhaustively check the bounded-spread property of an extraction circuit.

    Every set of at most ``w`` enumerated errors must leave a residual whose X
    weight and Z weight on the data qubits are each at most ``w`` (weights
    minimized over the harmless end-of-circuit group).
    """
    sm = build_syndrome_matrix(circuit)
    group = end_time_group(circuit, data_qubits, code_stabilizers)
    e = len(sm.errors)
    violations = []
    checked = 0
    for size in range(1, w + 1):
        for combo in itertools.combinations(range(e), size):
            vec = np.zeros(e, dtype=np.uint8)
            vec[list(combo)] = 1
            wx, wz, rep = min_weights_mod_group(sm.combined_output(vec), group, data_qubits)
            checked += 1
            if wx > w or wz > w:
                violations.append(
                    ExtractionViolation(
                        error_ids=combo,
                        descriptions=tuple(sm.errors[i].describe() for i in combo),
                        x_weight=wx,
                        z_weight=wz,
                        residual=rep.label(),
                    )
                )
    return ExtractionReport(w=w, passed=not violations, checked_sets=checked, violations=violations)


@dataclass(frozen=True)
class ExtractionViolation:
    error_ids: tuple[int, ...]
    descriptions: tuple[str, ...]
    x_weight: int
    z_weight: int
    residual: str


@dataclass
class ExtractionReport:
    w: int
    passed: bool
    checked_sets: int
    violations: list[ExtractionViolation]


@dataclass(frozen=True)
class EquivalenceEntry:
    error_id: int
    description: str
    syndrome_bit: int
    subgroup: str  # "end_data" | "meas_error" | "input_data" | "end_plus_flip"
    pheno_errors: tuple[str, ...]
    flagged: bool  # flips a verification detector (restart semantics)


@dataclass
class EquivalenceReport:
    passed: bool
    entries: list[EquivalenceEntry]
    counterexamples: list[tuple[int, str]]


def pheno_reference_circuit(stabilizer: PauliString, data_qubits: list[int]) -> Circuit:
    """Single multi-qubit measurement of ``stabilizer`` on a bare data register."""
    n = len(data_qubits)
    c = Circuit(n)
    terms = []
    for local, q in enumerate(data_qubits):
        if stabilizer.x_bits[q] or stabilizer.z_bits[q]:
            letter = {(1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[
                (int(stabilizer.x_bits[q]), int(stabilizer.z_bits[q]))
            ]
            terms.append((letter, local))
    c.instructions.append(Instruction("MPP", tuple(q for _, q in terms), None, tuple(terms)))
    return c


def verify_extraction_equivalence(
    circuit: Circuit,
    stabilizer: PauliString,
    data_qubits: list[int],
    noise_p: float = 1e-3,
) -> EquivalenceReport:
    """Map every single circuit-level error to an equivalent set of
    phenomenological errors of the bare one-measurement circuit.

    Classification per error: trivial-syndrome errors reduce to end-of-circuit
    data errors; syndrome-flipping errors reduce to a measurement error, a
    data error at the start (anticommuting residual), or a data error at the
    end plus a measurement error (commuting residual). Fails with a
    counterexample when a residual exceeds single-qubit X/Z parts.
    """
    noisy = circuit if enumerate_errors(circuit) else with_circuit_level_noise(circuit, noise_p)
    sm = build_syndrome_matrix(noisy)
    group = end_time_group(noisy, data_qubits, [stabilizer])

    # Detector rows of the mixed-start run: the readout detector is the row
    # pivoted on the final measurement; any others act as verification flags.
    n = noisy.n_qubits
    init = [stabilizer.copy()]
    init += [PauliString.single(n, q, "Z") for q in range(n) if q not in set(data_qubits)]
    ds = derive_detectors(noisy, init)
    if ds.num_detectors == 0:
        raise ValueError("circuit has no deterministic readout to compare against")
    pivots = [max(np.flatnonzero(ds.D.row_bits(i))) for i in range(ds.num_detectors)]
    readout_row = int(np.argmax(pivots))
    readout = ds.D.row_bits(readout_row)
    verification_rows = [i for i in range(ds.num_detectors) if i != readout_row]

    entries = []
    counterexamples = []
    for loc in sm.errors:
        vec = np.zeros(len(sm.errors), dtype=np.uint8)
        vec[loc.id] = 1
        flips = sm.omega.mul_vec(vec)
        s = int(flips @ readout) % 2
        flagged = any(int(flips @ ds.D.row_bits(i)) % 2 for i in verification_rows)
        _, _, rep = min_weights_mod_group(sm.combined_output(vec), group, data_qubits)
        if rep.x_weight > 1 or rep.z_weight > 1:
            counterexamples.append(
                (loc.id, f"{loc.describe()} leaves {rep.label()} (X:{rep.x_weight}, Z:{rep.z_weight})")
            )
            continue
        anti = 1 - rep.commutes(restrict_to(stabilizer, data_qubits))
        pheno: list[str] = []
        if s == 0:
            subgroup = "end_data"
            pheno += [f"{p}(end)" for p in _qubit_terms(rep, data_qubits)]
        elif rep.is_identity():
            subgroup = "meas_error"
            pheno.append("flip(m1)")
        elif anti:
            subgroup = "input_data"
            pheno += [f"{p}(start)" for p in _qubit_terms(rep, data_qubits)]
        else:
            subgroup = "end_plus_flip"
            pheno += [f"{p}(end)" for p in _qubit_terms(rep, data_qubits)]
            pheno.append("flip(m1)")
        entries.append(
            EquivalenceEntry(
                error_id=loc.id,
                description=loc.describe(),
                syndrome_bit=s,
                subgroup=subgroup,
                pheno_errors=tuple(pheno),
                flagged=flagged,
            )
        )
    return EquivalenceReport(passed=not counterexamples, entries=entries, counterexamples=counterexamples)


def _qubit_terms(op: PauliString, data_qubits: list[int]) -> list[str]:
    """X/Z parts of a local residual, named by the original data qubit ids."""
    out = []
    for local, q in enumerate(data_qubits):
        if op.x_bits[local]:
            out.append(f"X{q}")
        if op.z_bits[local]:
            out.append(f"Z{q}")
    return out


def errors_equivalent(ctx1: CircuitContext, e1: np.ndarray, ctx2: CircuitContext, e2: np.ndarray) -> int:
    """1 iff the error sets have equal syndromes and equal residual operators.

    Residuals are compared on data qubits (in the order each context lists
    them) modulo each context's harmless group.
    """
    s1, s2 = ctx1.syndrome_of(e1), ctx2.syndrome_of(e2)
    if len(s1) != len(s2):
        raise ValueError(f"mismatched detector counts between contexts ({len(s1)} vs {len(s2)})")
    if len(ctx1.data_qubits) != len(ctx2.data_qubits):
        raise ValueError("contexts act on different data-qubit counts")
    if not np.array_equal(s1, s2):
        return 0
    op1 = ctx1.syndromes.combined_output(e1)
    op2 = ctx2.syndromes.combined_output(e2)
    # op1 ~ op2 iff op1 * op2 (mapped onto ctx1's data indexing) reduces to I
    # against the product of both harmless groups, restricted to data.
    diff_x = op1.x_bits[ctx1.data_qubits] ^ op2.x_bits[ctx2.data_qubits]
    diff_z = op1.z_bits[ctx1.data_qubits] ^ op2.z_bits[ctx2.data_qubits]
    k = len(ctx1.data_qubits)
    diff = PauliString(k, diff_x, diff_z)
    joint = [restrict_to(g, ctx1.data_qubits) for g in ctx1.harmless]
    joint += [restrict_to(g, ctx2.data_qubits) for g in ctx2.harmless]
    # Drop duplicates/identities to keep the enumeration small.
    seen = set()
    pruned = []
    for g in joint:
        key = (g.x_bits.tobytes(), g.z_bits.tobytes())
        if g.weight and key not in seen:
            seen.add(key)
            pruned.append(g)
    wx, wz, _ = min_weights_mod_group(diff, pruned, list(range(k)))
    return int(wx == 0 and wz == 0)
