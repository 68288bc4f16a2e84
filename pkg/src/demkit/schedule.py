"""Measurement schedules, phenomenological noise, and fault-tolerance checks.

A schedule is verified by exhausting every error set of weight at most t over
the merged phenomenological error model, bucketing by syndrome, and searching
each bucket for one correction valid for all members. Corrections are
searched over {first member's output XOR v : |v| <= t}; this is complete
because any valid correction lies within stabilizer-adjusted Hamming distance
t of every member's output, and validity only depends on the correction's
coset modulo the dual-basis stabilizer group.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Instruction
from .dem import DetectorErrorModel, build_dem, merge_equivalent
from .pauli import PauliString

SUBSET_BUDGET = 20_000_000
STABILIZER_SPAN_LIMIT = 1 << 16


@dataclass
class MeasurementSchedule:
    n: int  # data qubits
    rounds: list[list[PauliString]]
    code_stabilizers: list[PauliString]
    basis: str = "Z"

    def __post_init__(self):
        if self.basis not in ("Z", "X"):
            raise ValueError("basis must be Z or X")
        for r, products in enumerate(self.rounds, start=1):
            used: set[int] = set()
            for p in products:
                support = set(np.flatnonzero(p.x_bits | p.z_bits))
                if used & support:
                    raise ValueError(f"round {r} measures overlapping qubit sets")
                used |= support
                for s in self.code_stabilizers:
                    if not p.commutes(s):
                        raise ValueError(f"round {r} product anticommutes with a code stabilizer")

    @property
    def num_measurements(self) -> int:
        return sum(len(r) for r in self.rounds)

    def dual_basis_supports(self) -> list[np.ndarray]:
        """Supports of code stabilizers in the opposite basis (for weight
        minimization of residual errors)."""
        want_x = self.basis == "Z"
        out = []
        for s in self.code_stabilizers:
            if want_x and s.x_weight and not s.z_weight:
                out.append(s.x_bits.copy())
            elif not want_x and s.z_weight and not s.x_weight:
                out.append(s.z_bits.copy())
        return out


@dataclass
class ExpandedSchedule:
    schedule: MeasurementSchedule
    circuit: Circuit
    dem: DetectorErrorModel  # merged; klasses and outputs populated

    def column_output(self, j: int) -> np.ndarray:
        if self.schedule.basis == "Z":
            return self.dem.output_x[j]
        return self.dem.output_z[j]


def expand_schedule(
    schedule: MeasurementSchedule, p_data: float = 0.01, p_meas: float = 0.01
) -> ExpandedSchedule:
    """Phenomenological circuit: data errors before every round, a flip on
    every measurement; equivalent locations merged.

    Error columns list data errors round by round first, then measurement
    flips, matching the conventional condensed-model numbering."""
    from dataclasses import replace as _replace

    from .dem import build
    from .detectors import derive_detectors
    from .frames import build_syndrome_matrix, enumerate_errors

    error_kind = "X_ERROR" if schedule.basis == "Z" else "Z_ERROR"
    c = Circuit(schedule.n)
    for products in schedule.rounds:
        c.instructions.append(Instruction(error_kind, tuple(range(schedule.n)), p_data))
        for p in products:
            terms = tuple(
                ({(1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[(int(p.x_bits[q]), int(p.z_bits[q]))], q)
                for q in np.flatnonzero(p.x_bits | p.z_bits)
            )
            c.instructions.append(Instruction("MPP", tuple(q for _, q in terms), p_meas, terms))
        c.instructions.append(Instruction("TICK"))
    locations = enumerate_errors(c)
    ordered = [loc for loc in locations if not loc.is_meas_flip]
    ordered += [loc for loc in locations if loc.is_meas_flip]
    ordered = [_replace(loc, id=i) for i, loc in enumerate(ordered)]
    ds = derive_detectors(c, schedule.code_stabilizers)
    sm = build_syndrome_matrix(c, ordered)
    dem = merge_equivalent(build(ds, sm))
    return ExpandedSchedule(schedule=schedule, circuit=c, dem=dem)


@dataclass(frozen=True)
class BucketMember:
    columns: tuple[int, ...]
    output: int  # packed qubit-parity vector
    n_internal: int
    labels: tuple[str, ...]


@dataclass
class FTReport:
    ft: bool
    t: int
    corrections: dict[tuple[int, ...], np.ndarray]  # syndrome bits -> correction vector
    counterexamples: list[tuple[BucketMember, BucketMember]]
    buckets_checked: int = 0
    sets_checked: int = 0

    @property
    def verdict(self) -> str:
        return "FT" if self.ft else "not-FT"

    def correction_for(self, syndrome_bits) -> np.ndarray | None:
        return self.corrections.get(tuple(int(b) for b in syndrome_bits))


def _distance_table(n: int, supports: list[np.ndarray]) -> np.ndarray:
    """dist[v] = min Hamming weight of v XOR any element of span(supports)."""
    if n > 22:
        raise ValueError(f"output space 2^{n} too large to tabulate")
    if (1 << len(supports)) > STABILIZER_SPAN_LIMIT:
        raise ValueError("stabilizer span too large to enumerate")
    size = 1 << n
    if not supports:
        return np.bitwise_count(np.arange(size, dtype=np.uint32)).astype(np.uint8)
    span = {0}
    for s in supports:
        packed = _pack(s)
        span |= {v ^ packed for v in span}
    dist = np.full(size, 255, dtype=np.uint8)
    frontier = np.array(sorted(span), dtype=np.int64)
    dist[frontier] = 0
    level = 0
    flips = (1 << np.arange(n, dtype=np.int64))
    while frontier.size:
        level += 1
        neighbors = np.unique((frontier[:, None] ^ flips[None, :]).ravel())
        fresh = neighbors[dist[neighbors] == 255]
        dist[fresh] = level
        frontier = fresh
    return dist


def _pack(bits: np.ndarray) -> int:
    acc = 0
    for i in np.flatnonzero(bits):
        acc |= 1 << int(i)
    return acc


def _unpack(value: int, n: int) -> np.ndarray:
    return np.array([(value >> q) & 1 for q in range(n)], dtype=np.uint8)


def verify_ft(schedule: MeasurementSchedule, t: int, budget: int = SUBSET_BUDGET) -> FTReport:
    """Exhaustive fault-tolerance verdict for error weight up to ``t``.

    Error sets are enumerated over distinct merged columns (multiplicities
    beyond parity only add internal budget, so this is exhaustive), with each
    merged column standing for its fewest-internal representative.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    expanded = expand_schedule(schedule)
    dem = expanded.dem
    e = dem.num_errors
    total = sum(math.comb(e, k) for k in range(t + 1))
    if total > budget:
        raise ValueError(f"search of {total} error sets exceeds budget {budget}")

    n = schedule.n
    dist = _distance_table(n, schedule.dual_basis_supports())
    col_syndrome = [_pack(dem.H.column_bits(j)) for j in range(e)]
    col_output = [_pack(expanded.column_output(j)) for j in range(e)]
    col_internal = [1 if dem.klasses[j] == "internal" else 0 for j in range(e)]

    buckets: dict[int, list[BucketMember]] = {}
    sets_checked = 0
    for size in range(t + 1):
        for combo in itertools.combinations(range(e), size):
            s = 0
            out = 0
            internal = 0
            for j in combo:
                s ^= col_syndrome[j]
                out ^= col_output[j]
                internal += col_internal[j]
            sets_checked += 1
            buckets.setdefault(s, []).append(
                BucketMember(
                    columns=combo,
                    output=out,
                    n_internal=internal,
                    labels=tuple(f"{dem.klasses[j]}:{dem.descriptions[j]}" for j in combo),
                )
            )

    corrections: dict[tuple[int, ...], np.ndarray] = {}
    counterexamples: list[tuple[BucketMember, BucketMember]] = []
    candidate_offsets = [0] + [
        _pack_combo(combo) for w in range(1, t + 1) for combo in itertools.combinations(range(n), w)
    ]

    def find_correction(members: list[BucketMember]) -> int | None:
        base = members[0].output
        for off in candidate_offsets:
            c = base ^ off
            if all(dist[c ^ m.output] <= m.n_internal for m in members):
                return c
        return None

    ft = True
    for s, members in sorted(buckets.items()):
        c = find_correction(members)
        if c is None:
            ft = False
            bad_pairs = [
                (a, b)
                for a, b in itertools.combinations(members, 2)
                if find_correction([a, b]) is None
            ]
            if not bad_pairs and len(members) >= 2:
                bad_pairs = [(members[0], members[1])]  # jointly unsatisfiable bucket
            counterexamples.extend(bad_pairs)
        else:
            corrections[_syndrome_key(s, dem.num_detectors)] = _unpack(c, n)

    # soundness replay: every stored correction satisfies every bucket member
    for s, members in buckets.items():
        key = _syndrome_key(s, dem.num_detectors)
        if key in corrections:
            c = _pack(corrections[key])
            assert all(dist[c ^ m.output] <= m.n_internal for m in members)

    return FTReport(
        ft=ft,
        t=t,
        corrections=corrections,
        counterexamples=counterexamples,
        buckets_checked=len(buckets),
        sets_checked=sets_checked,
    )


def _pack_combo(combo: tuple[int, ...]) -> int:
    acc = 0
    for q in combo:
        acc |= 1 << q
    return acc


def _syndrome_key(packed: int, num_detectors: int) -> tuple[int, ...]:
    return tuple((packed >> i) & 1 for i in range(num_detectors))


def dualize(schedule: MeasurementSchedule) -> MeasurementSchedule:
    """Swap the measured basis; requires a self-dual stabilizer set."""
    x_set = {
        frozenset(np.flatnonzero(s.x_bits).tolist())
        for s in schedule.code_stabilizers
        if s.x_weight and not s.z_weight
    }
    z_set = {
        frozenset(np.flatnonzero(s.z_bits).tolist())
        for s in schedule.code_stabilizers
        if s.z_weight and not s.x_weight
    }
    if x_set != z_set:
        raise ValueError("code is not marked self-dual; cannot dualize")
    new_rounds = [[_swap_basis(p) for p in products] for products in schedule.rounds]
    return MeasurementSchedule(
        n=schedule.n,
        rounds=new_rounds,
        code_stabilizers=[p.copy() for p in schedule.code_stabilizers],
        basis="X" if schedule.basis == "Z" else "Z",
    )


def _swap_basis(p: PauliString) -> PauliString:
    return PauliString(p.n, p.z_bits.copy(), p.x_bits.copy())


# -- .sched file format ---------------------------------------------------------


def parse_schedule(text: str) -> MeasurementSchedule:
    n: int | None = None
    basis = "Z"
    stabilizers: list[PauliString] = []
    rounds: list[list[PauliString]] = []
    section = None
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "QUBITS":
            n = int(rest[0])
        elif head == "BASIS":
            basis = rest[0]
        elif head == "STABILIZERS":
            section = "stabilizers"
        elif head == "ROUND":
            section = "round"
            rounds.append([])
        elif head == "MPP":
            if section != "round" or n is None:
                raise ValueError(f"line {lineno}: MPP outside a ROUND block")
            rounds[-1].append(PauliString.from_label(rest[0], n))
        elif section == "stabilizers":
            if n is None:
                raise ValueError(f"line {lineno}: STABILIZERS before QUBITS")
            stabilizers.append(PauliString.from_label(line, n))
        else:
            raise ValueError(f"line {lineno}: unexpected {head!r}")
    if n is None:
        raise ValueError("missing QUBITS header")
    return MeasurementSchedule(n=n, rounds=rounds, code_stabilizers=stabilizers, basis=basis)


def print_schedule(schedule: MeasurementSchedule) -> str:
    out = [f"QUBITS {schedule.n}", f"BASIS {schedule.basis}"]
    if schedule.code_stabilizers:
        out.append("STABILIZERS")
        out += [p.label() for p in schedule.code_stabilizers]
    for products in schedule.rounds:
        out.append("ROUND")
        out += [f"MPP {p.label()}" for p in products]
    return "\n".join(out) + "\n"


def schedule_from_code(code, round_supports: list[list[tuple[int, ...]]], basis: str = "Z") -> MeasurementSchedule:
    """Build a schedule measuring the given supports in the given basis."""
    letter = basis
    rounds = [
        [PauliString.from_label("*".join(f"{letter}{q}" for q in sorted(s)), code.n) for s in supports]
        for supports in round_supports
    ]
    return MeasurementSchedule(
        n=code.n,
        rounds=rounds,
        code_stabilizers=code.all_stabilizers(),
        basis=basis,
    )
