"""Circuit data model and line-oriented text format.

Grammar (one instruction per line, ``#`` starts a comment)::

    QUBITS n
    H q | S q | X q | Y q | Z q
    CNOT q1 q2 | CZ q1 q2
    R q
    MZ[(p)] q | MX[(p)] q
    MPP[(p)] Z0*Z1*...
    X_ERROR(p) q ... | Y_ERROR(p) q ... | Z_ERROR(p) q ...
    DEPOLARIZE1(p) q ... | DEPOLARIZE2(p) q1 q2
    DETECTOR m3 m4
    OBSERVABLE m5
    TICK

Measurement references are 1-based absolute indices (``m1`` is the first
measurement in program order). Parse errors carry ``line:col``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .pauli import PauliString

GATE_KINDS = ("H", "S", "X", "Y", "Z", "CNOT", "CZ")
MEASUREMENT_KINDS = ("MZ", "MX", "MPP")
NOISE_KINDS = ("X_ERROR", "Y_ERROR", "Z_ERROR", "DEPOLARIZE1", "DEPOLARIZE2")
TWO_QUBIT_GATES = ("CNOT", "CZ")


class ParseError(ValueError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Instruction:
    """One circuit line: a gate, reset, measurement, noise channel, or TICK.

    ``prob`` is the measurement flip probability for MZ/MX/MPP and the channel
    probability for noise kinds. ``pauli_terms`` holds MPP terms as
    ``(letter, qubit)`` pairs sorted by qubit.
    """

    kind: str
    targets: tuple[int, ...] = ()
    prob: float | None = None
    pauli_terms: tuple[tuple[str, int], ...] = ()

    def mpp_pauli(self, n: int) -> PauliString:
        label = "*".join(f"{k}{q}" for k, q in self.pauli_terms)
        return PauliString.from_label(label, n)

    @property
    def is_measurement(self) -> bool:
        return self.kind in MEASUREMENT_KINDS

    @property
    def is_noise(self) -> bool:
        return self.kind in NOISE_KINDS


@dataclass(frozen=True)
class ObservableDecl:
    measurements: tuple[int, ...]  # 1-based, ascending
    b: int = 0


@dataclass(frozen=True)
class DetectorDecl:
    measurements: tuple[int, ...]
    b: int = 0


@dataclass
class Circuit:
    n_qubits: int
    instructions: list[Instruction] = field(default_factory=list)
    declared_observables: list[ObservableDecl] = field(default_factory=list)
    declared_detectors: list[DetectorDecl] | None = None

    @property
    def num_measurements(self) -> int:
        return sum(1 for ins in self.instructions if ins.is_measurement)

    def measurement_instructions(self) -> list[tuple[int, Instruction]]:
        """(1-based measurement index, instruction) pairs in program order."""
        out = []
        k = 0
        for ins in self.instructions:
            if ins.is_measurement:
                k += 1
                out.append((k, ins))
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and self.instructions == other.instructions
            and self.declared_observables == other.declared_observables
            and self.declared_detectors == other.declared_detectors
        )


def parse(text: str) -> Circuit:
    lines = text.split("\n")
    tokens_by_line: list[tuple[int, list[tuple[int, str]]]] = []
    for lineno, raw in enumerate(lines, start=1):
        body = raw.split("#", 1)[0]
        toks: list[tuple[int, str]] = []
        col = 1
        for part in body.split(" "):
            if part.strip():
                toks.append((col, part.strip()))
            col += len(part) + 1
        if toks:
            tokens_by_line.append((lineno, toks))

    if not tokens_by_line:
        return Circuit(0)

    lineno, toks = tokens_by_line[0]
    if toks[0][1] != "QUBITS":
        raise ParseError(lineno, toks[0][0], f"expected QUBITS header, got {toks[0][1]!r}")
    if len(toks) != 2:
        raise ParseError(lineno, toks[0][0], "QUBITS takes exactly one count")
    n_qubits = _parse_count(lineno, toks[1])

    circuit = Circuit(n_qubits)
    n_meas = 0
    detector_lines: list[DetectorDecl] = []
    saw_detector = False
    decl_positions: list[tuple[int, int, int]] = []  # (max ref, line, col)

    for lineno, toks in tokens_by_line[1:]:
        col0, head = toks[0]
        name, prob = _split_head(lineno, col0, head)
        args = toks[1:]

        if name == "QUBITS":
            raise ParseError(lineno, col0, "duplicate QUBITS header")
        if name == "TICK":
            _no_prob(lineno, col0, name, prob)
            if args:
                raise ParseError(lineno, args[0][0], "TICK takes no arguments")
            circuit.instructions.append(Instruction("TICK"))
        elif name in GATE_KINDS or name == "R":
            _no_prob(lineno, col0, name, prob)
            want = 2 if name in TWO_QUBIT_GATES else 1
            targets = _parse_targets(lineno, name, args, n_qubits, exactly=want)
            circuit.instructions.append(Instruction(name, targets))
        elif name in ("MZ", "MX"):
            _check_prob(lineno, col0, prob)
            targets = _parse_targets(lineno, name, args, n_qubits, exactly=1)
            circuit.instructions.append(Instruction(name, targets, prob))
            n_meas += 1
        elif name == "MPP":
            _check_prob(lineno, col0, prob)
            if len(args) != 1:
                raise ParseError(lineno, col0, "MPP takes one Pauli product")
            terms = _parse_pauli_product(lineno, args[0], n_qubits)
            targets = tuple(q for _, q in terms)
            circuit.instructions.append(Instruction("MPP", targets, prob, terms))
            n_meas += 1
        elif name in NOISE_KINDS:
            if prob is None:
                raise ParseError(lineno, col0, f"{name} requires a probability")
            _check_prob(lineno, col0, prob)
            want = 2 if name == "DEPOLARIZE2" else None
            targets = _parse_targets(lineno, name, args, n_qubits, exactly=want, at_least=1)
            circuit.instructions.append(Instruction(name, targets, prob))
        elif name == "DETECTOR":
            _no_prob(lineno, col0, name, prob)
            saw_detector = True
            refs = _parse_meas_refs(lineno, name, args)
            detector_lines.append(DetectorDecl(refs))
            decl_positions.append((max(refs), lineno, col0))
        elif name == "OBSERVABLE":
            _no_prob(lineno, col0, name, prob)
            refs = _parse_meas_refs(lineno, name, args)
            circuit.declared_observables.append(ObservableDecl(refs))
            decl_positions.append((max(refs), lineno, col0))
        else:
            raise ParseError(lineno, col0, f"unknown instruction {name!r}")

    for max_ref, lineno, col in decl_positions:
        if max_ref > n_meas:
            raise ParseError(lineno, col, f"measurement reference m{max_ref} exceeds {n_meas} measurements")
    if saw_detector:
        circuit.declared_detectors = detector_lines
    return circuit


def print_circuit(circuit: Circuit) -> str:
    """Canonical text form; ``parse(print_circuit(c)) == c``."""
    out = [f"QUBITS {circuit.n_qubits}"]
    for ins in circuit.instructions:
        out.append(_format_instruction(ins))
    for det in circuit.declared_detectors or []:
        out.append("DETECTOR " + " ".join(f"m{m}" for m in det.measurements))
    for obs in circuit.declared_observables:
        out.append("OBSERVABLE " + " ".join(f"m{m}" for m in obs.measurements))
    return "\n".join(out) + "\n"


def _format_instruction(ins: Instruction) -> str:
    head = ins.kind
    if ins.prob is not None:
        head += f"({ins.prob!r})"
    if ins.kind == "MPP":
        return f"{head} " + "*".join(f"{k}{q}" for k, q in ins.pauli_terms)
    if ins.targets:
        return f"{head} " + " ".join(str(q) for q in ins.targets)
    return head


def _split_head(lineno: int, col: int, head: str) -> tuple[str, float | None]:
    if "(" not in head:
        return head, None
    if not head.endswith(")"):
        raise ParseError(lineno, col, f"malformed probability in {head!r}")
    name, arg = head[:-1].split("(", 1)
    try:
        prob = float(arg)
    except ValueError:
        raise ParseError(lineno, col, f"malformed probability {arg!r}") from None
    return name, prob


def _check_prob(lineno: int, col: int, prob: float | None) -> None:
    if prob is not None and not 0.0 <= prob <= 1.0:
        raise ParseError(lineno, col, f"probability {prob} outside [0, 1]")


def _no_prob(lineno: int, col: int, name: str, prob: float | None) -> None:
    if prob is not None:
        raise ParseError(lineno, col, f"{name} takes no probability")


def _parse_count(lineno: int, tok: tuple[int, str]) -> int:
    col, text = tok
    if not text.isdigit():
        raise ParseError(lineno, col, f"expected count, got {text!r}")
    return int(text)


def _parse_targets(lineno, name, args, n_qubits, exactly=None, at_least=None) -> tuple[int, ...]:
    if exactly is not None and len(args) != exactly:
        raise ParseError(lineno, args[0][0] if args else 1, f"{name} takes exactly {exactly} target(s)")
    if at_least is not None and len(args) < at_least:
        raise ParseError(lineno, 1, f"{name} takes at least {at_least} target(s)")
    targets = []
    for col, tok in args:
        if not tok.isdigit():
            raise ParseError(lineno, col, f"expected qubit index, got {tok!r}")
        q = int(tok)
        if q >= n_qubits:
            raise ParseError(lineno, col, f"target {q} out of range (QUBITS {n_qubits})")
        if q in targets:
            raise ParseError(lineno, col, f"duplicate target {q}")
        targets.append(q)
    return tuple(targets)


def _parse_pauli_product(lineno: int, arg: tuple[int, str], n_qubits: int) -> tuple[tuple[str, int], ...]:
    col, text = arg
    terms = []
    seen = set()
    for part in text.split("*"):
        if len(part) < 2 or part[0].upper() not in "XYZ" or not part[1:].isdigit():
            raise ParseError(lineno, col, f"bad Pauli term {part!r}")
        q = int(part[1:])
        if q >= n_qubits:
            raise ParseError(lineno, col, f"target {q} out of range (QUBITS {n_qubits})")
        if q in seen:
            raise ParseError(lineno, col, f"duplicate qubit {q} in Pauli product")
        seen.add(q)
        terms.append((part[0].upper(), q))
    return tuple(sorted(terms, key=lambda t: t[1]))


def _parse_meas_refs(lineno, name, args) -> tuple[int, ...]:
    if not args:
        raise ParseError(lineno, 1, f"{name} needs at least one measurement reference")
    refs = []
    for col, tok in args:
        if not tok.startswith("m") or not tok[1:].isdigit() or int(tok[1:]) < 1:
            raise ParseError(lineno, col, f"expected measurement reference like m3, got {tok!r}")
        m = int(tok[1:])
        if m in refs:
            raise ParseError(lineno, col, f"duplicate measurement reference m{m}")
        refs.append(m)
    return tuple(sorted(refs))
