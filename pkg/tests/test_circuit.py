import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from demkit.circuit import Circuit, Instruction, ObservableDecl, ParseError, parse, print_circuit

THREE_MEASUREMENT = """\
QUBITS 3
H 1
H 2
Z 2
CNOT 1 0
MZ 0
CNOT 2 1
MZ 1
MZ 2
"""


class TestParse:
    def test_worked_three_measurement_circuit(self):
        c = parse(THREE_MEASUREMENT)
        assert c.n_qubits == 3
        assert sum(1 for i in c.instructions if i.kind == "CNOT") == 2
        assert sum(1 for i in c.instructions if i.kind == "MZ") == 3
        assert c.num_measurements == 3
        assert c.declared_detectors is None

    def test_empty_input(self):
        c = parse("")
        assert c == Circuit(0)
        assert parse("  \n # just a comment\n") == Circuit(0)

    def test_duplicate_target_rejected(self):
        with pytest.raises(ParseError, match=r"2:8: duplicate target 0"):
            parse("QUBITS 2\nCNOT 0 0\n")

    def test_unknown_gate(self):
        with pytest.raises(ParseError, match="unknown instruction"):
            parse("QUBITS 1\nTOFFOLI 0\n")

    def test_target_out_of_range(self):
        with pytest.raises(ParseError, match="out of range"):
            parse("QUBITS 2\nH 2\n")

    def test_malformed_probability(self):
        with pytest.raises(ParseError, match="malformed probability"):
            parse("QUBITS 1\nMZ(huh) 0\n")
        with pytest.raises(ParseError, match=r"outside \[0, 1\]"):
            parse("QUBITS 1\nX_ERROR(1.5) 0\n")

    def test_error_positions_are_line_and_column(self):
        with pytest.raises(ParseError) as err:
            parse("QUBITS 2\nH 0\nCNOT 0 3\n")
        assert str(err.value).startswith("3:8:")

    def test_measurement_reference_bounds(self):
        with pytest.raises(ParseError, match="m4 exceeds 3"):
            parse("QUBITS 1\nMZ 0\nMZ 0\nMZ 0\nDETECTOR m1 m4\n")

    def test_noise_requires_probability(self):
        with pytest.raises(ParseError, match="requires a probability"):
            parse("QUBITS 1\nX_ERROR 0\n")

    def test_mpp_parses_sorted_product(self):
        c = parse("QUBITS 4\nMPP(0.01) Z3*Z1\n")
        (ins,) = c.instructions
        assert ins.pauli_terms == (("Z", 1), ("Z", 3))
        assert ins.prob == 0.01

    def test_detector_and_observable_declarations(self):
        c = parse("QUBITS 1\nMZ 0\nMZ 0\nDETECTOR m1 m2\nOBSERVABLE m1\n")
        assert c.declared_detectors is not None
        assert c.declared_detectors[0].measurements == (1, 2)
        assert c.declared_observables == [ObservableDecl((1,))]


class TestPrint:
    def test_empty_circuit(self):
        assert print_circuit(Circuit(0)) == "QUBITS 0\n"

    def test_round_trip_of_worked_example(self):
        c = parse(THREE_MEASUREMENT)
        assert parse(print_circuit(c)) == c

    def test_golden_memory_fixture(self, pytestconfig):
        path = pytestconfig.rootpath / "fixtures" / "repcode_memory.qc"
        text = path.read_text()
        assert print_circuit(parse(text)) == text


def random_circuit(rng: np.random.Generator) -> Circuit:
    n = int(rng.integers(1, 9))
    c = Circuit(n)
    n_meas = 0
    for _ in range(int(rng.integers(0, 21))):
        kind = str(
            rng.choice(
                ["H", "S", "X", "CNOT", "CZ", "R", "MZ", "MX", "MPP", "TICK", "X_ERROR", "DEPOLARIZE1", "DEPOLARIZE2"]
            )
        )
        if kind == "TICK":
            c.instructions.append(Instruction("TICK"))
        elif kind in ("CNOT", "CZ", "DEPOLARIZE2"):
            if n < 2:
                continue
            a, b = map(int, rng.choice(n, size=2, replace=False))
            prob = round(float(rng.random()), 6) if kind == "DEPOLARIZE2" else None
            c.instructions.append(Instruction(kind, (a, b), prob))
        elif kind in ("X_ERROR", "DEPOLARIZE1"):
            k = int(rng.integers(1, n + 1))
            targets = tuple(int(q) for q in rng.choice(n, size=k, replace=False))
            c.instructions.append(Instruction(kind, targets, round(float(rng.random()), 6)))
        elif kind == "MPP":
            k = int(rng.integers(1, n + 1))
            qubits = sorted(int(q) for q in rng.choice(n, size=k, replace=False))
            terms = tuple((str(rng.choice(["X", "Y", "Z"])), q) for q in qubits)
            prob = round(float(rng.random()), 6) if rng.random() < 0.5 else None
            c.instructions.append(Instruction("MPP", tuple(qubits), prob, terms))
            n_meas += 1
        elif kind in ("MZ", "MX"):
            prob = round(float(rng.random()), 6) if rng.random() < 0.5 else None
            c.instructions.append(Instruction(kind, (int(rng.integers(n)),), prob))
            n_meas += 1
        else:
            c.instructions.append(Instruction(kind, (int(rng.integers(n)),)))
    if n_meas:
        k = int(rng.integers(1, n_meas + 1))
        c.declared_observables.append(
            ObservableDecl(tuple(sorted(int(m) + 1 for m in rng.choice(n_meas, size=k, replace=False))))
        )
    return c


class TestRoundTripProperty:
    def test_round_trip_on_200_random_circuits(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            c = random_circuit(rng)
            assert parse(print_circuit(c)) == c

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50)
    def test_round_trip_hypothesis_seeds(self, seed):
        c = random_circuit(np.random.default_rng(seed))
        assert parse(print_circuit(c)) == c

    def test_measurement_indexing_stable_under_tick_insertion(self):
        c = parse("QUBITS 2\nMZ 0\nMZ 1\nDETECTOR m1 m2\n")
        ticked = parse("QUBITS 2\nTICK\nMZ 0\nTICK\nMZ 1\nTICK\nDETECTOR m1 m2\n")
        assert [i for i, _ in c.measurement_instructions()] == [
            i for i, _ in ticked.measurement_instructions()
        ]
