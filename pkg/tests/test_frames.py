import numpy as np
import pytest

from demkit.circuit import parse, print_circuit
from demkit.detectors import derive_detectors, measurement_operator
from demkit.frames import (
    CircuitContext,
    build_syndrome_matrix,
    check_ft_extraction,
    enumerate_errors,
    errors_equivalent,
    min_weights_mod_group,
    verify_extraction_equivalence,
    with_circuit_level_noise,
)
from demkit.gf2 import BitMatrix
from demkit.pauli import PauliString

from matrix_fixtures import OMEGA1
from statevector_oracle import StateVector

DETECTOR_EXAMPLE = open("fixtures/repcode_detector_example.qc").read()


class TestEnumerateErrors:
    def test_eight_marked_locations(self):
        errs = enumerate_errors(parse(DETECTOR_EXAMPLE))
        assert len(errs) == 8
        assert [e.describe() for e in errs] == ["X0", "X1", "X2", "X3", "X4", "X0", "X1", "X2"]

    def test_depolarizing_expansion_triples_count(self):
        base = parse(DETECTOR_EXAMPLE)
        tripled = parse(print_circuit(base).replace("X_ERROR", "DEPOLARIZE1"))
        assert len(enumerate_errors(tripled)) == 24

    def test_noiseless_circuit(self):
        assert enumerate_errors(parse("QUBITS 2\nH 0\nMZ 0\n")) == []

    def test_two_qubit_depolarizing_order(self):
        errs = enumerate_errors(parse("QUBITS 2\nCNOT 0 1\nDEPOLARIZE2(0.15) 0 1\n"))
        assert len(errs) == 15
        assert errs[0].describe() == "X1"  # IX: identity on first target
        assert errs[3].describe() == "X0"  # XI
        assert errs[4].describe() == "X0*X1"  # XX
        assert errs[-1].describe() == "Z0*Z1"  # ZZ
        assert all(abs(e.prob - 0.01) < 1e-12 for e in errs)

    def test_input_classification(self):
        # everything strictly before the first measurement counts as input
        errs = enumerate_errors(parse(DETECTOR_EXAMPLE))
        assert [e.klass for e in errs] == ["input"] * 4 + ["internal"] * 4


class TestSyndromeMatrix:
    def test_matches_reference_bit_for_bit(self):
        c = parse(DETECTOR_EXAMPLE)
        sm = build_syndrome_matrix(c)
        assert sm.omega == BitMatrix.from_array(OMEGA1)

    def test_first_error_propagates_to_weight_two_operator(self):
        sm = build_syndrome_matrix(parse(DETECTOR_EXAMPLE))
        op = sm.output_op(0)
        assert op.label() == "X0*X3"  # data qubit and the first auxiliary
        assert op.weight == 2
        assert sm.omega.get(0, 0) == 1

    def test_measurement_flip_is_unit_column_with_identity_output(self):
        c = parse("QUBITS 2\nMZ 0\nMZ(0.01) 1\nMZ 0\n")
        sm = build_syndrome_matrix(c)
        assert len(sm.errors) == 1
        assert sm.omega.column_bits(0).tolist() == [0, 1, 0]
        assert sm.output_op(0).is_identity()

    def test_dimensions(self):
        c = parse(DETECTOR_EXAMPLE)
        sm = build_syndrome_matrix(c)
        assert sm.omega.cols == len(enumerate_errors(c))
        assert sm.omega.rows == c.num_measurements

    def test_linearity_of_syndromes_and_outputs(self):
        rng = np.random.default_rng(17)
        c = parse(DETECTOR_EXAMPLE)
        sm = build_syndrome_matrix(c)
        e = sm.omega.cols
        for _ in range(50):
            e1 = rng.integers(0, 2, size=e, dtype=np.uint8)
            e2 = rng.integers(0, 2, size=e, dtype=np.uint8)
            both = sm.omega.mul_vec(e1 ^ e2)
            assert np.array_equal(both, sm.omega.mul_vec(e1) ^ sm.omega.mul_vec(e2))
            o12 = sm.combined_output(e1 ^ e2)
            o1, o2 = sm.combined_output(e1), sm.combined_output(e2)
            assert np.array_equal(o12.x_bits, o1.x_bits ^ o2.x_bits)
            assert np.array_equal(o12.z_bits, o1.z_bits ^ o2.z_bits)

    @pytest.mark.parametrize("seed", range(12))
    def test_single_error_flips_match_statevector(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 5))
        lines = [f"QUBITS {n}"]
        for _ in range(int(rng.integers(3, 9))):
            roll = rng.random()
            if roll < 0.35 and n >= 2:
                a, b = map(int, rng.choice(n, size=2, replace=False))
                lines.append(f"CNOT {a} {b}")
                lines.append(f"DEPOLARIZE2(0.1) {a} {b}")
            elif roll < 0.6:
                q = int(rng.integers(n))
                lines.append(f"H {q}")
                lines.append(f"DEPOLARIZE1(0.1) {q}")
            else:
                q = int(rng.integers(n))
                lines.append(f"MZ(0.1) {q}")
        c = parse("\n".join(lines) + "\n")
        if c.num_measurements == 0:
            return
        sm = build_syndrome_matrix(c)
        reference = _oracle_reference_run(c, np.random.default_rng(999))
        for loc in sm.errors:
            expected = reference ^ sm.omega.column_bits(loc.id)
            _oracle_check_consistent(c, loc, expected)


def _oracle_reference_run(circuit, rng):
    sv = StateVector(circuit.n_qubits)
    outcomes = []
    for ins in circuit.instructions:
        if ins.kind == "TICK" or ins.is_noise:
            continue
        if ins.kind == "R":
            sv.reset(ins.targets[0])
        elif ins.is_measurement:
            op = measurement_operator(ins, circuit.n_qubits)
            ev = sv.pauli_eigenvalue(op.x_bits, op.z_bits)
            if ev is None:
                bit = int(rng.integers(2))
                sv.project_pauli(op.x_bits, op.z_bits, bit)
            else:
                bit = 0 if ev == 1 else 1
            outcomes.append(bit)
        else:
            sv.apply_gate(ins.kind, ins.targets)
    return np.array(outcomes, dtype=np.uint8)


def _oracle_check_consistent(circuit, error_loc, expected):
    """Assert the errored run can realize ``expected`` outcomes: deterministic
    measurements must match exactly and random ones must be reachable."""
    sv = StateVector(circuit.n_qubits)
    k = 0
    for i, ins in enumerate(circuit.instructions):
        if not error_loc.is_meas_flip and error_loc.position == i:
            sv.amps = sv.apply_pauli(error_loc.pauli.x_bits, error_loc.pauli.z_bits)
        if ins.kind == "TICK" or ins.is_noise:
            continue
        if ins.kind == "R":
            sv.reset(ins.targets[0])
        elif ins.is_measurement:
            k += 1
            bit = int(expected[k - 1])
            if error_loc.is_meas_flip and error_loc.measurement == k:
                bit ^= 1  # physical branch differs from the recorded value
            op = measurement_operator(ins, circuit.n_qubits)
            ev = sv.pauli_eigenvalue(op.x_bits, op.z_bits)
            if ev is not None:
                assert bit == (0 if ev == 1 else 1), (error_loc, k)
            else:
                sv.project_pauli(op.x_bits, op.z_bits, bit)
        else:
            sv.apply_gate(ins.kind, ins.targets)


BARE_EXTRACTION = """\
QUBITS 5
CNOT 0 4
CNOT 1 4
CNOT 2 4
CNOT 3 4
MZ 4
"""


class TestCheckFtExtraction:
    def test_bare_extraction_has_hook_errors(self):
        c = with_circuit_level_noise(parse(BARE_EXTRACTION), 0.001)
        stab = PauliString.from_label("Z0*Z1*Z2*Z3", 5)
        report = check_ft_extraction(c, 1, [0, 1, 2, 3], [stab])
        assert not report.passed
        descriptions = {v.descriptions for v in report.violations}
        assert any("Z" in d[0] and v.z_weight == 2 for v in report.violations for d in [v.descriptions])

    def test_empty_circuit_passes(self):
        report = check_ft_extraction(parse("QUBITS 4\n"), 1, [0, 1, 2, 3], [])
        assert report.passed and report.checked_sets == 0

    def test_min_weights_mod_group(self):
        stab = PauliString.from_label("Z0*Z1*Z2*Z3", 4)
        op = PauliString.from_label("Z0*Z1*Z2", 4)
        wx, wz, rep = min_weights_mod_group(op, [stab], [0, 1, 2, 3])
        assert (wx, wz) == (0, 1)
        assert rep.label() == "Z3"


class TestErrorsEquivalent:
    def test_identical_errors_in_same_circuit(self):
        c = parse(DETECTOR_EXAMPLE)
        ctx = CircuitContext(c, data_qubits=[0, 1, 2], code_stabilizers=[])
        e = np.zeros(8, dtype=np.uint8)
        e[1] = 1
        assert errors_equivalent(ctx, e, ctx, e.copy()) == 1

    def test_detector_count_mismatch_raises(self):
        c1 = parse(DETECTOR_EXAMPLE)
        ctx1 = CircuitContext(c1, data_qubits=[0, 1, 2], code_stabilizers=[])
        c2 = parse("QUBITS 3\nX_ERROR(0.1) 0\nMZ 0\n")
        ctx2 = CircuitContext(c2, data_qubits=[0, 1, 2], code_stabilizers=[])
        with pytest.raises(ValueError, match="mismatched detector counts"):
            errors_equivalent(ctx1, np.zeros(8, dtype=np.uint8), ctx2, np.zeros(1, dtype=np.uint8))

    def test_single_x_before_and_after_idle_layer(self):
        before = parse("QUBITS 2\nX_ERROR(0.1) 0\nTICK\nH 1\nH 1\nMZ 0\n")
        after = parse("QUBITS 2\nH 1\nH 1\nX_ERROR(0.1) 0\nMZ 0\n")
        ctx1 = CircuitContext(before, data_qubits=[0, 1], code_stabilizers=[])
        ctx2 = CircuitContext(after, data_qubits=[0, 1], code_stabilizers=[])
        one = np.array([1], dtype=np.uint8)
        assert errors_equivalent(ctx1, one, ctx2, one) == 1
