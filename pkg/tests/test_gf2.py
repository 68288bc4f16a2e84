import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from demkit.gf2 import BitMatrix

from matrix_fixtures import D1, D2, OMEGA1, H1, H2, H2_EXPECTED


def brute_rank(arr: np.ndarray) -> int:
    """2^rank distinct subset-XORs of the rows."""
    span = {0}
    packed = [int("".join(str(b) for b in row), 2) if row.size else 0 for row in arr]
    for p in packed:
        span |= {s ^ p for s in span}
    return len(span).bit_length() - 1


def brute_kernel(arr: np.ndarray) -> set[tuple[int, ...]]:
    rows, cols = arr.shape
    out = set()
    for bits in itertools.product((0, 1), repeat=cols):
        v = np.array(bits, dtype=np.uint8)
        if not ((arr @ v) % 2).any():
            out.add(bits)
    return out


@st.composite
def bit_matrices(draw, max_rows=8, max_cols=12):
    rows = draw(st.integers(0, max_rows))
    cols = draw(st.integers(1, max_cols))
    data = draw(st.lists(st.lists(st.integers(0, 1), min_size=cols, max_size=cols), min_size=rows, max_size=rows))
    return np.array(data, dtype=np.uint8).reshape(rows, cols)


class TestRank:
    def test_detector_matrix_rows_independent(self):
        assert BitMatrix.from_array(D1).rank() == 4

    def test_zero_matrix(self):
        assert BitMatrix.zeros(3, 5).rank() == 0

    def test_syndrome_matrix_full_rank(self):
        m = BitMatrix.from_array(OMEGA1)
        assert m.rank() == brute_rank(OMEGA1) == 5

    @given(bit_matrices())
    @settings(max_examples=60)
    def test_matches_subset_xor_oracle(self, arr):
        assert BitMatrix.from_array(arr).rank() == brute_rank(arr)


class TestMultiply:
    def test_product_of_reference_matrices(self):
        got = BitMatrix.from_array(D1) @ BitMatrix.from_array(OMEGA1)
        assert got == BitMatrix.from_array(H1)

    def test_alternative_detector_choice(self):
        got = BitMatrix.from_array(D2) @ BitMatrix.from_array(OMEGA1)
        assert got == BitMatrix.from_array(H2)
        assert got == BitMatrix.from_array(H2_EXPECTED)

    def test_identity(self):
        omega = BitMatrix.from_array(OMEGA1)
        assert BitMatrix.identity(5) @ omega == omega

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            BitMatrix.zeros(2, 3) @ BitMatrix.zeros(4, 2)

    @given(st.tuples(*(st.integers(1, 6) for _ in range(4))), st.integers(0, 2**32 - 1))
    @settings(max_examples=60)
    def test_associative(self, dims, seed):
        i, j, k, l = dims
        rng = np.random.default_rng(seed)
        A = BitMatrix.from_array(rng.integers(0, 2, size=(i, j), dtype=np.uint8))
        B = BitMatrix.from_array(rng.integers(0, 2, size=(j, k), dtype=np.uint8))
        C = BitMatrix.from_array(rng.integers(0, 2, size=(k, l), dtype=np.uint8))
        assert (A @ B) @ C == A @ (B @ C)


class TestKernel:
    def test_reference_detector_matrix_kernel(self):
        k = BitMatrix.from_array(D1).kernel_basis()
        assert k.rows == 1  # 5 columns - rank 4
        assert set(map(tuple, [k.row_bits(0)])) <= brute_kernel(D1)

    def test_identity_kernel_empty(self):
        assert BitMatrix.identity(4).kernel_basis().rows == 0

    def test_same_circuit_detector_choices_share_kernel(self):
        k1 = BitMatrix.from_array(D1).kernel_basis()
        k2 = BitMatrix.from_array(D2).kernel_basis()
        assert k1.same_row_space(k2)

    @given(bit_matrices())
    @settings(max_examples=60)
    def test_kernel_dimensions_and_membership(self, arr):
        m = BitMatrix.from_array(arr)
        k = m.kernel_basis()
        assert m.rank() + k.rows == m.cols
        for i in range(k.rows):
            assert not m.mul_vec(k.row_bits(i)).any()


class TestSparsify:
    def test_reference_matrix_reaches_sparser_form(self):
        h1 = BitMatrix.from_array(H1)
        slim = h1.sparsify_rows()
        assert slim.popcount() <= 12
        assert slim.same_row_space(h1)

    def test_single_minimal_row_unchanged(self):
        m = BitMatrix.from_array(np.array([[0, 1, 0]], dtype=np.uint8))
        assert m.sparsify_rows() == m

    @pytest.mark.parametrize("seed", range(10))
    def test_row_space_preserved_on_random_matrices(self, seed):
        rng = np.random.default_rng(seed)
        for _ in range(10):
            arr = rng.integers(0, 2, size=(6, 10), dtype=np.uint8)
            m = BitMatrix.from_array(arr)
            slim = m.sparsify_rows()
            assert slim.same_row_space(m)
            assert slim.popcount() <= m.popcount()
            assert slim.rank() == m.rank()


class TestAccessors:
    def test_out_of_range_access(self):
        m = BitMatrix.zeros(2, 3)
        with pytest.raises(IndexError):
            m.get(0, 3)
        with pytest.raises(IndexError):
            m.get(2, 0)
        with pytest.raises(IndexError):
            m.set(0, -1, 1)

    def test_round_trip_through_dense(self):
        rng = np.random.default_rng(7)
        arr = rng.integers(0, 2, size=(5, 130), dtype=np.uint8)  # spans >2 words
        assert np.array_equal(BitMatrix.from_array(arr).to_array(), arr)

    def test_solve(self):
        m = BitMatrix.from_array(OMEGA1)
        rng = np.random.default_rng(3)
        x = rng.integers(0, 2, size=8, dtype=np.uint8)
        b = m.mul_vec(x)
        sol = m.solve(b)
        assert sol is not None
        assert np.array_equal(m.mul_vec(sol), b)

    def test_solve_inconsistent(self):
        m = BitMatrix.from_array(np.array([[1, 0], [1, 0]], dtype=np.uint8))
        assert m.solve(np.array([1, 0], dtype=np.uint8)) is None
