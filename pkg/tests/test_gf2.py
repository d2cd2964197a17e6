import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wiretapsim.gf2 import (
    BitVec,
    CrcSpec,
    ToeplitzMatrix,
    crc_append,
    crc_check,
    crc_remainder,
    toeplitz_from_seed,
    toeplitz_matvec,
)


def crc_long_division(bits, generator):
    """Independent reference: bitwise long division of bits(x) * x^w."""
    w = len(generator) - 1
    work = list(bits) + [0] * w
    for i in range(len(bits)):
        if work[i]:
            for j, g in enumerate(generator):
                work[i + j] ^= g
    return work[-w:] if w else []


class TestBitVec:
    def test_basic_properties(self):
        v = BitVec([1, 0, 1, 1])
        assert len(v) == 4
        assert v[0] == 1 and v[1] == 0
        assert v == BitVec([1, 0, 1, 1])
        assert v != BitVec([1, 0, 1, 0])

    def test_rejects_empty_and_nonbinary(self):
        with pytest.raises(ValueError):
            BitVec([])
        with pytest.raises(ValueError):
            BitVec([0, 2])

    def test_xor_and_concat(self):
        a = BitVec([1, 1, 0])
        b = BitVec([1, 0, 1])
        assert a ^ b == BitVec([0, 1, 1])
        assert a.concat(b) == BitVec([1, 1, 0, 1, 0, 1])

    def test_hex_round_trip(self):
        rng = np.random.default_rng(7)
        for n in [1, 4, 11, 222, 233]:
            v = BitVec.random(n, rng)
            assert BitVec.from_hex(v.to_hex(), n) == v

    def test_immutable(self):
        v = BitVec([1, 0])
        with pytest.raises(ValueError):
            v.bits[0] = 0


class TestToeplitz:
    def test_hand_example_2x2(self):
        # entry(i,j) = a[1 + i - j] for a 2x2
        mat = toeplitz_from_seed(BitVec([1, 0, 1]), 2, 2)
        assert mat.dense().tolist() == [[0, 1], [1, 0]]

    def test_single_entry(self):
        mat = toeplitz_from_seed(BitVec([1]), 1, 1)
        assert mat.dense().tolist() == [[1]]

    def test_zero_seed_gives_zero_matrix(self):
        mat = toeplitz_from_seed(BitVec.zeros(8), 4, 5)
        assert not mat.dense().any()

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            toeplitz_from_seed(BitVec([1, 0, 1]), 3, 3)

    def test_diagonal_constancy(self):
        rng = np.random.default_rng(3)
        mat = toeplitz_from_seed(BitVec.random(12, rng), 5, 8)
        d = mat.dense()
        for i in range(4):
            for j in range(7):
                assert d[i, j] == d[i + 1, j + 1]

    def test_matvec_hand_example(self):
        mat = toeplitz_from_seed(BitVec([1, 0, 1]), 2, 2)
        assert toeplitz_matvec(mat, BitVec([1, 1])) == BitVec([1, 1])

    def test_matvec_zero_cases(self):
        rng = np.random.default_rng(5)
        mat = toeplitz_from_seed(BitVec.random(10, rng), 4, 7)
        assert toeplitz_matvec(mat, BitVec.zeros(7)) == BitVec.zeros(4)
        zmat = toeplitz_from_seed(BitVec.zeros(10), 4, 7)
        assert toeplitz_matvec(zmat, BitVec.random(7, rng)) == BitVec.zeros(4)

    def test_matvec_length_mismatch(self):
        mat = toeplitz_from_seed(BitVec([1, 0, 1]), 2, 2)
        with pytest.raises(ValueError):
            toeplitz_matvec(mat, BitVec([1, 1, 1]))

    def test_matvec_against_dense_oracle(self):
        # 1000 random instances vs a naive dense multiply
        rng = np.random.default_rng(11)
        for _ in range(1000):
            k = int(rng.integers(1, 9))
            lk = int(rng.integers(1, 9))
            a = BitVec.random(k + lk - 1, rng)
            x = BitVec.random(lk, rng)
            mat = toeplitz_from_seed(a, k, lk)
            expect = np.zeros(k, dtype=np.uint8)
            for i in range(k):
                acc = 0
                for j in range(lk):
                    acc ^= mat.entry(i, j) & x[j]
                expect[i] = acc
            assert toeplitz_matvec(mat, x) == BitVec(expect)

    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_linearity(self, data):
        k = data.draw(st.integers(1, 10))
        lk = data.draw(st.integers(1, 10))
        bits = st.lists(st.integers(0, 1), min_size=k + lk - 1, max_size=k + lk - 1)
        a = BitVec(data.draw(bits))
        xv = st.lists(st.integers(0, 1), min_size=lk, max_size=lk)
        x = BitVec(data.draw(xv))
        y = BitVec(data.draw(xv))
        mat = toeplitz_from_seed(a, k, lk)
        assert toeplitz_matvec(mat, x ^ y) == toeplitz_matvec(mat, x) ^ toeplitz_matvec(mat, y)


class TestCrc:
    def test_crc11_polynomial(self):
        spec = CrcSpec.crc11()
        assert spec.width == 11
        assert spec.generator == (1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1)

    def test_zero_data_gives_zero_parity(self):
        out = crc_append(BitVec.zeros(222), CrcSpec.crc11())
        assert len(out) == 233
        assert not out.bits.any()
        assert crc_check(out, CrcSpec.crc11())

    def test_single_one_matches_long_division(self):
        spec = CrcSpec.crc11()
        out = crc_append(BitVec([1]), spec)
        expect = crc_long_division([1], spec.generator)
        assert out.bits[1:].tolist() == expect
        # frozen value from the oracle: remainder of x^11 mod g
        assert expect == [1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1]

    def test_round_trip_random(self):
        rng = np.random.default_rng(23)
        spec = CrcSpec.crc11()
        for _ in range(50):
            data = BitVec.random(int(rng.integers(1, 300)), rng)
            assert crc_check(crc_append(data, spec), spec)

    def test_single_bit_flip_detected_exhaustively(self):
        rng = np.random.default_rng(29)
        spec = CrcSpec.crc11()
        data = BitVec.random(245, rng)
        word = crc_append(data, spec)  # 256 bits
        for pos in range(len(word)):
            flipped = word.bits.copy()
            flipped[pos] ^= 1
            assert not crc_check(BitVec(flipped), spec)

    def test_random_words_match_long_division_oracle(self):
        rng = np.random.default_rng(31)
        spec = CrcSpec.crc11()
        for _ in range(200):
            bits = rng.integers(0, 2, size=233, dtype=np.uint8)
            data, parity = bits[:-11], bits[-11:]
            expect_ok = crc_long_division(data.tolist(), spec.generator) == parity.tolist()
            assert crc_check(BitVec(bits), spec) == expect_ok
            assert crc_remainder(data, spec).tolist() == crc_long_division(
                data.tolist(), spec.generator
            )

    def test_zero_width_crc(self):
        spec = CrcSpec.none()
        data = BitVec([1, 0, 1])
        assert crc_append(data, spec) == data
        assert crc_check(data, spec)

    def test_check_requires_payload(self):
        with pytest.raises(ValueError):
            crc_check(BitVec.zeros(11), CrcSpec.crc11())
