"""Tests for basis index <-> bitstring conversion"""

import numpy as np
import pytest

from dcqo.bitconv import BitConv, int2str, str2int, to_bits
from dcqo.exceptions import LengthMismatch


class TestBitConv:
    @pytest.mark.parametrize(
        "num, width, expected",
        [(0, 1, "0"), (1, 1, "1"), (6, 4, "0110"), (1, 4, "1000"), (8, 4, "0001")],
    )
    def test_int2str(self, num, width, expected):
        assert BitConv(width).int2str(num) == expected

    def test_str2int_ignores_separators(self):
        assert str2int("1000 0010 0100 0001", 16) == str2int("1000001001000001", 16)
        assert str2int("10_00", 4) == 1

    def test_every_index_survives(self):
        conv = BitConv(5)
        assert [conv.str2int(conv.int2str(k)) for k in range(32)] == list(range(32))

    def test_bits_are_qubit_ordered(self):
        conv = BitConv(3)
        assert conv.int2bits(4).tolist() == [0, 0, 1]
        assert conv.bits2int([1, 1, 0]) == 3

    def test_bad_width(self):
        with pytest.raises(ValueError):
            BitConv(0)
        with pytest.raises(TypeError):
            BitConv(1.5)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            int2str(16, 4)
        with pytest.raises(TypeError):
            int2str(1.5, 4)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            str2int("101", 4)
        with pytest.raises(LengthMismatch):
            BitConv(2).bits2int([1, 0, 1])

    def test_invalid_character(self):
        with pytest.raises(ValueError):
            str2int("10x1", 4)


class TestToBits:
    def test_all_representations_agree(self):
        expected = [0, 1, 1, 0]
        assert to_bits("0110", 4).tolist() == expected
        assert to_bits(6, 4).tolist() == expected
        assert to_bits([0, 1, 1, 0], 4).tolist() == expected
        assert to_bits(np.array([0, 1, 1, 0]), 4).tolist() == expected

    def test_sequence_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            to_bits([0, 1], 3)
