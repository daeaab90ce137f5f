"""Convert basis-state indices to bitstrings and bitstrings to indices.

Every bitstring in dcqo uses the same little-endian convention: qubit 0 is
the least significant bit of the basis index and the *first* character of
the bitstring, so character ``i`` is the value of variable/qubit ``i``::

    index 6, width 4  ->  '0110'   (x_1 = x_2 = 1)

Spins follow ``x_i = (1 - z_i) / 2``: bit 0 is spin +1, bit 1 is spin -1.
"""

import numpy as np

from dcqo.exceptions import LengthMismatch

# characters allowed as separators inside bitstrings ('1000 0010 ...')
SEPARATORS = ' _'


class BitConv(object):
    """Class to create converter objects for a fixed register width.

        :param width: Number of qubits/binary variables.

        :raise TypeError: when *width* isn't an integer
        :raise ValueError: when *width* is smaller than 1
    """

    def __init__(self, width):
        if int(width) != width:
            raise TypeError('width must be an integer')
        if width < 1:
            raise ValueError('width must be >= 1')
        self.width = int(width)

    def int2str(self, num):
        """Converts a basis index into a bitstring.

        :param num: Index in ``[0, 2**width)``.

        :rtype: string

        :raise TypeError: when *num* isn't an integer
        :raise ValueError: when *num* is out of range
        """
        if int(num) != num:
            raise TypeError('index must be an integer')
        num = int(num)
        if not 0 <= num < (1 << self.width):
            raise ValueError('index %d out of range for width %d' % (
                num, self.width))
        return ''.join('1' if (num >> i) & 1 else '0'
                       for i in range(self.width))

    def str2int(self, bits):
        """Converts a bitstring into a basis index.

        Spaces and underscores are ignored, so the grouped form
        ``'1000 0010 0100 0001'`` is accepted.

        :rtype: integer

        :raise LengthMismatch: when *bits* doesn't have ``width`` bits
        :raise ValueError: when *bits* contains anything but 0 and 1
        """
        clean = ''.join(ch for ch in bits if ch not in SEPARATORS)
        if len(clean) != self.width:
            raise LengthMismatch('expected %d bits, got %d in %r' % (
                self.width, len(clean), bits))
        ret = 0
        for i, ch in enumerate(clean):
            if ch == '1':
                ret |= 1 << i
            elif ch != '0':
                raise ValueError("invalid bit %r in '%s'" % (ch, bits))
        return ret

    def int2bits(self, num):
        """:returns: the bits of *num* as a uint8 array, qubit 0 first"""
        return np.array([int(b) for b in self.int2str(num)], dtype=np.uint8)

    def bits2int(self, bits):
        """Converts a 0/1 sequence (qubit 0 first) into a basis index."""
        bits = np.asarray(bits).ravel()
        if bits.size != self.width:
            raise LengthMismatch('expected %d bits, got %d' % (
                self.width, bits.size))
        return int(np.dot(bits.astype(np.int64),
                          1 << np.arange(self.width, dtype=np.int64)))


def int2str(num, width):
    """helper function for quick index to bitstring conversions"""
    return BitConv(width).int2str(num)


def str2int(bits, width):
    """helper function for quick bitstring to index conversions"""
    return BitConv(width).str2int(bits)


def to_bits(x, width):
    """
    Normalises any bitstring representation into a uint8 array.

    Accepts a string (see :meth:`BitConv.str2int`), an integer basis index or
    a 0/1 sequence.

    :raise LengthMismatch: when the representation has the wrong width
    """
    conv = BitConv(width)
    if isinstance(x, str):
        return conv.int2bits(conv.str2int(x))
    if isinstance(x, (int, np.integer)):
        return conv.int2bits(int(x))
    bits = np.asarray(x, dtype=np.uint8).ravel()
    if bits.size != width:
        raise LengthMismatch('expected %d bits, got %d' % (width, bits.size))
    return bits
