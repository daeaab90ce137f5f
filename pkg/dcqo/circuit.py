"""Gate-level circuit representation

Rotation convention: every Pauli rotation is
``R_P(theta) = exp(-i theta P / 2)``, so a Hamiltonian factor
``exp(-i c P)`` becomes ``R_P(2 c)``.

Two-qubit gates act on ``qubits = (a, b)``; their 4x4 matrices use ``a`` as
the most significant Kronecker factor (``RYZ`` on ``(a, b)`` is
``exp(-i theta/2 Y_a Z_b)``, ``CX`` has control ``a``).

Trapped-ion natives::

    MS(phi0, phi1, theta) = exp(-i theta/2 (cos phi0 X + sin phi0 Y)
                                         (x) (cos phi1 X + sin phi1 Y))
    GPI(phi)  = [[0, e^{-i phi}], [e^{i phi}, 0]]
    GPI2(phi) = [[1, -i e^{-i phi}], [-i e^{i phi}, 1]] / sqrt(2)
"""

import json
import math

import numpy as np

from dcqo.exceptions import InvalidGate

# kind -> (qubit count, parameter count)
GATE_KINDS = {
    'RX': (1, 1),
    'RY': (1, 1),
    'RZ': (1, 1),
    'H': (1, 0),
    'GPI': (1, 1),
    'GPI2': (1, 1),
    'RZZ': (2, 1),
    'RYZ': (2, 1),
    'RZY': (2, 1),
    'RYY': (2, 1),
    'CX': (2, 0),
    'MS': (2, 3),
}

# single-angle Pauli rotations and their Pauli words
ROTATIONS = {
    'RX': 'X', 'RY': 'Y', 'RZ': 'Z',
    'RZZ': 'ZZ', 'RYZ': 'YZ', 'RZY': 'ZY', 'RYY': 'YY',
}

TWO_QUBIT_ROTATIONS = ('RZZ', 'RYZ', 'RZY', 'RYY')

PAULI = {
    'I': np.eye(2, dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
}

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_CX = np.array([[1, 0, 0, 0],
                [0, 1, 0, 0],
                [0, 0, 0, 1],
                [0, 0, 1, 0]], dtype=complex)


def fold_angle(theta):
    """:returns: *theta* folded into ``[-pi, pi)``"""
    return (theta + math.pi) % (2.0 * math.pi) - math.pi


class Gate(object):
    """One gate application.

    :param kind: one of :data:`GATE_KINDS`.
    :param qubits: qubit indices, distinct.
    :param params: angles in radians.

    :raise InvalidGate: on unknown kinds or wrong qubit/parameter counts
    """

    __slots__ = ('kind', 'qubits', 'params')

    def __init__(self, kind, qubits, params=()):
        if kind not in GATE_KINDS:
            raise InvalidGate('unknown gate kind %r' % (kind, ))
        nq, npar = GATE_KINDS[kind]
        qubits = tuple(int(q) for q in qubits)
        params = tuple(float(p) for p in params)
        if len(qubits) != nq:
            raise InvalidGate('%s acts on %d qubit(s), got %s' % (
                kind, nq, qubits))
        if len(set(qubits)) != len(qubits) or min(qubits) < 0:
            raise InvalidGate('%s needs distinct non-negative qubits, got %s'
                              % (kind, qubits))
        if len(params) != npar:
            raise InvalidGate('%s takes %d parameter(s), got %s' % (
                kind, npar, params))
        if not all(math.isfinite(p) for p in params):
            raise InvalidGate('%s has non-finite parameters %s' % (
                kind, params))
        self.kind = kind
        self.qubits = qubits
        self.params = params

    @property
    def angle(self):
        """Rotation angle of single-angle gates (``theta`` for MS)."""
        if self.kind == 'MS':
            return self.params[2]
        return self.params[0] if self.params else None

    @property
    def is_rotation(self):
        return self.kind in ROTATIONS or self.kind == 'MS'

    @property
    def is_two_qubit(self):
        return len(self.qubits) == 2

    def __eq__(self, other):
        return (isinstance(other, Gate) and self.kind == other.kind and
                self.qubits == other.qubits and self.params == other.params)

    def __hash__(self):
        return hash((self.kind, self.qubits, self.params))

    def __repr__(self):
        return 'Gate(%s)' % self.to_line()

    def to_line(self):
        return ' '.join([self.kind] + [str(q) for q in self.qubits] +
                        [repr(p) for p in self.params])

    @classmethod
    def from_line(cls, line):
        fields = line.split()
        if not fields or fields[0] not in GATE_KINDS:
            raise InvalidGate('cannot parse gate line %r' % (line, ))
        nq = GATE_KINDS[fields[0]][0]
        return cls(fields[0], [int(f) for f in fields[1:1 + nq]],
                   [float(f) for f in fields[1 + nq:]])


def _axis_op(phi):
    return math.cos(phi) * PAULI['X'] + math.sin(phi) * PAULI['Y']


def pauli_word_matrix(paulis):
    """:returns: Kronecker product of the word, first letter most significant"""
    mat = np.eye(1, dtype=complex)
    for p in paulis:
        mat = np.kron(mat, PAULI[p])
    return mat


def rotation_matrix(paulis, theta):
    """:returns: ``exp(-i theta/2 P)`` for a Pauli word ``P``"""
    word = pauli_word_matrix(paulis)
    return (math.cos(theta / 2.0) * np.eye(word.shape[0]) -
            1j * math.sin(theta / 2.0) * word)


def gate_matrix(gate):
    """:returns: the 2x2 or 4x4 unitary of *gate*"""
    kind = gate.kind
    if kind in ROTATIONS:
        return rotation_matrix(ROTATIONS[kind], gate.params[0])
    if kind == 'H':
        return _HADAMARD
    if kind == 'CX':
        return _CX
    if kind == 'GPI':
        phi = gate.params[0]
        return np.array([[0, np.exp(-1j * phi)],
                         [np.exp(1j * phi), 0]], dtype=complex)
    if kind == 'GPI2':
        phi = gate.params[0]
        return np.array([[1, -1j * np.exp(-1j * phi)],
                         [-1j * np.exp(1j * phi), 1]],
                        dtype=complex) / math.sqrt(2)
    if kind == 'MS':
        phi0, phi1, theta = gate.params
        axes = np.kron(_axis_op(phi0), _axis_op(phi1))
        return (math.cos(theta / 2.0) * np.eye(4) -
                1j * math.sin(theta / 2.0) * axes)
    raise InvalidGate('no matrix for %r' % (kind, ))


class Circuit(object):
    """An immutable, ordered list of gates on a fixed number of qubits.

    :param width: number of qubits.
    :param gates: iterable of :class:`Gate`.
    :param metadata: free-form dict (builder provenance, cutoff statistics).

    :raise InvalidGate: when a gate addresses a qubit outside the width
    """

    def __init__(self, width, gates=(), metadata=None):
        if int(width) != width or width < 1:
            raise InvalidGate('circuit width must be a positive integer')
        self.width = int(width)
        gates = tuple(gates)
        for gate in gates:
            if max(gate.qubits) >= self.width:
                raise InvalidGate('%r addresses a qubit outside width %d' % (
                    gate, self.width))
        self.gates = gates
        self.metadata = dict(metadata or {})

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __eq__(self, other):
        """Gate-for-gate equality; metadata is ignored."""
        return (isinstance(other, Circuit) and self.width == other.width and
                self.gates == other.gates)

    def __repr__(self):
        return 'Circuit(width=%d, gates=%d)' % (self.width, len(self.gates))

    def extend(self, gates):
        return Circuit(self.width, self.gates + tuple(gates), self.metadata)

    def with_metadata(self, **kwargs):
        metadata = dict(self.metadata)
        metadata.update(kwargs)
        return Circuit(self.width, self.gates, metadata)

    def two_qubit_count(self):
        return sum(1 for gate in self.gates if gate.is_two_qubit)

    def dumps(self):
        """:returns: the line-oriented text form, one gate per line"""
        lines = ['# width %d' % self.width]
        lines.extend(gate.to_line() for gate in self.gates)
        return '\n'.join(lines) + '\n'

    @classmethod
    def loads(cls, text, metadata=None):
        width = None
        gates = []
        for raw in text.splitlines():
            line = raw.strip()
            if line.startswith('# width'):
                width = int(line.split()[2])
            elif line and not line.startswith('#'):
                gates.append(Gate.from_line(line))
        if width is None:
            width = 1 + max((max(g.qubits) for g in gates), default=0)
        return cls(width, gates, metadata)


def _sidecar(path):
    return str(path) + '.json'


def dump_circuit(circuit, path):
    """
    Writes the text form to *path* and the metadata to the JSON sidecar
    ``<path>.json``.
    """
    with open(path, 'w') as fh:
        fh.write(circuit.dumps())
    with open(_sidecar(path), 'w') as fh:
        json.dump(dict(circuit.metadata, width=circuit.width), fh, indent=2,
                  sort_keys=True, default=str)


def load_circuit(path):
    """Reads a circuit written by :func:`dump_circuit`."""
    with open(path) as fh:
        text = fh.read()
    try:
        with open(_sidecar(path)) as fh:
            metadata = json.load(fh)
    except FileNotFoundError:
        metadata = {}
    metadata.pop('width', None)
    return Circuit.loads(text, metadata)
