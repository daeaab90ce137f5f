"""
Compression and transpilation passes over :class:`dcqo.circuit.Circuit`
"""

import logging
import math

from dcqo.circuit import (GATE_KINDS, ROTATIONS, TWO_QUBIT_ROTATIONS,
                          Circuit, Gate, fold_angle)
from dcqo.exceptions import InvalidConfig, UnlowerableGate

logger = logging.getLogger(__name__)

DEFAULT_GATE_CUTOFF = 0.1

DEFAULT_STEP_CUTOFF = 0.005

HALF_PI = math.pi / 2.0


def _check_threshold(threshold):
    if not threshold >= 0:
        raise InvalidConfig('threshold must be >= 0, got %r' % (threshold, ))


def apply_gate_cutoff(circuit, threshold=DEFAULT_GATE_CUTOFF):
    """
    Drops every rotation gate whose angle, folded into ``[-pi, pi)``, has
    magnitude below *threshold*. Non-rotation gates are kept.

    The removed and kept rotation counts are added to the metadata under
    ``cutoff``.
    """
    _check_threshold(threshold)
    kept = []
    stats = dict(threshold=float(threshold), removed_one_qubit=0,
                 removed_two_qubit=0, kept_one_qubit=0, kept_two_qubit=0)
    for gate in circuit:
        if not gate.is_rotation:
            kept.append(gate)
            continue
        size = 'two_qubit' if gate.is_two_qubit else 'one_qubit'
        if abs(fold_angle(gate.angle)) < threshold:
            stats['removed_' + size] += 1
        else:
            stats['kept_' + size] += 1
            kept.append(gate)
    logger.info('gate cutoff %g removed %d one-qubit and %d two-qubit '
                'rotations', threshold, stats['removed_one_qubit'],
                stats['removed_two_qubit'])
    return Circuit(circuit.width, kept, circuit.metadata).with_metadata(
        cutoff=stats)


def apply_step_cutoff(table, threshold=DEFAULT_STEP_CUTOFF):
    """
    Keeps the Trotter steps whose CD coefficient ``|2 lamdot alpha1|``
    reaches *threshold*.

    :param table: rows from :func:`dcqo.cd.coefficient_table`.
    :returns: the kept rows, in step order. Pass them as ``steps`` to
        :func:`dcqo.builders.build_dcqo_circuit`.
    """
    _check_threshold(threshold)
    kept = [row for row in table if row.cd >= threshold]
    logger.info('step cutoff %g kept %d of %d steps', threshold, len(kept),
                len(table))
    return kept


# Basis changes ``(before, after)`` with ``after . Z . before == P``
_BASIS = {
    'X': ((('H', 0.0), ), (('H', 0.0), )),
    'Y': ((('RX', HALF_PI), ), (('RX', -HALF_PI), )),
    'Z': ((), ()),
}


def _basis_gates(changes, qubit):
    return [Gate(kind, (qubit, ), () if kind == 'H' else (angle, ))
            for kind, angle in changes]


def _pauli_pair_to_cx(paulis, a, b, theta):
    """``exp(-i theta/2 P_a Q_b)`` as basis change, CX, RZ, CX."""
    before_a, after_a = _BASIS[paulis[0]]
    before_b, after_b = _BASIS[paulis[1]]
    return (_basis_gates(before_a, a) + _basis_gates(before_b, b) +
            [Gate('CX', (a, b)), Gate('RZ', (b, ), (theta, )),
             Gate('CX', (a, b))] +
            _basis_gates(after_a, a) + _basis_gates(after_b, b))


def _fused_yz_zy(a, b, theta_yz, theta_zy):
    """
    ``exp(-i theta_yz/2 Y_a Z_b) exp(-i theta_zy/2 Z_a Y_b)`` with two CX.

    The basis change maps ``Y_a Z_b`` onto ``X_a X_b`` and ``Z_a Y_b`` onto
    ``Z_a Z_b``, which CX(a, b) turns into ``X_a`` and ``Z_b``.
    """
    return [
        Gate('RZ', (a, ), (-HALF_PI, )),
        Gate('RY', (b, ), (HALF_PI, )),
        Gate('RX', (b, ), (HALF_PI, )),
        Gate('CX', (a, b)),
        Gate('RX', (a, ), (theta_yz, )),
        Gate('RZ', (b, ), (theta_zy, )),
        Gate('CX', (a, b)),
        Gate('RZ', (a, ), (HALF_PI, )),
        Gate('RX', (b, ), (-HALF_PI, )),
        Gate('RY', (b, ), (-HALF_PI, )),
    ]


def lower_to_cx(circuit, fuse=True):
    """
    Rewrites two-qubit Pauli rotations into CX plus single-qubit rotations.

    Every two-qubit rotation costs two CX. With *fuse*, an ``RYZ`` and an
    ``RZY`` adjacent on the same qubit pair (in either order; the two
    words commute) share one two-CX block, so a ``Y Z + Z Y`` pair costs
    two CX instead of four.

    :raise UnlowerableGate: on native trapped-ion gates
    """
    gates = circuit.gates
    out = []
    fused = 0
    k = 0
    while k < len(gates):
        gate = gates[k]
        if gate.kind in ('MS', 'GPI', 'GPI2'):
            raise UnlowerableGate('%s has no CX lowering' % gate.kind)
        if gate.kind not in TWO_QUBIT_ROTATIONS:
            out.append(gate)
            k += 1
            continue
        nxt = gates[k + 1] if k + 1 < len(gates) else None
        if (fuse and nxt is not None and nxt.qubits == gate.qubits and
                {gate.kind, nxt.kind} == {'RYZ', 'RZY'}):
            angles = {gate.kind: gate.angle, nxt.kind: nxt.angle}
            out.extend(_fused_yz_zy(gate.qubits[0], gate.qubits[1],
                                    angles['RYZ'], angles['RZY']))
            fused += 1
            k += 2
            continue
        out.extend(_pauli_pair_to_cx(ROTATIONS[gate.kind], gate.qubits[0],
                                     gate.qubits[1], gate.angle))
        k += 1
    logger.debug('CX lowering: %d gates -> %d, %d fused YZ+ZY blocks',
                 len(gates), len(out), fused)
    return Circuit(circuit.width, out, circuit.metadata).with_metadata(
        lowered='cx', fused_blocks=fused)


def _ryy_to_ms(a, b, theta):
    """
    ``R_YY(theta)`` as one MS gate, up to global phase.

    The angle is folded into ``[0, 2 pi)``; past ``pi/2`` the MS angle is
    reflected back into ``[0, pi/2]`` and a ``Y (x) Y`` flip (two GPI(pi/2))
    makes up the difference where needed.
    """
    theta = theta % (2.0 * math.pi)
    if theta <= HALF_PI:
        return [Gate('MS', (a, b), (HALF_PI, HALF_PI, theta))]
    flip = [Gate('GPI', (a, ), (HALF_PI, )), Gate('GPI', (b, ), (HALF_PI, ))]
    if theta <= math.pi:
        return [Gate('MS', (a, b), (3 * HALF_PI, HALF_PI,
                                    math.pi - theta))] + flip
    if theta <= 3 * HALF_PI:
        return [Gate('MS', (a, b), (HALF_PI, HALF_PI,
                                    theta - math.pi))] + flip
    return [Gate('MS', (a, b), (3 * HALF_PI, HALF_PI, 2 * math.pi - theta))]


def lower_to_ms(circuit):
    """
    Rewrites two-qubit Pauli rotations into one MS gate each, dressed with
    GPI2 gates on every qubit that carries a Z: ``GPI2(pi)`` before and
    ``GPI2(0)`` after turn the ``Y`` of the MS core into that ``Z``.

    Single-qubit gates are kept as they are.

    :raise UnlowerableGate: on CX
    """
    out = []
    for gate in circuit:
        if gate.kind == 'CX':
            raise UnlowerableGate('CX has no MS lowering')
        if gate.kind not in TWO_QUBIT_ROTATIONS:
            out.append(gate)
            continue
        dressed = [q for q, p in zip(gate.qubits, ROTATIONS[gate.kind])
                   if p == 'Z']
        out.extend(Gate('GPI2', (q, ), (math.pi, )) for q in dressed)
        out.extend(_ryy_to_ms(gate.qubits[0], gate.qubits[1], gate.angle))
        out.extend(Gate('GPI2', (q, ), (0.0, )) for q in dressed)
    return Circuit(circuit.width, out, circuit.metadata).with_metadata(
        lowered='ms')


def count_gates(circuit):
    """
    :returns: ``{kind: count}`` for every gate kind, plus ``two_qubit`` and
        ``total``
    """
    counts = dict.fromkeys(GATE_KINDS, 0)
    for gate in circuit:
        counts[gate.kind] += 1
    counts['two_qubit'] = circuit.two_qubit_count()
    counts['total'] = len(circuit)
    return counts
