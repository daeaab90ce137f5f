"""
Dense statevector simulation

Amplitudes are stored little-endian: basis index ``k = sum_q x_q 2**q``.
Reshaped to ``[2] * n`` in C order, qubit ``q`` is tensor axis ``n - 1 - q``.
"""

import logging
import math
from functools import reduce

import numpy as np
from scipy import linalg

from dcqo import settings
from dcqo.cd import alpha1_at, gauge_terms_first_order, lambda_at, \
    lambda_dot_at
from dcqo.circuit import PAULI, gate_matrix
from dcqo.exceptions import (InvalidConfig, LengthMismatch,
                             ProblemTooLarge)
from dcqo.ising import OutcomeDistribution, energy_spectrum

logger = logging.getLogger(__name__)

EVOLVE_VARIANTS = ('anneal', 'full', 'cd-only')

# dense circuit unitaries
UNITARY_MAX_QUBITS = 10

# measurements per sampled run
DEFAULT_SHOTS = 5000


class StateVector(object):
    """Normalized ``2**n`` complex amplitudes.

    :raise LengthMismatch: when the amplitude count isn't ``2**n``
    :raise ProblemTooLarge: above ``settings.MAX_QUBITS``
    """

    def __init__(self, n, amplitudes):
        _check_width(n)
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (1 << n, ):
            raise LengthMismatch('expected %d amplitudes, got %s' % (
                1 << n, amplitudes.shape))
        self.n = int(n)
        self.amplitudes = amplitudes

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def __len__(self):
        return self.amplitudes.size

    def __repr__(self):
        return 'StateVector(n=%d)' % self.n


def _check_width(n):
    if int(n) != n or n < 1:
        raise InvalidConfig('qubit count must be a positive integer')
    if n > settings.MAX_QUBITS:
        raise ProblemTooLarge('%d qubits exceed the %d-qubit memory guard' % (
            n, settings.MAX_QUBITS))


def uniform_state(n):
    """:returns: the ``|+>^n`` state, all amplitudes ``2**(-n/2)``"""
    _check_width(n)
    return StateVector(n, np.full(1 << n, 2.0 ** (-n / 2.0), dtype=complex))


def basis_state(n, index=0):
    _check_width(n)
    amps = np.zeros(1 << n, dtype=complex)
    amps[index] = 1.0
    return StateVector(n, amps)


def _apply(tensor, gate, n):
    """Applies *gate* to a ``[2] * n + batch`` tensor."""
    axes = [n - 1 - q for q in gate.qubits]
    mat = gate_matrix(gate)
    k = len(axes)
    mat = mat.reshape([2] * (2 * k))
    moved = np.tensordot(mat, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(moved, list(range(k)), axes)


def _check_circuit(circuit, n):
    if circuit.width != n:
        raise LengthMismatch('circuit has width %d, state %d' % (
            circuit.width, n))


def run(circuit, state):
    """
    Applies the gates of *circuit* in order and returns the new state; the
    input is left untouched.

    :raise LengthMismatch: when widths differ
    :raise InvalidGate: on gates without a matrix
    """
    n = state.n
    _check_circuit(circuit, n)
    tensor = state.amplitudes.reshape([2] * n)
    for gate in circuit:
        tensor = _apply(tensor, gate, n)
    return StateVector(n, np.ascontiguousarray(tensor).reshape(-1))


def unitary(circuit):
    """:returns: the dense ``2**n x 2**n`` unitary of *circuit*"""
    n = circuit.width
    if n > UNITARY_MAX_QUBITS:
        raise ProblemTooLarge('dense unitaries are limited to %d qubits' %
                              UNITARY_MAX_QUBITS)
    dim = 1 << n
    tensor = np.eye(dim, dtype=complex).reshape([2] * n + [dim])
    for gate in circuit:
        tensor = _apply(tensor, gate, n)
    return np.ascontiguousarray(tensor).reshape(dim, dim)


def pauli_operator(terms, n):
    """
    Dense matrix of ``sum_k w_k P_k`` for a :class:`dcqo.cd.PauliTermList`
    (or any iterable of terms).
    """
    dim = 1 << n
    mat = np.zeros((dim, dim), dtype=complex)
    for term in terms:
        factors = [PAULI['I']] * n
        for q, p in zip(term.qubits, term.paulis):
            factors[n - 1 - q] = PAULI[p]
        mat += term.weight * reduce(np.kron, factors)
    return mat


def transverse_field(n):
    """:returns: the dense matrix of ``H_i = -sum_i X_i``"""
    dim = 1 << n
    mat = np.zeros((dim, dim))
    idx = np.arange(dim)
    for q in range(n):
        mat[idx, idx ^ (1 << q)] -= 1.0
    return mat


def _evolve_grid(n, step_hamiltonian, T, grid):
    psi = uniform_state(n).amplitudes
    dt = T / grid
    for k in range(grid):
        w, v = linalg.eigh(step_hamiltonian((k + 0.5) * dt))
        psi = v @ (np.exp(-1j * w * dt) * (v.conj().T @ psi))
    return psi


def exact_evolve(model, variant, T, grid=200, tol=None, convention='action',
                 max_grid=1 << 14):
    """
    Continuous-time oracle from the uniform superposition.

    The Hamiltonian is ``H_ad`` (``'anneal'``), ``H_ad + lamdot A``
    (``'full'``) or ``lamdot A`` (``'cd-only'``), with ``A`` the
    first-order gauge potential. Each of the *grid* uniform slices is
    exponentiated exactly at its midpoint through a Hermitian
    eigendecomposition. The Ising offset is left out (global phase).

    :param tol: when given, the grid is doubled until the final state moves
        by less than *tol* (phase-insensitive distance) or *max_grid* is
        reached.

    :raise ProblemTooLarge: above ``settings.ORACLE_MAX_QUBITS``
    """
    n = model.n
    if n > settings.ORACLE_MAX_QUBITS:
        raise ProblemTooLarge('the dense oracle is limited to %d qubits' %
                              settings.ORACLE_MAX_QUBITS)
    if variant not in EVOLVE_VARIANTS:
        raise InvalidConfig('unknown evolution variant %r' % (variant, ))
    if int(grid) != grid or grid < 1:
        raise InvalidConfig('grid must be a positive integer')
    h_i = transverse_field(n)
    h_p = np.diag(energy_spectrum(model) - model.offset)
    gauge = None
    if variant != 'anneal':
        gauge = pauli_operator(gauge_terms_first_order(model), n)

    def hamiltonian(t):
        lam = lambda_at(t, T)
        mat = np.zeros_like(gauge) if gauge is not None else 0.0
        if variant != 'cd-only':
            mat = mat + (1.0 - lam) * h_i + lam * h_p
        if gauge is not None:
            alpha1 = alpha1_at(model, lam, convention=convention).alpha1
            mat = mat + lambda_dot_at(t, T) * (-2.0 * alpha1) * gauge
        return mat

    psi = _evolve_grid(n, hamiltonian, T, int(grid))
    if tol is not None:
        while True:
            if grid * 2 > max_grid:
                logger.warning('exact evolution not converged to %g at grid '
                               '%d', tol, grid)
                break
            grid *= 2
            finer = _evolve_grid(n, hamiltonian, T, grid)
            change = _distance(psi, finer)
            psi = finer
            if change < tol:
                logger.debug('exact evolution converged at grid %d', grid)
                break
    return StateVector(n, psi)


def _distance(a, b):
    return math.sqrt(max(0.0, 2.0 - 2.0 * abs(np.vdot(a, b))))


def state_distance(a, b):
    """:returns: ``sqrt(2 - 2 |<a|b>|)``, insensitive to global phase"""
    if a.n != b.n:
        raise LengthMismatch('states have %d and %d qubits' % (a.n, b.n))
    return _distance(a.amplitudes, b.amplitudes)


def probabilities(state):
    """:returns: the exact :class:`OutcomeDistribution` ``|psi_x|**2``"""
    return OutcomeDistribution(state.n,
                               probabilities=np.abs(state.amplitudes) ** 2)


def sample(state, shots=DEFAULT_SHOTS, seed=None):
    """
    Draws *shots* measurement outcomes from a multinomial with the state's
    probabilities, using ``numpy.random.default_rng(seed)``.
    """
    if int(shots) != shots or shots < 1:
        raise InvalidConfig('shots must be a positive integer')
    probs = np.abs(state.amplitudes) ** 2
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(int(shots), probs / probs.sum())
    nonzero = np.flatnonzero(counts)
    return OutcomeDistribution(state.n, counts={
        int(k): int(counts[k]) for k in nonzero})


def expectation(state, model):
    """
    :returns: ``<psi|H_p|psi>`` including the model offset
    """
    if state.n != model.n:
        raise LengthMismatch('state has %d qubits, model %d' % (
            state.n, model.n))
    probs = np.abs(state.amplitudes) ** 2
    return float(np.dot(probs, energy_spectrum(model)))

