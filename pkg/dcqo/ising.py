"""QUBO and Ising problem representation

Conventions used everywhere in dcqo:

* QUBO objective ``f(x) = x^T Q x + offset`` with ``Q`` symmetric.
* Spins ``z_i = 1 - 2 x_i`` (bit 0 is spin +1, the ``|0>`` eigenstate of
  ``sigma_z``).
* Ising energy ``E(z) = sum_{i<j} J_ij z_i z_j + sum_i h_i z_i + offset``.

With these, :func:`qubo_to_ising` gives ``J_ij = Q_ij / 2`` and
``h_i = -Q_ii / 2 - sum_{j != i} Q_ij / 2`` so that ``f(x) == E(z)`` for
every bitstring.
"""

import logging

import numpy as np

from dcqo import settings
from dcqo.bitconv import BitConv, to_bits
from dcqo.exceptions import (InvalidConfig, InvalidProblem, LengthMismatch,
                             ProblemTooLarge, UndefinedMetric)

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12

# energies closer than this (relative to the energy scale) are degenerate
DEGENERACY_TOL = 1e-9

# the full spectrum is only kept for small models
SPECTRUM_MAX_QUBITS = 20


class QuboProblem(object):
    """A quadratic unconstrained binary optimisation problem.

    :param Q: square real matrix. It must be symmetric to within
        ``1e-12``, unless ``symmetrize`` is set, in which case ``(Q + Q^T)/2``
        is used (this leaves ``x^T Q x`` unchanged).
    :param offset: constant added to the objective.
    :param name: free-form label carried into results.

    :raise InvalidProblem: when Q is not square, empty, non-finite or
        asymmetric
    """

    def __init__(self, Q, offset=0.0, name='', symmetrize=False):
        Q = np.array(Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or Q.shape[0] < 1:
            raise InvalidProblem('Q must be a non-empty square matrix, got '
                                 'shape %s' % (Q.shape, ))
        if not np.all(np.isfinite(Q)):
            raise InvalidProblem('Q has non-finite entries')
        asym = np.max(np.abs(Q - Q.T))
        if asym > SYMMETRY_TOL and not symmetrize:
            raise InvalidProblem('Q is not symmetric (max |Q - Q^T| = %g)' %
                                 asym)
        self.Q = (Q + Q.T) / 2.0
        self.Q.setflags(write=False)
        self.offset = float(offset)
        self.name = name

    @property
    def n(self):
        return self.Q.shape[0]

    def evaluate(self, x):
        """:returns: ``x^T Q x + offset`` for a bitstring in any form"""
        bits = to_bits(x, self.n).astype(float)
        return float(bits @ self.Q @ bits) + self.offset

    @classmethod
    def from_terms(cls, n, terms, offset=0.0, name=''):
        """
        Builds a problem from polynomial coefficients.

        :param terms: iterable of ``(i, j, value)`` meaning ``value * x_i x_j``
            (``i == j`` is a linear term). Repeated pairs are accumulated.
        """
        Q = np.zeros((n, n))
        for i, j, value in terms:
            if i == j:
                Q[i, i] += value
            else:
                Q[i, j] += value / 2.0
                Q[j, i] += value / 2.0
        return cls(Q, offset=offset, name=name)

    @classmethod
    def from_text(cls, text, name=''):
        """
        Parses the QUBO text format.

        The first non-comment line holds ``n``. Every following line is
        ``i j value`` with 0-based ``i <= j`` and means ``value * x_i x_j``.
        ``#`` starts a comment. An optional ``offset value`` line sets the
        constant.

        :raise InvalidProblem: on malformed lines, out-of-range or
            duplicate ``(i, j)`` entries
        """
        n = None
        offset = 0.0
        seen = set()
        terms = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            try:
                if n is None:
                    if len(fields) != 1:
                        raise ValueError('expected the variable count')
                    n = int(fields[0])
                    if n < 1:
                        raise ValueError('n must be >= 1')
                    continue
                if fields[0] == 'offset' and len(fields) == 2:
                    offset = float(fields[1])
                    continue
                if len(fields) != 3:
                    raise ValueError('expected "i j value"')
                i, j, value = int(fields[0]), int(fields[1]), float(fields[2])
            except ValueError as exc:
                raise InvalidProblem('line %d: %s' % (lineno, exc))
            if not 0 <= i <= j < n:
                raise InvalidProblem('line %d: need 0 <= i <= j < %d, got '
                                     '(%d, %d)' % (lineno, n, i, j))
            if (i, j) in seen:
                raise InvalidProblem('line %d: duplicate entry (%d, %d)' % (
                    lineno, i, j))
            seen.add((i, j))
            terms.append((i, j, value))
        if n is None:
            raise InvalidProblem('missing variable count')
        return cls.from_terms(n, terms, offset=offset, name=name)

    def to_text(self):
        """:returns: the problem in the QUBO text format"""
        lines = ['# %s' % self.name if self.name else '# qubo', str(self.n)]
        if self.offset:
            lines.append('offset %r' % self.offset)
        for i in range(self.n):
            for j in range(i, self.n):
                value = self.Q[i, i] if i == j else 2.0 * self.Q[i, j]
                if value:
                    lines.append('%d %d %r' % (i, j, value))
        return '\n'.join(lines) + '\n'

    def __repr__(self):
        return 'QuboProblem(n=%d, offset=%g%s)' % (
            self.n, self.offset, ', name=%r' % self.name if self.name else '')


def read_qubo(path):
    """Loads a :class:`QuboProblem` from a QUBO text file."""
    with open(path) as fh:
        return QuboProblem.from_text(fh.read(), name=str(path))


def write_qubo(problem, path):
    """Writes *problem* to *path* in the QUBO text format."""
    with open(path, 'w') as fh:
        fh.write(problem.to_text())


class IsingModel(object):
    """Ising spin-glass problem Hamiltonian.

    :param h: local fields, one per spin.
    :param J: couplings as a mapping ``{(i, j): value}``. Pairs are stored
        with ``i < j``; ``(j, i)`` keys are folded onto ``(i, j)`` and
        zero couplings are dropped.
    :param offset: constant energy shift.

    :raise InvalidProblem: on self-couplings, out-of-range indices or
        non-finite coefficients
    """

    def __init__(self, h, J=None, offset=0.0, name=''):
        h = np.array(h, dtype=float).ravel()
        if h.size < 1:
            raise InvalidProblem('an Ising model needs at least one spin')
        if not np.all(np.isfinite(h)):
            raise InvalidProblem('non-finite local field')
        n = h.size
        couplings = {}
        for (i, j), value in (J or {}).items():
            i, j = int(i), int(j)
            if i == j:
                raise InvalidProblem('self coupling J_%d%d' % (i, j))
            if i > j:
                i, j = j, i
            if not (0 <= i and j < n):
                raise InvalidProblem('coupling (%d, %d) out of range' % (i, j))
            value = float(value)
            if not np.isfinite(value):
                raise InvalidProblem('non-finite coupling (%d, %d)' % (i, j))
            couplings[(i, j)] = couplings.get((i, j), 0.0) + value
        self.h = h
        self.h.setflags(write=False)
        # lexicographic order is the Trotter term order for two-body terms
        self.J = {pair: couplings[pair] for pair in sorted(couplings)
                  if couplings[pair] != 0.0}
        self.offset = float(offset)
        self.name = name

    @property
    def n(self):
        return self.h.size

    def couplings(self):
        """:returns: ``[((i, j), J_ij), ...]`` in lexicographic pair order"""
        return list(self.J.items())

    def coupling_matrix(self):
        """:returns: the symmetric n x n matrix of couplings (zero diagonal)"""
        mat = np.zeros((self.n, self.n))
        for (i, j), value in self.J.items():
            mat[i, j] = mat[j, i] = value
        return mat

    def is_zero(self):
        return not np.any(self.h) and not self.J

    def __eq__(self, other):
        if not isinstance(other, IsingModel):
            return NotImplemented
        return (np.array_equal(self.h, other.h) and self.J == other.J and
                self.offset == other.offset)

    def __repr__(self):
        return 'IsingModel(n=%d, couplings=%d, offset=%g)' % (
            self.n, len(self.J), self.offset)


class GroundStateSet(object):
    """Exact minimum of an Ising model and all its minimisers.

    :param energy: the minimal energy.
    :param indices: basis indices of the degenerate minimisers, ascending.
    :param spectrum: sorted energies of all basis states, or ``None``.
    """

    def __init__(self, n, energy, indices, spectrum=None):
        if len(indices) == 0:
            raise InvalidProblem('a ground state set cannot be empty')
        self.n = n
        self.energy = float(energy)
        self.indices = np.asarray(sorted(int(i) for i in indices),
                                  dtype=np.int64)
        self.spectrum = spectrum

    @property
    def bitstrings(self):
        conv = BitConv(self.n)
        return [conv.int2str(i) for i in self.indices]

    @property
    def degeneracy(self):
        return len(self.indices)

    def __contains__(self, x):
        if isinstance(x, str):
            x = BitConv(self.n).str2int(x)
        return int(x) in set(self.indices.tolist())

    def __repr__(self):
        return 'GroundStateSet(energy=%g, degeneracy=%d)' % (
            self.energy, self.degeneracy)


class OutcomeDistribution(object):
    """Probability distribution over measurement outcomes.

    Exact distributions hold a dense ``2**n`` probability vector; sampled ones
    hold a sparse ``{index: frequency}`` map and remember the shot count.
    """

    def __init__(self, n, probabilities=None, counts=None):
        self.n = n
        self.shots = None
        if (probabilities is None) == (counts is None):
            raise ValueError('pass exactly one of probabilities or counts')
        if probabilities is not None:
            probs = np.asarray(probabilities, dtype=float)
            if probs.shape != (1 << n, ):
                raise LengthMismatch('expected %d probabilities, got %s' % (
                    1 << n, probs.shape))
            if np.any(probs < 0):
                raise InvalidProblem('negative probability')
            self._dense = probs
            self._sparse = None
        else:
            total = sum(counts.values())
            if total <= 0:
                raise InvalidProblem('no samples')
            self.shots = int(total)
            self._dense = None
            self._sparse = {int(k): v / total
                            for k, v in sorted(counts.items()) if v}

    @property
    def mass(self):
        if self._dense is not None:
            return float(self._dense.sum())
        return float(sum(self._sparse.values()))

    def support(self):
        """:returns: ``(indices, probabilities)`` of nonzero outcomes"""
        if self._dense is not None:
            idx = np.flatnonzero(self._dense)
            return idx, self._dense[idx]
        idx = np.fromiter(self._sparse.keys(), dtype=np.int64,
                          count=len(self._sparse))
        probs = np.fromiter(self._sparse.values(), dtype=float,
                            count=len(self._sparse))
        return idx, probs

    def probability(self, x):
        """:returns: the probability of a bitstring (str, index or bits)"""
        conv = BitConv(self.n)
        if isinstance(x, str):
            index = conv.str2int(x)
        elif isinstance(x, (int, np.integer)):
            index = int(x)
        else:
            index = conv.bits2int(x)
        if self._dense is not None:
            return float(self._dense[index])
        return self._sparse.get(index, 0.0)

    def top(self, k):
        """:returns: ``[(bitstring, probability), ...]``, most probable first"""
        idx, probs = self.support()
        # stable: ties keep ascending index order
        order = np.argsort(-probs, kind='stable')[:k]
        conv = BitConv(self.n)
        return [(conv.int2str(idx[o]), float(probs[o])) for o in order]

    def as_dict(self):
        idx, probs = self.support()
        conv = BitConv(self.n)
        return {conv.int2str(i): float(p) for i, p in zip(idx, probs)}

    def dense(self):
        """:returns: a dense ``2**n`` probability vector"""
        if self._dense is not None:
            return self._dense
        probs = np.zeros(1 << self.n)
        for k, v in self._sparse.items():
            probs[k] = v
        return probs


def _energies(model, indices):
    """Energies of the given basis indices, accumulated term by term.

    The accumulation order (offset, fields by index, couplings in
    lexicographic order) is shared with :func:`ising_energy` so the vectorised
    and scalar paths agree bit for bit.
    """
    indices = np.asarray(indices, dtype=np.int64)
    energies = np.full(indices.shape, model.offset)
    for i, hi in enumerate(model.h):
        if hi:
            energies += hi * (1 - 2 * ((indices >> i) & 1))
    for (i, j), value in model.J.items():
        energies += value * (1 - 2 * (((indices >> i) ^ (indices >> j)) & 1))
    return energies


def energy_spectrum(model):
    """
    :returns: energies of all ``2**n`` basis states in index order

    :raise ProblemTooLarge: above the statevector qubit guard
    """
    if model.n > settings.MAX_QUBITS:
        raise ProblemTooLarge('%d spins exceed the %d-qubit guard' % (
            model.n, settings.MAX_QUBITS))
    return _energies(model, np.arange(1 << model.n, dtype=np.int64))


def qubo_to_ising(q):
    """
    Maps a QUBO onto the equivalent Ising model.

    Using ``x_i = (1 - z_i) / 2``::

        J_ij   = Q_ij / 2                               (i < j)
        h_i    = -Q_ii / 2 - sum_{j != i} Q_ij / 2
        offset = sum_i Q_ii / 2 + sum_{i<j} Q_ij / 2 + q.offset

    so that ``q.evaluate(x) == ising_energy(model, x)`` for every ``x``.
    """
    Q = q.Q
    n = q.n
    diag = np.diag(Q)
    off_rows = Q.sum(axis=1) - diag
    h = -diag / 2.0 - off_rows / 2.0
    J = {(i, j): Q[i, j] / 2.0
         for i in range(n) for j in range(i + 1, n) if Q[i, j] != 0.0}
    offset = diag.sum() / 2.0 + np.triu(Q, 1).sum() / 2.0 + q.offset
    return IsingModel(h, J, offset=offset, name=q.name)


def ising_energy(model, x):
    """
    :returns: ``sum_{i<j} J_ij z_i z_j + sum_i h_i z_i + offset``

    :param x: bitstring (str), basis index or 0/1 sequence of length n.

    :raise LengthMismatch: when *x* doesn't have ``model.n`` bits
    """
    bits = to_bits(x, model.n)
    index = BitConv(model.n).bits2int(bits)
    return float(_energies(model, np.array([index]))[0])


def brute_force_solve(model, tol=DEGENERACY_TOL):
    """
    Enumerates all ``2**n`` bitstrings.

    Energies are summed in floating point, so two assignments with equal
    exact cost can differ in the last bits. Every bitstring within
    ``tol * max(1, max |E|)`` of the minimum is reported as a degenerate
    ground state; ``tol=0`` keeps only the bitwise minimisers.

    :raise ProblemTooLarge: for more than 24 spins
    :raise InvalidConfig: for a negative *tol*
    """
    if model.n > settings.BRUTE_FORCE_MAX_QUBITS:
        raise ProblemTooLarge('brute force is limited to %d spins, got %d' % (
            settings.BRUTE_FORCE_MAX_QUBITS, model.n))
    if not tol >= 0:
        raise InvalidConfig('tol must be >= 0, got %r' % (tol, ))
    energies = energy_spectrum(model)
    emin = energies.min()
    scale = max(1.0, float(np.abs(energies).max()))
    ground = np.flatnonzero(energies <= emin + tol * scale)
    spectrum = None
    if model.n <= SPECTRUM_MAX_QUBITS:
        spectrum = np.sort(energies)
    logger.debug('brute force over %d spins: E0=%g, degeneracy %d',
                 model.n, emin, ground.size)
    return GroundStateSet(model.n, emin, ground, spectrum=spectrum)


def success_probability(d, g):
    """:returns: the probability mass ``d`` puts on the ground states ``g``"""
    if d.n != g.n:
        raise LengthMismatch('distribution has %d qubits, ground set %d' % (
            d.n, g.n))
    if d._dense is not None:
        return float(d._dense[g.indices].sum())
    return float(sum(d._sparse.get(int(i), 0.0) for i in g.indices))


def average_energy(d, model):
    """:returns: ``sum_x d(x) E(x)`` with offset-inclusive energies"""
    if d.n != model.n:
        raise LengthMismatch('distribution has %d qubits, model %d' % (
            d.n, model.n))
    idx, probs = d.support()
    return float(np.dot(probs, _energies(model, idx)))


def approximation_ratio(d, model, ground=None):
    """
    :returns: average output energy over the ground-state energy

    The ratio is not clamped: distributions concentrated on states with
    energy of opposite sign to the ground energy give negative values.

    :param ground: a precomputed :class:`GroundStateSet`, brute forced
        when omitted.

    :raise UndefinedMetric: when the ground-state energy is zero
    """
    if ground is None:
        ground = brute_force_solve(model)
    if ground.energy == 0.0:
        raise UndefinedMetric('ground-state energy is zero; report the '
                              'average energy (%g) instead' %
                              average_energy(d, model))
    return average_energy(d, model) / ground.energy


def random_spin_glass(n, seed):
    """
    Fully connected spin glass with ``h_i, J_ij ~ Uniform(-1, 1)``.

    Fields are drawn first (by index), then couplings in lexicographic pair
    order, from ``numpy.random.default_rng(seed)``.
    """
    if n < 1:
        raise InvalidProblem('n must be >= 1')
    rng = np.random.default_rng(seed)
    h = rng.uniform(-1.0, 1.0, size=n)
    J = {}
    for i in range(n):
        for j in range(i + 1, n):
            J[(i, j)] = rng.uniform(-1.0, 1.0)
    return IsingModel(h, J, name='spin-glass-%d-seed-%d' % (n, seed))
