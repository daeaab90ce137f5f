"""Counterdiabatic driving: schedule, gauge potential and step angles

The annealing Hamiltonian is ``H_ad = (1 - lam) H_i + lam H_p`` with the
transverse field ``H_i = -sum_i X_i``, driven by::

    lam(t) = sin^2( (pi/2) sin^2( pi t / 2T ) )

The first-order nested-commutator gauge potential is::

    A(t) = i alpha1 [H_i, H_p]
         = -2 alpha1 [ sum_i h_i Y_i + sum_{i<j} J_ij (Y_i Z_j + Z_i Y_j) ]

Digitized into N steps, step m applies ``exp(-i f_m A(m dt))`` with the
T-independent step factor::

    f_m = pi sin(pi m / N) sin(pi sin^2(pi m / 2N)) / 2N

``f_m`` equals ``(2 / pi) * dt * lamdot(m dt)``; the digitized circuits use
``f_m`` as written. ``alpha1`` defaults to the exact first-order action
minimiser, see :func:`alpha1_at`.
"""

import math

import numpy as np

from dcqo.exceptions import DegenerateModel, InvalidSchedule

CONVENTIONS = ('action', 'printed')


def _check_time(t, T):
    if not T > 0:
        raise InvalidSchedule('T must be positive, got %r' % (T, ))
    if not 0 <= t <= T:
        raise InvalidSchedule('t=%r outside [0, %r]' % (t, T))


def lambda_at(t, T):
    """:returns: the scheduling function ``lam(t)`` in ``[0, 1]``"""
    _check_time(t, T)
    inner = math.sin(math.pi * t / (2.0 * T)) ** 2
    return math.sin(math.pi * inner / 2.0) ** 2


def lambda_dot_at(t, T):
    """
    :returns: ``d lam / dt``, which vanishes at both ends of ``[0, T]``::

        lamdot = (pi^2 / 4T) sin(pi t / T) sin(pi sin^2(pi t / 2T))
    """
    _check_time(t, T)
    inner = math.sin(math.pi * t / (2.0 * T)) ** 2
    return (math.pi ** 2 / (4.0 * T) * math.sin(math.pi * t / T) *
            math.sin(math.pi * inner))


def _check_step(step, N):
    if int(N) != N or N < 1:
        raise InvalidSchedule('N must be a positive integer, got %r' % (N, ))
    if int(step) != step or not 1 <= step <= N:
        raise InvalidSchedule('step %r outside 1..%d' % (step, N))


def step_lambda(step, N):
    """:returns: ``lam(m dt)``, which only depends on ``m / N``"""
    _check_step(step, N)
    inner = math.sin(math.pi * step / (2.0 * N)) ** 2
    return math.sin(math.pi * inner / 2.0) ** 2


def step_factor(step, N):
    """:returns: the T-independent prefactor ``f_m`` of digitized step m"""
    _check_step(step, N)
    inner = math.sin(math.pi * step / (2.0 * N)) ** 2
    return (math.pi * math.sin(math.pi * step / N) *
            math.sin(math.pi * inner) / (2.0 * N))


class Schedule(object):
    """Sampled schedule for ``N`` Trotter steps over total time ``T``.

    ``times[m-1] = m * dt`` for ``m = 1..N`` (the right end of each step),
    with ``lam`` and ``lam_dot`` sampled there.
    """

    def __init__(self, T, N):
        if not T > 0:
            raise InvalidSchedule('T must be positive, got %r' % (T, ))
        if int(N) != N or N < 1:
            raise InvalidSchedule('N must be a positive integer, got %r' % (
                N, ))
        self.T = float(T)
        self.N = int(N)
        self.dt = self.T / self.N
        self.times = np.array([min(m * self.dt, self.T)
                               for m in range(1, self.N + 1)])
        self.lam = np.array([lambda_at(t, self.T) for t in self.times])
        self.lam_dot = np.array([lambda_dot_at(t, self.T)
                                 for t in self.times])

    def __repr__(self):
        return 'Schedule(T=%g, N=%d)' % (self.T, self.N)


def schedule(T, N):
    """:returns: the :class:`Schedule` of *N* steps over *T*"""
    return Schedule(T, N)


class CdCoefficient(object):
    """First-order CD coefficient ``alpha1`` and its denominator ``gamma``."""

    def __init__(self, alpha1, gamma, lam, t=None):
        self.alpha1 = alpha1
        self.gamma = gamma
        self.lam = lam
        self.t = t

    def __repr__(self):
        return 'CdCoefficient(alpha1=%g, gamma=%g, lam=%g)' % (
            self.alpha1, self.gamma, self.lam)


def _coupling_sums(model):
    """Sums of the model coefficients entering alpha1 and gamma.

    ``sum_{i != j}`` runs over ordered pairs, i.e. twice the ``i < j`` sum.
    """
    h2 = model.h ** 2
    Jm2 = model.coupling_matrix() ** 2
    sum_h2 = float(h2.sum())
    sum_h4 = float((h2 ** 2).sum())
    sum_J2_lt = float(np.triu(Jm2, 1).sum())
    sum_J2_ne = 2.0 * sum_J2_lt
    sum_J4_ne = float((Jm2 ** 2).sum())
    sum_h2J2_ne = float(h2 @ Jm2.sum(axis=1))
    # sum_{i<j<k} (J_ij^2 J_ik^2 + J_ij^2 J_jk^2 + J_ik^2 J_jk^2) counts,
    # for every centre spin, the products over pairs of its neighbours
    rows = Jm2.sum(axis=1)
    triples = float(((rows ** 2 - (Jm2 ** 2).sum(axis=1)) / 2.0).sum())
    return dict(h2=sum_h2, h4=sum_h4, J2_lt=sum_J2_lt, J2_ne=sum_J2_ne,
                J4_ne=sum_J4_ne, h2J2_ne=sum_h2J2_ne, triples=triples)


def alpha1_at(model, lam, convention='action', t=None):
    """
    Closed-form first-order CD coefficient::

        alpha1 = -(1/4) (sum_i h_i^2 + S_J) / gamma
        gamma  = (1 - lam)^2 (sum_i h_i^2 + 4 sum_{i!=j} J_ij^2)
               + lam^2 [ sum_i h_i^4 + sum_{i!=j} J_ij^4
                         + 6 sum_{i!=j} h_i^2 J_ij^2
                         + 6 sum_{i<j<k} (J_ij^2 J_ik^2 + J_ij^2 J_jk^2
                                          + J_ik^2 J_jk^2) ]

    With ``convention='action'`` (the default) the numerator coupling sum
    is ``S_J = sum_{i!=j} J_ij^2``, which makes ``alpha1`` the exact
    minimiser of the first-order action ``||dH/dlam + i [A, H]||``. With
    ``convention='printed'`` it is ``S_J = sum_{i<j} J_ij^2`` as in the
    published formula. The two agree for models without couplings and
    differ by a factor of 2 for models without fields.

    :raise DegenerateModel: for a model with all coefficients zero
    """
    if convention not in CONVENTIONS:
        raise ValueError('convention must be one of %s' % (CONVENTIONS, ))
    if model.is_zero():
        raise DegenerateModel('alpha1 is undefined for an all-zero model')
    if not 0.0 <= lam <= 1.0:
        raise InvalidSchedule('lam=%r outside [0, 1]' % (lam, ))
    s = _coupling_sums(model)
    gamma = ((1.0 - lam) ** 2 * (s['h2'] + 4.0 * s['J2_ne']) +
             lam ** 2 * (s['h4'] + s['J4_ne'] + 6.0 * s['h2J2_ne'] +
                         6.0 * s['triples']))
    if not gamma > 0.0:
        # only reachable through underflow for vanishing coefficients
        raise DegenerateModel('gamma=%r is not positive' % (gamma, ))
    numerator = s['h2'] + (s['J2_lt'] if convention == 'printed'
                           else s['J2_ne'])
    return CdCoefficient(-0.25 * numerator / gamma, gamma, lam, t=t)


class PauliTerm(object):
    """A weighted Pauli word on one or two qubits, e.g. ``0.3 * Y0 Z1``.

    :param qubits: tuple of qubit indices.
    :param paulis: string with one of ``'XYZI'`` per qubit.
    """

    __slots__ = ('qubits', 'paulis', 'weight')

    def __init__(self, qubits, paulis, weight):
        self.qubits = tuple(qubits)
        self.paulis = paulis
        self.weight = float(weight)

    @property
    def label(self):
        return ' '.join('%s%d' % (p, q) for p, q in zip(self.paulis,
                                                         self.qubits))

    def __eq__(self, other):
        return (isinstance(other, PauliTerm) and
                (self.qubits, self.paulis, self.weight) ==
                (other.qubits, other.paulis, other.weight))

    def __repr__(self):
        return 'PauliTerm(%s, %g)' % (self.label, self.weight)


class PauliTermList(object):
    """Ordered list of :class:`PauliTerm` over ``n`` qubits."""

    def __init__(self, n, terms):
        self.n = n
        self.terms = list(terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __getitem__(self, item):
        return self.terms[item]

    def weights(self):
        return np.array([term.weight for term in self.terms])

    def scaled(self, factor):
        return PauliTermList(self.n, [
            PauliTerm(t.qubits, t.paulis, t.weight * factor)
            for t in self.terms])


def gauge_terms_first_order(model):
    """
    Pauli structure of the first-order gauge potential.

    Emits ``Y_i`` with weight ``h_i`` for every spin with a nonzero field
    (by index), then ``Y_i Z_j`` and ``Z_i Y_j`` with weight ``J_ij`` for
    every coupled pair in lexicographic order. The ``-2 alpha1`` prefactor
    is not applied here.
    """
    terms = [PauliTerm((i, ), 'Y', hi) for i, hi in enumerate(model.h)
             if hi != 0.0]
    for (i, j), value in model.couplings():
        terms.append(PauliTerm((i, j), 'YZ', value))
        terms.append(PauliTerm((i, j), 'ZY', value))
    return PauliTermList(model.n, terms)


def cd_hamiltonian_terms(model, lam, convention='action'):
    """:returns: the gauge potential ``A(lam)`` with its prefactor applied"""
    coeff = alpha1_at(model, lam, convention=convention)
    return gauge_terms_first_order(model).scaled(-2.0 * coeff.alpha1)


def cd_scale(model, step, N, convention='action'):
    """
    :returns: ``f_m * (-2 alpha1(lam(m dt)))``, the factor multiplying every
        term weight in step m. T never enters.
    """
    coeff = alpha1_at(model, step_lambda(step, N), convention=convention)
    return step_factor(step, N) * (-2.0 * coeff.alpha1)


def cd_step_angles(model, step, N, convention='action'):
    """
    Exponent coefficients of digitized step ``step``: term ``k`` of
    :func:`gauge_terms_first_order` is applied as
    ``exp(-i angles[k] P_k)``.

    :raise InvalidSchedule: when ``step`` is outside ``1..N``
    """
    scale = cd_scale(model, step, N, convention=convention)
    return gauge_terms_first_order(model).weights() * scale


class CoefficientRow(object):
    """Hamiltonian coefficients at the end of one Trotter step."""

    __slots__ = ('step', 't', 'lam', 'lam_dot', 'alpha1', 'cd')

    def __init__(self, step, t, lam, lam_dot, alpha1):
        self.step = step
        self.t = t
        self.lam = lam
        self.lam_dot = lam_dot
        self.alpha1 = alpha1
        # magnitude of the CD coefficient 2 lamdot alpha1
        self.cd = abs(2.0 * lam_dot * alpha1)

    @property
    def anneal(self):
        return 1.0 - self.lam

    def as_dict(self):
        return dict(step=self.step, t=self.t, lam=self.lam,
                    one_minus_lam=self.anneal, lam_dot=self.lam_dot,
                    alpha1=self.alpha1, cd=self.cd)


def coefficient_table(model, T, N, convention='action'):
    """
    :returns: one :class:`CoefficientRow` per Trotter step ``m = 1..N``,
        sampled at ``t = m dt``. This is the table the step cutoff works on.
    """
    sched = schedule(T, N)
    rows = []
    for m, (t, lam, lam_dot) in enumerate(
            zip(sched.times, sched.lam, sched.lam_dot), 1):
        coeff = alpha1_at(model, lam, convention=convention, t=t)
        rows.append(CoefficientRow(m, t, lam, lam_dot, coeff.alpha1))
    return rows
