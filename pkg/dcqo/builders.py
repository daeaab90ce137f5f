"""
Circuit builders for digitized annealing, DCQO, QAOA and h-DCQO

Every builder starts from the uniform superposition (a Hadamard on every
qubit) and emits Pauli terms in a fixed order: one-body terms by qubit
index, then two-body terms in lexicographic pair order. Within a pair the
``Y_i Z_j`` factor comes before ``Z_i Y_j``.

A Hamiltonian factor ``exp(-i c P)`` is emitted as ``R_P(2 c)`` (see
:mod:`dcqo.circuit`).
"""

import logging

from dcqo.cd import cd_step_angles, gauge_terms_first_order, schedule
from dcqo.circuit import Circuit, Gate
from dcqo.exceptions import InvalidConfig, InvalidSchedule, ParameterMismatch

logger = logging.getLogger(__name__)

ANSATZ_VARIANTS = ('two-param', 'per-one-body', 'y-zy-only')

DCQO_VARIANTS = ('cd-only', 'full')

# Pauli word of a gauge term -> rotation gate kind
_TERM_GATES = {'Y': 'RY', 'YZ': 'RYZ', 'ZY': 'RZY'}


class AnsatzSpec(object):
    """Shape of an h-DCQO ansatz.

    :param variant: ``'two-param'`` (``alpha_l`` for all one-body terms,
        ``beta_l`` for all two-body terms), ``'per-one-body'`` (one
        parameter per qubit plus ``beta_l``) or ``'y-zy-only'`` (as
        per-one-body, without any ``Y_i Z_j`` factor).
    :param layers: number of layers ``p``. Zero layers leave the uniform
        superposition untouched.
    :param include_yz: emit the ``Y_i Z_j`` factor. Defaults to ``True``
        except for ``'y-zy-only'``, where it can't be enabled.

    :raise InvalidConfig: on unknown variants, negative layer counts or
        ``include_yz=True`` with ``'y-zy-only'``
    """

    def __init__(self, variant='two-param', layers=1, include_yz=None):
        if variant not in ANSATZ_VARIANTS:
            raise InvalidConfig('unknown ansatz variant %r, expected one of '
                                '%s' % (variant, ', '.join(ANSATZ_VARIANTS)))
        if int(layers) != layers or layers < 0:
            raise InvalidConfig('layers must be a non-negative integer')
        if include_yz is None:
            include_yz = variant != 'y-zy-only'
        elif include_yz and variant == 'y-zy-only':
            raise InvalidConfig('the y-zy-only ansatz has no YZ terms')
        self.variant = variant
        self.layers = int(layers)
        self.include_yz = bool(include_yz)

    @property
    def per_site(self):
        return self.variant != 'two-param'

    def parameter_count(self, n):
        """:returns: ``2p`` or ``(n + 1)p``"""
        return (n + 1 if self.per_site else 2) * self.layers

    def as_dict(self):
        return dict(variant=self.variant, layers=self.layers,
                    include_yz=self.include_yz)

    def __eq__(self, other):
        return (isinstance(other, AnsatzSpec) and
                self.as_dict() == other.as_dict())

    def __repr__(self):
        return 'AnsatzSpec(%r, layers=%d, include_yz=%s)' % (
            self.variant, self.layers, self.include_yz)


def hdcqo_parameter_count(spec, n):
    """:returns: the parameter count of *spec* on *n* qubits"""
    return spec.parameter_count(n)


def _check_positive_steps(N):
    if int(N) != N or N < 1:
        raise InvalidSchedule('N must be a positive integer, got %r' % (N, ))


def _prep(n):
    return [Gate('H', (q, )) for q in range(n)]


def _anneal_step(model, dt, lam):
    """Gates of ``exp(-i dt H_ad(lam))`` split as mixer, fields, couplings."""
    gates = [Gate('RX', (q, ), (-2.0 * dt * (1.0 - lam), ))
             for q in range(model.n)]
    gates.extend(Gate('RZ', (i, ), (2.0 * dt * lam * hi, ))
                 for i, hi in enumerate(model.h) if hi != 0.0)
    gates.extend(Gate('RZZ', pair, (2.0 * dt * lam * value, ))
                 for pair, value in model.couplings())
    return gates


def _cd_step(model, step, N, convention):
    terms = gauge_terms_first_order(model)
    angles = cd_step_angles(model, step, N, convention=convention)
    return [Gate(_TERM_GATES[term.paulis], term.qubits, (2.0 * angle, ))
            for term, angle in zip(terms, angles)]


def build_dqa_circuit(model, T, N):
    """
    First-order Trotterization of ``H_ad(t) = (1 - lam) H_i + lam H_p``
    with ``H_i = -sum_i X_i``; step m uses ``lam(m dt)``.

    :raise InvalidSchedule: for ``T <= 0`` or ``N < 1``
    """
    _check_positive_steps(N)
    sched = schedule(T, N)
    gates = _prep(model.n)
    for lam in sched.lam:
        gates.extend(_anneal_step(model, sched.dt, lam))
    logger.debug('DQA circuit: n=%d T=%g N=%d, %d gates', model.n, T, N,
                 len(gates))
    return Circuit(model.n, gates, dict(builder='dqa', T=float(T), N=int(N)))


def build_dcqo_circuit(model, N, variant='cd-only', T=None, steps=None,
                       convention='action'):
    """
    Digitized counterdiabatic circuit.

    ``'cd-only'`` applies, per step, the gauge-potential factor with the
    T-independent step factor: RY on one-body terms, RYZ then RZY on every
    coupled pair. ``'full'`` precedes each of those with the annealing step
    of :func:`build_dqa_circuit`, which needs ``T``.

    Pairs are visited in lexicographic order. Non-commuting pair factors
    then pick up an order-dependent error of second order in the angles,
    so ground states that are exactly degenerate under the continuous
    evolution (e.g. the tours of a symmetric TSP) end up with slightly
    different probabilities; no fixed order removes this for instances
    with a cyclic symmetry.

    :param steps: the Trotter steps to keep (``1..N``), e.g. the step
        numbers returned by :func:`dcqo.passes.apply_step_cutoff`. All steps
        by default.

    :raise InvalidSchedule: on bad ``N``, ``T`` or step numbers
    :raise InvalidConfig: on unknown variants
    """
    if variant not in DCQO_VARIANTS:
        raise InvalidConfig('unknown DCQO variant %r' % (variant, ))
    _check_positive_steps(N)
    if steps is None:
        steps = range(1, N + 1)
    steps = sorted(int(getattr(s, 'step', s)) for s in steps)
    sched = None
    if variant == 'full':
        if T is None:
            raise InvalidSchedule('the full DCQO variant needs T')
        sched = schedule(T, N)
    gates = _prep(model.n)
    for m in steps:
        if sched is not None:
            if not 1 <= m <= N:
                raise InvalidSchedule('step %r outside 1..%d' % (m, N))
            gates.extend(_anneal_step(model, sched.dt, sched.lam[m - 1]))
        gates.extend(_cd_step(model, m, N, convention))
    metadata = dict(builder='dcqo', variant=variant, N=int(N), steps=steps,
                    convention=convention)
    if T is not None:
        metadata['T'] = float(T)
    logger.debug('DCQO %s circuit: n=%d N=%d steps=%s, %d gates', variant,
                 model.n, N, steps, len(gates))
    return Circuit(model.n, gates, metadata)


def build_qaoa_circuit(model, p, params):
    """
    QAOA with cost ``exp(-i gamma_l H_p)`` and mixer
    ``exp(-i beta_l sum_i X_i)`` per layer.

    :param params: ``[gamma_1, beta_1, ..., gamma_p, beta_p]``

    :raise ParameterMismatch: when ``len(params) != 2p``
    """
    if int(p) != p or p < 1:
        raise InvalidConfig('p must be a positive integer, got %r' % (p, ))
    params = [float(v) for v in params]
    if len(params) != 2 * p:
        raise ParameterMismatch('QAOA with p=%d takes %d parameters, got %d'
                                % (p, 2 * p, len(params)))
    gates = _prep(model.n)
    for layer in range(p):
        gamma, beta = params[2 * layer:2 * layer + 2]
        gates.extend(Gate('RZ', (i, ), (2.0 * (gamma * hi), ))
                     for i, hi in enumerate(model.h) if hi != 0.0)
        gates.extend(Gate('RZZ', pair, (2.0 * (gamma * value), ))
                     for pair, value in model.couplings())
        gates.extend(Gate('RX', (q, ), (2.0 * beta, ))
                     for q in range(model.n))
    return Circuit(model.n, gates, dict(builder='qaoa', p=int(p),
                                        params=params))


def build_hdcqo_circuit(model, spec, params):
    """
    Hybrid DCQO ansatz.

    Layer ``l`` applies ``exp(-i alpha_l h_i Y_i)`` for every spin with a
    field (two-param) or ``exp(-i theta_{l,i} Y_i)`` for every spin
    (per-site variants), then for every coupled pair
    ``exp(-i beta_l J_ij Y_i Z_j)`` followed by ``exp(-i beta_l J_ij Z_i Y_j)``.

    Parameter layout per layer: ``[alpha_l, beta_l]`` for two-param and
    ``[theta_{l,0}, ..., theta_{l,n-1}, beta_l]`` otherwise.

    :raise ParameterMismatch: when the parameter count doesn't match *spec*
    """
    n = model.n
    params = [float(v) for v in params]
    expected = hdcqo_parameter_count(spec, n)
    if len(params) != expected:
        raise ParameterMismatch('%r on %d qubits takes %d parameters, got %d'
                                % (spec, n, expected, len(params)))
    width = n + 1 if spec.per_site else 2
    gates = _prep(n)
    for layer in range(spec.layers):
        chunk = params[layer * width:(layer + 1) * width]
        beta = chunk[-1]
        if spec.per_site:
            gates.extend(Gate('RY', (i, ), (2.0 * chunk[i], ))
                         for i in range(n))
        else:
            alpha = chunk[0]
            gates.extend(Gate('RY', (i, ), (2.0 * (hi * alpha), ))
                         for i, hi in enumerate(model.h) if hi != 0.0)
        for pair, value in model.couplings():
            angle = 2.0 * (value * beta)
            if spec.include_yz:
                gates.append(Gate('RYZ', pair, (angle, )))
            gates.append(Gate('RZY', pair, (angle, )))
    return Circuit(n, gates, dict(builder='hdcqo', ansatz=spec.as_dict(),
                                  params=params))
