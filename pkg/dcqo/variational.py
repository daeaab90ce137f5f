"""
Classical optimisation loop for h-DCQO and QAOA

Costs are exact statevector expectations of the problem Hamiltonian
(offset included), so every cost function here is deterministic.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from dcqo.builders import (build_hdcqo_circuit, build_qaoa_circuit,
                           hdcqo_parameter_count)
from dcqo.cd import cd_scale
from dcqo.exceptions import (InvalidConfig, OptimizationError,
                             ParameterMismatch, UndefinedMetric)
from dcqo.ising import (approximation_ratio, average_energy,
                        brute_force_solve, success_probability)
from dcqo.passes import count_gates, lower_to_cx, lower_to_ms
from dcqo.simulator import basis_state, expectation, probabilities, run, \
    sample

logger = logging.getLogger(__name__)

METHODS = ('nelder-mead', 'coordinate-descent')

INITS = ('warm', 'random')

DEFAULT_TOP_K = 20


@dataclass
class OptimizerConfig:
    """Settings of :func:`minimize` and of the restart loops.

    :raise InvalidConfig: on unknown methods, ``max_iterations < 1``,
        non-positive tolerances or ``restarts < 1``
    """

    method: str = 'nelder-mead'
    max_iterations: int = 500
    tolerance: float = 1e-10
    restarts: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidConfig('unknown optimizer %r, expected one of %s' % (
                self.method, ', '.join(METHODS)))
        if int(self.max_iterations) != self.max_iterations or \
                self.max_iterations < 1:
            raise InvalidConfig('max_iterations must be a positive integer')
        if not self.tolerance > 0:
            raise InvalidConfig('tolerance must be positive')
        if int(self.restarts) != self.restarts or self.restarts < 1:
            raise InvalidConfig('restarts must be a positive integer')


class RunResult(object):
    """Measured outcome of one circuit on one model."""

    def __init__(self, circuit, distribution, ground, average, sp, ar,
                 gate_counts):
        self.circuit = circuit
        self.distribution = distribution
        self.ground = ground
        self.average_energy = average
        self.success_probability = sp
        self.approximation_ratio = ar
        self.gate_counts = gate_counts

    def as_dict(self, top_k=DEFAULT_TOP_K):
        return dict(
            success_probability=self.success_probability,
            approximation_ratio=self.approximation_ratio,
            average_energy=self.average_energy,
            ground_energy=self.ground.energy,
            ground_states=self.ground.bitstrings,
            shots=self.distribution.shots,
            gate_counts=self.gate_counts,
            top=[dict(bitstring=b, probability=p)
                 for b, p in self.distribution.top(top_k)],
        )

    def __repr__(self):
        return 'RunResult(sp=%g, ar=%s)' % (self.success_probability,
                                             self.approximation_ratio)


def gate_count_report(circuit):
    """:returns: gate counts of *circuit* as built and after CX/MS lowering"""
    return dict(abstract=count_gates(circuit),
                cx=count_gates(lower_to_cx(circuit)),
                cx_unfused=count_gates(lower_to_cx(circuit, fuse=False)),
                ms=count_gates(lower_to_ms(circuit)))


def evaluate_circuit(model, circuit, ground=None, shots=0, seed=None):
    """
    Runs *circuit* from ``|0...0>`` (the builders prepare the uniform
    superposition themselves) and scores the outcome.

    :param shots: ``0`` for the exact distribution, otherwise the number of
        sampled measurements.
    """
    if ground is None:
        ground = brute_force_solve(model)
    state = run(circuit, basis_state(model.n, 0))
    if shots:
        dist = sample(state, shots, seed=seed)
    else:
        dist = probabilities(state)
    try:
        ar = approximation_ratio(dist, model, ground=ground)
    except UndefinedMetric:
        ar = None
    return RunResult(circuit, dist, ground, average_energy(dist, model),
                     success_probability(dist, ground), ar,
                     gate_count_report(circuit))


class OptimizationResult(object):
    """Best parameters found over all restarts.

    ``trace`` holds the best cost seen so far after every iteration of the
    winning restart, so it never increases and ends at ``cost``.
    """

    def __init__(self, params, cost, trace, restart=0, evaluations=0,
                 restart_costs=None, run_result=None):
        self.params = np.asarray(params, dtype=float)
        self.cost = float(cost)
        self.trace = list(trace)
        self.restart = restart
        self.evaluations = evaluations
        self.restart_costs = list(restart_costs or [self.cost])
        self.run_result = run_result

    @property
    def iterations(self):
        return max(0, len(self.trace) - 1)

    def as_dict(self):
        ret = dict(params=self.params.tolist(), cost=self.cost,
                   trace=self.trace, restart=self.restart,
                   restart_costs=self.restart_costs,
                   evaluations=self.evaluations)
        if self.run_result is not None:
            ret['run'] = self.run_result.as_dict()
        return ret

    def __repr__(self):
        return 'OptimizationResult(cost=%g, restart=%d, iterations=%d)' % (
            self.cost, self.restart, self.iterations)


class _Tracker(object):
    """Wraps a cost function, remembering the best point evaluated."""

    def __init__(self, cost):
        self.cost = cost
        self.best_x = None
        self.best = math.inf
        self.evaluations = 0
        self.trace = []

    def __call__(self, x):
        x = np.array(x, dtype=float)
        value = float(self.cost(x))
        self.evaluations += 1
        if not math.isfinite(value):
            raise OptimizationError('cost is %r at %s' % (value, x.tolist()))
        if value < self.best:
            self.best = value
            self.best_x = x
        return value

    def mark(self, *args):
        self.trace.append(self.best)


def _nelder_mead(tracker, x0, cfg):
    # standard coefficients (1, 2, 0.5, 0.5); stop on cost spread only
    optimize.minimize(tracker, x0, method='Nelder-Mead', callback=tracker.mark,
                      options=dict(maxiter=int(cfg.max_iterations),
                                   fatol=cfg.tolerance, xatol=np.inf,
                                   adaptive=False))


def _coordinate_descent(tracker, x0, cfg):
    x = np.array(x0, dtype=float)
    current = tracker(x)
    for _ in range(int(cfg.max_iterations)):
        start = current
        for i in range(x.size):
            def line(value, i=i):
                trial = x.copy()
                trial[i] = value
                return tracker(trial)
            res = optimize.minimize_scalar(
                line, bounds=(x[i] - math.pi, x[i] + math.pi),
                method='bounded')
            if res.fun < current:
                x[i] = res.x
                current = res.fun
        tracker.mark()
        if start - current < cfg.tolerance:
            break


def minimize(cost, x0, cfg=None):
    """
    Minimises *cost* from *x0* with ``cfg.method``.

    Nelder-Mead (scipy, non-adaptive) stops when the simplex cost spread
    drops below ``cfg.tolerance`` or after ``cfg.max_iterations``
    iterations. Coordinate descent sweeps bounded line searches over each
    parameter within ``pi`` of its current value and stops when a sweep
    gains less than the tolerance.

    :raise OptimizationError: when *cost* returns a non-finite value
    """
    cfg = cfg or OptimizerConfig()
    x0 = np.array(x0, dtype=float).ravel()
    tracker = _Tracker(cost)
    tracker(x0)
    tracker.mark()
    if x0.size:
        if cfg.method == 'nelder-mead':
            _nelder_mead(tracker, x0, cfg)
        else:
            _coordinate_descent(tracker, x0, cfg)
    if tracker.trace[-1] != tracker.best:
        tracker.mark()
    return OptimizationResult(tracker.best_x, tracker.best, tracker.trace,
                              evaluations=tracker.evaluations)


def random_params(count, rng):
    """:returns: *count* angles from ``Uniform(-pi, pi)``"""
    return rng.uniform(-math.pi, math.pi, size=count)


def warm_start_params(model, spec, N=None, convention='action'):
    """
    Analytic initial parameters for :func:`dcqo.builders.build_hdcqo_circuit`.

    Layer ``l`` takes the CD scale ``s_l`` of Trotter step ``l`` of ``N``
    (see :func:`dcqo.cd.cd_scale`): ``(alpha_l, beta_l) = (s_l, s_l)`` for
    the two-param ansatz, ``theta_{l,i} = s_l h_i`` and ``beta_l = s_l``
    otherwise. The warm circuit then applies exactly the angles of DCQO
    step ``l``.

    :param N: Trotter steps of the reference schedule, ``layers + 1`` by
        default so that no layer sits on the last, all-zero step.

    :raise ParameterMismatch: when the ansatz has more layers than *N*
    """
    if N is None:
        N = spec.layers + 1
    if spec.layers > N:
        raise ParameterMismatch('%d layers need at least as many Trotter '
                                'steps, got N=%d' % (spec.layers, N))
    params = []
    for layer in range(1, spec.layers + 1):
        scale = cd_scale(model, layer, N, convention=convention)
        if spec.per_site:
            params.extend(scale * hi for hi in model.h)
        else:
            params.append(scale)
        params.append(scale)
    return np.array(params, dtype=float)


def _statevector_cost(model, build):
    start = basis_state(model.n, 0)

    def cost(params):
        return expectation(run(build(params), start), model)
    return cost


def _best_of(cost, starts, cfg):
    best = None
    costs = []
    for k, x0 in enumerate(starts):
        res = minimize(cost, x0, cfg)
        res.restart = k
        costs.append(res.cost)
        logger.info('restart %d finished: cost %g after %d iterations', k,
                    res.cost, res.iterations)
        if best is None or res.cost < best.cost:
            best = res
    best.restart_costs = costs
    return best


def run_hdcqo(model, spec, init='warm', cfg=None, N=None, ground=None,
              shots=0, seed=None, convention='action'):
    """
    Trains an h-DCQO ansatz on *model* and scores the best circuit.

    Restart 0 starts from :func:`warm_start_params` when ``init='warm'``;
    every other start is drawn from ``Uniform(-pi, pi)`` with
    ``numpy.random.default_rng(cfg.seed)``.
    """
    cfg = cfg or OptimizerConfig()
    if init not in INITS:
        raise InvalidConfig('init must be one of %s' % (INITS, ))
    count = hdcqo_parameter_count(spec, model.n)
    rng = np.random.default_rng(cfg.seed)
    starts = []
    for k in range(int(cfg.restarts)):
        if k == 0 and init == 'warm':
            starts.append(warm_start_params(model, spec, N=N,
                                            convention=convention))
        else:
            starts.append(random_params(count, rng))

    def build(params):
        return build_hdcqo_circuit(model, spec, params)

    best = _best_of(_statevector_cost(model, build), starts, cfg)
    best.run_result = evaluate_circuit(model, build(best.params),
                                       ground=ground, shots=shots, seed=seed)
    return best


def run_qaoa(model, p, cfg=None, ground=None, shots=0, seed=None):
    """
    Trains a depth-*p* QAOA circuit from ``cfg.restarts`` random starts
    drawn from ``Uniform(-pi, pi)`` and scores the best one.
    """
    cfg = cfg or OptimizerConfig()
    rng = np.random.default_rng(cfg.seed)
    starts = [random_params(2 * p, rng) for _ in range(int(cfg.restarts))]

    def build(params):
        return build_qaoa_circuit(model, p, params)

    best = _best_of(_statevector_cost(model, build), starts, cfg)
    best.run_result = evaluate_circuit(model, build(best.params),
                                       ground=ground, shots=shots, seed=seed)
    return best
