"""
Problem encoders: one-hot TSP, dense random QUBOs and large neighbourhood
search over sub-QUBOs

TSP variables are ``x_{t,c}`` ("city c is visited at step t") stored at
index ``t * n + c``, so the bitstring of a tour reads as n one-hot rows,
one per time step::

    '1000 0010 0100 0001'  ->  0 -> 2 -> 1 -> 3
"""

import json
import logging

import numpy as np

from dcqo.bitconv import to_bits
from dcqo.builders import AnsatzSpec, build_dcqo_circuit
from dcqo.exceptions import DegenerateModel, InvalidConfig, InvalidProblem, \
    LengthMismatch
from dcqo.ising import QuboProblem, brute_force_solve, qubo_to_ising
from dcqo.passes import DEFAULT_GATE_CUTOFF, apply_gate_cutoff
from dcqo.simulator import basis_state, probabilities, run
from dcqo.variational import run_hdcqo

logger = logging.getLogger(__name__)

STRATEGIES = ('greedy', 'sequential', 'random')

# smallest objective decrease accepted as an improvement
IMPROVEMENT_TOL = 1e-12


class TspInstance(object):
    """A symmetric travelling salesperson instance.

    :param distances: symmetric, non-negative ``n x n`` matrix with a zero
        diagonal.
    :param names: optional city names.
    :param penalty: one-hot constraint weight ``A``; defaults to
        ``n * max(d)`` (1 when every distance is zero).

    :raise InvalidProblem: on malformed distances or a non-positive penalty
    """

    def __init__(self, distances, names=None, penalty=None):
        d = np.array(distances, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 2:
            raise InvalidProblem('distances must be a square matrix with at '
                                 'least two cities')
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise InvalidProblem('distances must be finite and non-negative')
        if np.any(np.diag(d) != 0):
            raise InvalidProblem('a city must be at distance 0 from itself')
        if np.max(np.abs(d - d.T)) > 1e-12:
            raise InvalidProblem('distances must be symmetric')
        self.d = (d + d.T) / 2.0
        self.d.setflags(write=False)
        n = self.d.shape[0]
        self.names = list(names) if names is not None else [
            str(c) for c in range(n)]
        if len(self.names) != n:
            raise InvalidProblem('%d names for %d cities' % (
                len(self.names), n))
        if penalty is None:
            penalty = n * self.d.max() or 1.0
        if not penalty > 0:
            raise InvalidProblem('the penalty weight must be positive')
        self.penalty = float(penalty)

    @property
    def n(self):
        return self.d.shape[0]

    @property
    def num_qubits(self):
        return self.n ** 2

    @classmethod
    def from_coordinates(cls, coordinates, names=None, penalty=None):
        """Euclidean instance from a list of points."""
        pts = np.array(coordinates, dtype=float)
        if pts.ndim != 2:
            raise InvalidProblem('coordinates must be a list of points')
        diff = pts[:, None, :] - pts[None, :, :]
        return cls(np.sqrt((diff ** 2).sum(axis=-1)), names=names,
                   penalty=penalty)

    @classmethod
    def uniform(cls, n, distance=1.0, penalty=None):
        """Every pair of cities at the same *distance*."""
        d = np.full((n, n), float(distance))
        np.fill_diagonal(d, 0.0)
        return cls(d, penalty=penalty)

    @classmethod
    def from_dict(cls, data):
        """
        Reads ``{"cities": [...], "distances": [[...]]}`` or
        ``{"cities": [...], "coordinates": [[x, y], ...]}``; ``"penalty"``
        is optional.
        """
        names = data.get('cities')
        penalty = data.get('penalty')
        if 'distances' in data:
            return cls(data['distances'], names=names, penalty=penalty)
        if 'coordinates' in data:
            return cls.from_coordinates(data['coordinates'], names=names,
                                        penalty=penalty)
        raise InvalidProblem('a TSP file needs "distances" or "coordinates"')

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except ValueError as exc:
                raise InvalidProblem('%s: %s' % (path, exc))
        return cls.from_dict(data)

    def tour_length(self, path):
        """:returns: the length of the cyclic tour through *path*"""
        cities = list(getattr(path, 'cities', path))
        return float(sum(self.d[cities[t], cities[(t + 1) % len(cities)]]
                         for t in range(len(cities))))

    def __repr__(self):
        return 'TspInstance(n=%d, penalty=%g)' % (self.n, self.penalty)


class Path(object):
    """A feasible tour: a permutation of the cities, visited cyclically."""

    feasible = True

    def __init__(self, cities, length=None):
        self.cities = tuple(int(c) for c in cities)
        if sorted(self.cities) != list(range(len(self.cities))):
            raise InvalidProblem('%s is not a permutation' % (self.cities, ))
        self.length = length

    def __eq__(self, other):
        return isinstance(other, Path) and self.cities == other.cities

    def __repr__(self):
        return 'Path(%s)' % ' -> '.join(str(c) for c in self.cities)


class InfeasibleTour(object):
    """Why a bitstring is not a one-hot tour.

    :param rows: time steps without exactly one city.
    :param columns: cities not visited exactly once.
    """

    feasible = False

    def __init__(self, rows, columns):
        self.rows = list(rows)
        self.columns = list(columns)

    @property
    def reason(self):
        parts = []
        if self.rows:
            parts.append('time steps %s are not one-hot' % self.rows)
        if self.columns:
            parts.append('cities %s are not visited exactly once' %
                         self.columns)
        return '; '.join(parts)

    def __repr__(self):
        return 'InfeasibleTour(%s)' % self.reason


def _var(n, t, c):
    return t * n + c


def tsp_to_qubo(instance):
    """
    One-hot QUBO of a TSP instance::

        A sum_t (1 - sum_c x_tc)^2 + A sum_c (1 - sum_t x_tc)^2
          + sum_{c != c'} d_cc' sum_t x_{t,c} x_{t+1 mod n, c'}

    The constant ``2 n A`` is stored as the offset, so for a feasible
    bitstring ``evaluate(x)`` is exactly the tour length.
    """
    n = instance.n
    A = instance.penalty
    terms = []
    for t in range(n):
        for c in range(n):
            # each variable sits in one row and one column
            terms.append((_var(n, t, c), _var(n, t, c), -2.0 * A))
            for other in range(c + 1, n):
                terms.append((_var(n, t, c), _var(n, t, other), 2.0 * A))
                terms.append((_var(n, c, t), _var(n, other, t), 2.0 * A))
    for t in range(n):
        nxt = (t + 1) % n
        for c in range(n):
            for c2 in range(n):
                if c != c2 and instance.d[c, c2]:
                    terms.append((_var(n, t, c), _var(n, nxt, c2),
                                  instance.d[c, c2]))
    return QuboProblem.from_terms(n * n, terms, offset=2.0 * n * A,
                                  name='tsp-%d' % n)


def _tsp_size(instance_or_n):
    if isinstance(instance_or_n, TspInstance):
        return instance_or_n.n, instance_or_n
    return int(instance_or_n), None


def decode_tsp(x, instance_or_n):
    """
    :param instance_or_n: a :class:`TspInstance` (the returned path then
        carries its length) or the city count.
    :returns: a :class:`Path` when every time step and every city is
        one-hot, an :class:`InfeasibleTour` naming the violations otherwise

    :raise LengthMismatch: when *x* doesn't have ``n**2`` bits
    """
    n, instance = _tsp_size(instance_or_n)
    grid = to_bits(x, n * n).reshape(n, n)
    rows = [t for t in range(n) if grid[t].sum() != 1]
    columns = [c for c in range(n) if grid[:, c].sum() != 1]
    if rows or columns:
        return InfeasibleTour(rows, columns)
    cities = [int(np.flatnonzero(grid[t])[0]) for t in range(n)]
    length = instance.tour_length(cities) if instance is not None else None
    return Path(cities, length)


def encode_path(path, n=None):
    """:returns: the bitstring (qubit 0 first) of a tour"""
    cities = list(getattr(path, 'cities', path))
    n = n or len(cities)
    if len(cities) != n:
        raise LengthMismatch('a tour of %d cities needs %d steps' % (n, n))
    bits = ['0'] * (n * n)
    for t, c in enumerate(cities):
        bits[_var(n, t, c)] = '1'
    return ''.join(bits)


def dense_qubo_instance(n=16, seed=0):
    """
    Fully connected random QUBO: every entry ``Q_ij`` with ``i <= j`` is
    drawn from ``Uniform(-1, 1)`` (row by row) and mirrored.
    """
    if n < 1:
        raise InvalidProblem('n must be >= 1')
    rng = np.random.default_rng(seed)
    Q = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            Q[i, j] = Q[j, i] = rng.uniform(-1.0, 1.0)
    return QuboProblem(Q, name='dense-%d-seed-%d' % (n, seed))


class SubQubo(object):
    """
    A QUBO over a subset of variables, the others clamped to *assignment*.

    ``problem.evaluate(x_sub)`` equals the full objective of the assignment
    with ``variables`` replaced by ``x_sub``.
    """

    def __init__(self, problem, variables, assignment):
        self.problem = problem
        self.variables = np.asarray(variables, dtype=np.int64)
        self.assignment = np.asarray(assignment, dtype=np.uint8)

    def merge(self, sub_x):
        """:returns: the full assignment with the subset set to *sub_x*"""
        full = self.assignment.copy()
        full[self.variables] = to_bits(sub_x, len(self.variables))
        return full

    def __repr__(self):
        return 'SubQubo(variables=%s)' % self.variables.tolist()


def clamp_qubo(q, variables, assignment):
    """
    Restricts *q* to *variables*. Cross terms with the clamped variables
    become linear terms ``2 (Q_SR x_R)_i`` on the diagonal, and
    ``x_R^T Q_RR x_R`` joins the offset.
    """
    variables = np.asarray(variables, dtype=np.int64)
    x = to_bits(assignment, q.n).astype(float)
    rest = np.setdiff1d(np.arange(q.n), variables)
    Q = q.Q[np.ix_(variables, variables)].copy()
    x_rest = x[rest]
    Q[np.diag_indices_from(Q)] += 2.0 * (q.Q[np.ix_(variables, rest)] @
                                         x_rest)
    offset = float(x_rest @ q.Q[np.ix_(rest, rest)] @ x_rest) + q.offset
    return SubQubo(QuboProblem(Q, offset=offset, name=q.name), variables,
                   x.astype(np.uint8))


def _greedy_subsets(q, k):
    weights = np.abs(q.Q.copy())
    np.fill_diagonal(weights, 0.0)
    strength = weights.sum(axis=1)
    uncovered = np.ones(q.n, dtype=bool)
    subsets = []
    while uncovered.any():
        candidates = np.flatnonzero(uncovered)
        seed = int(candidates[np.argmax(strength[candidates])])
        subset = [seed]
        inside = np.zeros(q.n, dtype=bool)
        inside[seed] = True
        link = weights[seed].copy()
        while len(subset) < k:
            # strongest coupling to the subset, uncovered variables first
            score = np.where(inside, -np.inf, link)
            best = np.flatnonzero(score == score.max())
            fresh = best[uncovered[best]]
            pick = int(fresh[0] if fresh.size else best[0])
            subset.append(pick)
            inside[pick] = True
            link += weights[pick]
        uncovered[subset] = False
        subsets.append(sorted(subset))
    return subsets


def _chunked(order, k):
    subsets = []
    for start in range(0, len(order), k):
        chunk = order[start:start + k]
        if len(chunk) < k:
            chunk = order[-k:]
        subsets.append(sorted(int(v) for v in chunk))
    return subsets


def variable_subsets(q, k, strategy='greedy', seed=None):
    """
    Splits the variables of *q* into size-*k* subsets that together cover
    every variable.

    ``'greedy'`` seeds each subset with the uncovered variable of largest
    total absolute coupling and grows it by strongest coupling to the
    subset. ``'sequential'`` takes index blocks and ``'random'`` blocks of a
    seeded permutation; a short last block is filled up from the end.
    """
    if int(k) != k or not 1 <= k <= q.n:
        raise InvalidConfig('k must be an integer in 1..%d, got %r' % (
            q.n, k))
    if strategy not in STRATEGIES:
        raise InvalidConfig('unknown decomposition strategy %r' % (
            strategy, ))
    if k == q.n:
        return [list(range(q.n))]
    if strategy == 'greedy':
        return _greedy_subsets(q, k)
    if strategy == 'sequential':
        return _chunked(list(range(q.n)), k)
    order = np.random.default_rng(seed).permutation(q.n).tolist()
    return _chunked(order, k)


def decompose_qubo(q, k, strategy='greedy', assignment=None, seed=None):
    """
    :returns: one :class:`SubQubo` per subset of :func:`variable_subsets`,
        the remaining variables clamped to *assignment* (all zeros by
        default)
    """
    if assignment is None:
        assignment = np.zeros(q.n, dtype=np.uint8)
    return [clamp_qubo(q, subset, assignment)
            for subset in variable_subsets(q, k, strategy, seed=seed)]


def greedy_descent(q, x=None):
    """
    Steepest single bit-flip descent, from all zeros by default.

    :returns: a local minimum as a uint8 array
    """
    x = np.zeros(q.n) if x is None else to_bits(x, q.n).astype(float)
    Q = q.Q
    diag = np.diag(Q)
    while True:
        # f(x with bit i flipped) - f(x)
        s = 1.0 - 2.0 * x
        delta = s * (2.0 * (Q @ x - diag * x) + diag)
        i = int(np.argmin(delta))
        if delta[i] >= -IMPROVEMENT_TOL:
            return x.astype(np.uint8)
        x[i] = 1.0 - x[i]


def brute_force_subsolver(problem):
    """Exact minimiser of a small QUBO (lowest index among ties)."""
    ground = brute_force_solve(qubo_to_ising(problem))
    return to_bits(int(ground.indices[0]), problem.n)


def _most_probable(problem, circuit):
    state = run(circuit, basis_state(problem.n, 0))
    return to_bits(probabilities(state).top(1)[0][0], problem.n)


def dcqo_subsolver(N=2, cutoff=DEFAULT_GATE_CUTOFF, convention='action'):
    """
    :returns: a subsolver that runs the cd-only DCQO circuit of the
        sub-QUBO and reads off its most probable outcome
    """
    def solve(problem):
        model = qubo_to_ising(problem)
        try:
            circuit = build_dcqo_circuit(model, N, convention=convention)
        except DegenerateModel:
            return np.zeros(problem.n, dtype=np.uint8)
        return _most_probable(problem, apply_gate_cutoff(circuit, cutoff))
    return solve


def hdcqo_subsolver(spec=None, cfg=None):
    """
    :returns: a subsolver that trains a warm-started h-DCQO ansatz on the
        sub-QUBO and reads off the most probable outcome
    """
    spec = spec or AnsatzSpec('two-param', layers=1)

    def solve(problem):
        model = qubo_to_ising(problem)
        try:
            result = run_hdcqo(model, spec, init='warm', cfg=cfg)
        except DegenerateModel:
            return np.zeros(problem.n, dtype=np.uint8)
        return to_bits(result.run_result.distribution.top(1)[0][0],
                       problem.n)
    return solve


class LnsResult(object):
    """Incumbent of a large neighbourhood search.

    ``trace`` starts with the initial objective and holds the incumbent
    objective after every subproblem solve.
    """

    def __init__(self, assignment, cost, trace, solves, sweeps):
        self.assignment = assignment
        self.cost = cost
        self.trace = trace
        self.solves = solves
        self.sweeps = sweeps

    def as_dict(self):
        return dict(assignment=''.join(str(int(b)) for b in self.assignment),
                    cost=self.cost, trace=self.trace, solves=self.solves,
                    sweeps=self.sweeps)

    def __repr__(self):
        return 'LnsResult(cost=%g, solves=%d, sweeps=%d)' % (
            self.cost, self.solves, self.sweeps)


def lns_solve(q, k, subsolver=brute_force_subsolver, budget=100,
              strategy='greedy', seed=None, initial=None):
    """
    Large neighbourhood search.

    Starts from :func:`greedy_descent` (or *initial*), then sweeps over the
    subsets of :func:`variable_subsets`: each subset is clamped around the
    incumbent, solved by *subsolver* and merged back when the objective
    drops. Stops after a sweep without improvement or after *budget*
    subproblem solves.

    :param subsolver: callable mapping a :class:`QuboProblem` to a 0/1
        array.
    """
    if int(budget) != budget or budget < 0:
        raise InvalidConfig('budget must be a non-negative integer')
    subsets = variable_subsets(q, k, strategy, seed=seed)
    x = greedy_descent(q) if initial is None else to_bits(initial, q.n)
    cost = q.evaluate(x)
    trace = [cost]
    solves = 0
    sweeps = 0
    while solves < budget:
        sweeps += 1
        improved = False
        for subset in subsets:
            if solves >= budget:
                break
            sub = clamp_qubo(q, subset, x)
            candidate = sub.merge(subsolver(sub.problem))
            solves += 1
            new_cost = q.evaluate(candidate)
            if new_cost < cost - IMPROVEMENT_TOL:
                logger.info('LNS accepted subset %s: %g -> %g', subset, cost,
                            new_cost)
                x, cost = candidate, new_cost
                improved = True
            trace.append(cost)
        if not improved:
            break
    logger.debug('LNS finished after %d sweeps, %d solves: %g', sweeps, solves,
                 cost)
    return LnsResult(x, cost, trace, solves, sweeps)
