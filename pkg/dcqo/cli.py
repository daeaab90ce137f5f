"""
Command line experiment runner

::

    dcqo solve --tsp tsp3.json --alg dcqo --steps 2 --time 0.2 --cutoff 0.1
    dcqo regime-scan --random-spin-glass 10 --seed 7 --steps 20
    dcqo compare --dense-qubo 16 --seeds 0-9 --algorithms dqa,dcqo
    dcqo lns --dense-qubo 24 --seed 3 --k 8 --subsolver brute

Exit codes: 0 on success, 1 on domain errors (reported as a JSON object on
stderr), 2 on usage errors.
"""

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import List, Optional

import numpy as np

from dcqo import __version__, settings
from dcqo.builders import (ANSATZ_VARIANTS, AnsatzSpec, build_dcqo_circuit,
                           build_dqa_circuit)
from dcqo.cd import CONVENTIONS, coefficient_table
from dcqo.circuit import dump_circuit
from dcqo.exceptions import DcqoError, InvalidConfig
from dcqo.ising import (brute_force_solve, qubo_to_ising, random_spin_glass,
                        read_qubo, success_probability)
from dcqo.passes import apply_gate_cutoff, apply_step_cutoff
from dcqo.problems import (STRATEGIES, TspInstance, brute_force_subsolver,
                           dcqo_subsolver, decode_tsp, dense_qubo_instance,
                           hdcqo_subsolver, lns_solve, tsp_to_qubo)
from dcqo.simulator import DEFAULT_SHOTS, exact_evolve, probabilities
from dcqo.variational import (DEFAULT_TOP_K, METHODS, OptimizerConfig,
                              evaluate_circuit, run_hdcqo, run_qaoa)

logger = logging.getLogger(__name__)

ALGORITHMS = ('dqa', 'dcqo', 'dcqo-full', 'qaoa', 'hdcqo')

SCAN_VARIANTS = ('anneal', 'full', 'cd-only')

# Trotter steps when --steps is not given
DEFAULT_STEPS = {'dqa': 6, 'dcqo': 2, 'dcqo-full': 2}

DATA_DIR = os.path.join(os.path.dirname(__file__), 'data')


@dataclass
class ExperimentConfig:
    """Everything one ``solve`` run depends on.

    Exactly one problem source is set: ``tsp``, ``qubo``,
    ``random_spin_glass`` or ``dense_qubo``.
    """

    algorithm: str = 'dcqo'
    tsp: Optional[str] = None
    qubo: Optional[str] = None
    random_spin_glass: Optional[int] = None
    dense_qubo: Optional[int] = None
    seed: int = 0
    time: float = 1.0
    steps: Optional[int] = None
    layers: int = 1
    variant: str = 'two-param'
    init: str = 'warm'
    cutoff: Optional[float] = None
    step_cutoff: Optional[float] = None
    shots: int = 0
    restarts: int = 1
    max_iterations: int = 500
    method: str = 'nelder-mead'
    convention: str = 'action'
    top_k: int = DEFAULT_TOP_K

    def __post_init__(self):
        sources = [self.tsp, self.qubo, self.random_spin_glass,
                   self.dense_qubo]
        if sum(s is not None for s in sources) != 1:
            raise InvalidConfig('give exactly one problem source')
        if self.algorithm not in ALGORITHMS:
            raise InvalidConfig('unknown algorithm %r' % (self.algorithm, ))
        if not self.time > 0:
            raise InvalidConfig('--time must be positive')
        if self.steps is not None and self.steps < 1:
            raise InvalidConfig('--steps must be >= 1')
        if self.layers < 0:
            raise InvalidConfig('--layers must be >= 0')
        if self.variant not in ANSATZ_VARIANTS:
            raise InvalidConfig('unknown ansatz variant %r' % (self.variant, ))
        for name in ('cutoff', 'step_cutoff'):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise InvalidConfig('--%s must be >= 0' % name.replace(
                    '_', '-'))
        if self.shots < 0:
            raise InvalidConfig('--shots must be >= 0')
        if int(self.top_k) != self.top_k or self.top_k < 1:
            raise InvalidConfig('--top-k must be a positive integer')
        if self.convention not in CONVENTIONS:
            raise InvalidConfig('unknown convention %r' % (self.convention, ))

    @property
    def source(self):
        if self.tsp is not None:
            return 'tsp:%s' % self.tsp
        if self.qubo is not None:
            return 'qubo:%s' % self.qubo
        if self.random_spin_glass is not None:
            return 'random-spin-glass:%d:seed=%d' % (self.random_spin_glass,
                                                     self.seed)
        return 'dense-qubo:%d:seed=%d' % (self.dense_qubo, self.seed)

    def optimizer(self):
        return OptimizerConfig(method=self.method,
                               max_iterations=self.max_iterations,
                               restarts=self.restarts, seed=self.seed)


def _data_path(path):
    """Falls back to the bundled instances for bare file names."""
    if os.path.exists(path):
        return path
    bundled = os.path.join(DATA_DIR, os.path.basename(path))
    if os.path.exists(bundled):
        return bundled
    raise InvalidConfig('no such file: %s' % path)


def load_problem(cfg):
    """:returns: ``(model, tsp_instance_or_None)``"""
    if cfg.tsp is not None:
        tsp = TspInstance.from_json(_data_path(cfg.tsp))
        return qubo_to_ising(tsp_to_qubo(tsp)), tsp
    if cfg.qubo is not None:
        return qubo_to_ising(read_qubo(_data_path(cfg.qubo))), None
    if cfg.random_spin_glass is not None:
        return random_spin_glass(cfg.random_spin_glass, cfg.seed), None
    return qubo_to_ising(dense_qubo_instance(cfg.dense_qubo, cfg.seed)), None


def _build_circuit(cfg, model, ground):
    """:returns: ``(circuit, optimization_result_or_None)``"""
    steps = cfg.steps
    if cfg.algorithm == 'dqa':
        return build_dqa_circuit(model, cfg.time,
                                 steps or DEFAULT_STEPS['dqa']), None
    if cfg.algorithm in ('dcqo', 'dcqo-full'):
        N = steps or DEFAULT_STEPS[cfg.algorithm]
        kept = None
        if cfg.step_cutoff is not None:
            table = coefficient_table(model, cfg.time, N,
                                      convention=cfg.convention)
            kept = apply_step_cutoff(table, cfg.step_cutoff)
        variant = 'full' if cfg.algorithm == 'dcqo-full' else 'cd-only'
        return build_dcqo_circuit(model, N, variant=variant, T=cfg.time,
                                  steps=kept,
                                  convention=cfg.convention), None
    if cfg.algorithm == 'qaoa':
        result = run_qaoa(model, cfg.layers, cfg.optimizer(), ground=ground)
    else:
        spec = AnsatzSpec(cfg.variant, layers=cfg.layers)
        result = run_hdcqo(model, spec, init=cfg.init, cfg=cfg.optimizer(),
                           N=steps, ground=ground,
                           convention=cfg.convention)
    return result.run_result.circuit, result


def run_experiment(cfg, dump_path=None):
    """
    Runs one ``solve`` configuration end to end.

    :returns: a JSON-serialisable result dict
    """
    started = time.perf_counter()
    model, tsp = load_problem(cfg)
    ground = brute_force_solve(model)
    circuit, optimized = _build_circuit(cfg, model, ground)
    if cfg.cutoff is not None:
        circuit = apply_gate_cutoff(circuit, cfg.cutoff)
    run = evaluate_circuit(model, circuit, ground=ground, shots=cfg.shots,
                           seed=cfg.seed)
    counts = run.gate_counts
    if cfg.algorithm in ('dcqo', 'dcqo-full'):
        logger.warning('DCQO two-qubit count: %d CX with fused YZ+ZY blocks, '
                       '%d CX unfused', counts['cx']['two_qubit'],
                       counts['cx_unfused']['two_qubit'])
    result = dict(config=asdict(cfg), source=cfg.source, version=__version__,
                  num_qubits=model.n,
                  two_qubit_gates=counts['cx']['two_qubit'],
                  two_qubit_gates_unfused=counts['cx_unfused']['two_qubit'],
                  ms_gates=counts['ms']['MS'],
                  distribution=run.distribution.as_dict())
    result.update(run.as_dict(top_k=cfg.top_k))
    if cfg.cutoff is not None:
        result['cutoff'] = circuit.metadata['cutoff']
    if optimized is not None:
        result['optimizer'] = dict(params=optimized.params.tolist(),
                                   cost=optimized.cost,
                                   trace=optimized.trace,
                                   restart=optimized.restart,
                                   restart_costs=optimized.restart_costs)
    if tsp is not None:
        result['tours'] = [
            dict(bitstring=row['bitstring'],
                 tour=_describe_tour(decode_tsp(row['bitstring'], tsp)))
            for row in result['top']]
    if dump_path:
        dump_circuit(circuit, dump_path)
    result['wall_time'] = time.perf_counter() - started
    return result


def _describe_tour(decoded):
    if decoded.feasible:
        return dict(cities=list(decoded.cities), length=decoded.length)
    return dict(infeasible=decoded.reason)


def write_atomic(path, text):
    """Writes *text* next to *path* first and renames it into place."""
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix='.dcqo-', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w') as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text, path):
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def _json_text(payload):
    return json.dumps(payload, indent=2, sort_keys=True, default=_jsonable)


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError('%r is not JSON serialisable' % (value, ))


def _csv_text(rows, fieldnames):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator='\n')
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _config_from(args, **overrides):
    keys = ExperimentConfig.__dataclass_fields__
    values = {k: getattr(args, k) for k in keys if hasattr(args, k)}
    values.update(overrides)
    return ExperimentConfig(**values)


def cmd_solve(args):
    cfg = _config_from(args)
    result = run_experiment(cfg, dump_path=args.dump_circuit)
    _emit(_json_text(result), args.output)
    return result


def _scan_times(args):
    if args.times:
        return [float(t) for t in args.times.split(',')]
    if args.points == 1:
        return [args.t_min]
    return np.logspace(np.log10(args.t_min), np.log10(args.t_max),
                       args.points).tolist()


def _scan_sp(model, ground, variant, T, N, args):
    if args.oracle:
        state = exact_evolve(model, variant, T, grid=args.grid,
                             convention=args.convention)
        return success_probability(probabilities(state), ground)
    if variant == 'anneal':
        circuit = build_dqa_circuit(model, T, N)
    else:
        circuit = build_dcqo_circuit(
            model, N, variant='full' if variant == 'full' else 'cd-only',
            T=T, convention=args.convention)
    return evaluate_circuit(model, circuit, ground=ground).success_probability


def cmd_regime_scan(args):
    """
    Success probability of the annealing, full and CD-only evolutions over
    a log-spaced grid of total times.
    """
    cfg = _config_from(args, algorithm='dcqo')
    model, _ = load_problem(cfg)
    ground = brute_force_solve(model)
    N = args.steps or 20
    rows = []
    coefficient_rows = []
    for T in _scan_times(args):
        for variant in SCAN_VARIANTS:
            sp = _scan_sp(model, ground, variant, T, N, args)
            rows.append(dict(T=T, variant=variant, SP=sp))
            logger.info('T=%g %s: SP=%g', T, variant, sp)
        if args.coefficients:
            for row in coefficient_table(model, T, N,
                                         convention=args.convention):
                coefficient_rows.append(dict(T=T, **row.as_dict()))
    _emit(_csv_text(rows, ['T', 'variant', 'SP']), args.output)
    if args.coefficients:
        write_atomic(args.coefficients, _csv_text(
            coefficient_rows, list(coefficient_rows[0].keys())))
    return rows


def _parse_seeds(text):
    seeds = []
    for part in text.split(','):
        if '-' in part:
            lo, hi = part.split('-', 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    return seeds


COMPARE_FIELDS = ['seed', 'algorithm', 'steps', 'SP', 'AR', 'average_energy',
                  'two_qubit_gates', 'reference_two_qubit_gates']


def _compare_row(cfg):
    result = run_experiment(cfg)
    return dict(seed=cfg.seed, algorithm=cfg.algorithm,
                steps=cfg.steps or DEFAULT_STEPS.get(cfg.algorithm),
                SP=result['success_probability'],
                AR=result['approximation_ratio'],
                average_energy=result['average_energy'],
                two_qubit_gates=result['two_qubit_gates'],
                reference_two_qubit_gates=None)


def _run_rows(configs):
    if settings.WORKERS > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=settings.WORKERS) as pool:
            return list(pool.map(_compare_row, configs))
    return [_compare_row(cfg) for cfg in configs]


def matched_dqa_steps(model, two_qubit_gates):
    """
    :returns: the DQA step count whose CX count comes closest to
        *two_qubit_gates*; every step costs two CX per coupled pair.
    """
    per_step = 2 * len(list(model.couplings()))
    if not per_step:
        return 1
    return max(1, int(round(two_qubit_gates / float(per_step))))


def cmd_compare(args):
    """
    Every algorithm on every seeded instance, fanned out over workers.

    Unless ``--no-match-depth`` is given, DQA runs with as many Trotter
    steps as it takes to match the CX count of the DCQO circuit on the
    same instance (the larger one when both DCQO variants run).
    """
    algorithms = [a for a in args.algorithms.split(',') if a]
    if not algorithms:
        raise InvalidConfig('--algorithms must name at least one algorithm')
    seeds = _parse_seeds(args.seeds)
    if not seeds:
        raise InvalidConfig('--seeds must name at least one seed')
    if args.random_spin_glass is None and args.dense_qubo is None:
        args.dense_qubo = 16
    match = args.match_depth and 'dqa' in algorithms and \
        any(a in ('dcqo', 'dcqo-full') for a in algorithms)
    first = [_config_from(args, algorithm=alg, seed=seed)
             for seed in seeds for alg in algorithms
             if not (match and alg == 'dqa')]
    done = {(row['seed'], row['algorithm']): row
            for row in _run_rows(first)}
    if match:
        later = []
        references = {}
        for seed in seeds:
            reference = max(done[seed, alg]['two_qubit_gates']
                            for alg in algorithms
                            if alg in ('dcqo', 'dcqo-full'))
            cfg = _config_from(args, algorithm='dqa', seed=seed)
            model, _ = load_problem(cfg)
            steps = matched_dqa_steps(model, reference)
            logger.info('seed %d: DQA with %d steps against %d DCQO CX',
                        seed, steps, reference)
            later.append(replace(cfg, steps=steps))
            references[seed] = reference
        for row in _run_rows(later):
            row['reference_two_qubit_gates'] = references[row['seed']]
            done[row['seed'], 'dqa'] = row
    rows = [done[seed, alg] for seed in seeds for alg in algorithms]
    if args.output:
        write_atomic(args.output + '.csv', _csv_text(rows, COMPARE_FIELDS))
        write_atomic(args.output + '.json', _json_text(rows))
    else:
        sys.stdout.write(_csv_text(rows, COMPARE_FIELDS))
    return rows


def cmd_lns(args):
    if args.qubo is not None:
        q = read_qubo(_data_path(args.qubo))
    elif args.dense_qubo is not None:
        q = dense_qubo_instance(args.dense_qubo, args.seed)
    else:
        raise InvalidConfig('give --qubo or --dense-qubo')
    if args.subsolver == 'brute':
        subsolver = brute_force_subsolver
    elif args.subsolver == 'dcqo':
        subsolver = dcqo_subsolver(N=args.steps or 2, cutoff=args.cutoff)
    else:
        subsolver = hdcqo_subsolver(
            AnsatzSpec(args.variant, layers=args.layers),
            OptimizerConfig(max_iterations=args.max_iterations,
                            seed=args.seed))
    result = lns_solve(q, args.k, subsolver=subsolver, budget=args.budget,
                       strategy=args.strategy, seed=args.seed)
    payload = dict(result.as_dict(), n=q.n, k=args.k,
                   subsolver=args.subsolver, strategy=args.strategy)
    _emit(_json_text(payload), args.output)
    return payload


def _add_source(parser, required=True):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument('--tsp', metavar='FILE',
                       help='TSP JSON instance (bundled: tsp3.json, '
                            'tsp4.json)')
    group.add_argument('--qubo', metavar='FILE', help='QUBO text file')
    group.add_argument('--random-spin-glass', type=int, metavar='N',
                       help='fully connected spin glass, U(-1, 1)')
    group.add_argument('--dense-qubo', type=int, metavar='N',
                       help='fully connected random QUBO, U(-1, 1)')
    parser.add_argument('--seed', type=int, default=0,
                        help='instance/optimizer/sampling seed (default 0)')


def _add_run_options(parser):
    parser.add_argument('--alg', dest='algorithm', choices=ALGORITHMS,
                        default='dcqo', help='algorithm (default dcqo)')
    parser.add_argument('--time', type=float, default=1.0,
                        help='total evolution time T (default 1.0)')
    parser.add_argument('--steps', type=int,
                        help='Trotter steps N (default 6 for dqa, 2 for '
                             'dcqo, layers + 1 for warm h-DCQO)')
    parser.add_argument('--layers', type=int, default=1,
                        help='QAOA / h-DCQO layers p (default 1)')
    parser.add_argument('--variant', choices=ANSATZ_VARIANTS,
                        default='two-param', help='h-DCQO ansatz')
    init = parser.add_mutually_exclusive_group()
    init.add_argument('--warm', dest='init', action='store_const',
                      const='warm', help='warm-start h-DCQO (default)')
    init.add_argument('--random-init', dest='init', action='store_const',
                      const='random', help='random h-DCQO start')
    parser.set_defaults(init='warm')
    parser.add_argument('--cutoff', type=float,
                        help='gate-angle cutoff, e.g. 0.1 (default off)')
    parser.add_argument('--step-cutoff', type=float,
                        help='drop DCQO steps with |2 lamdot alpha1| below '
                             'this, e.g. 0.005 (default off)')
    parser.add_argument('--shots', type=int, default=0,
                        help='measurements, 0 for the exact distribution '
                             '(default 0, sampled runs typically use %d)' %
                             DEFAULT_SHOTS)
    parser.add_argument('--restarts', type=int, default=1,
                        help='optimizer restarts (default 1)')
    parser.add_argument('--max-iterations', type=int, default=500,
                        help='optimizer iterations per restart (default 500)')
    parser.add_argument('--method', choices=METHODS, default='nelder-mead')
    parser.add_argument('--convention', choices=CONVENTIONS,
                        default='action',
                        help='alpha1 coupling-sum convention')
    parser.add_argument('--top-k', type=int, default=DEFAULT_TOP_K,
                        help='outcomes listed in the result (default 20)')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='dcqo', description='Digitized counterdiabatic quantum '
                                 'optimisation experiments')
    parser.add_argument('--version', action='version', version=__version__)
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='-v for INFO, -vv for DEBUG logging')
    sub = parser.add_subparsers(dest='command', required=True)

    solve = sub.add_parser('solve', help='run one algorithm on one problem')
    _add_source(solve)
    _add_run_options(solve)
    solve.add_argument('--output', '-o', help='JSON result file '
                                              '(default stdout)')
    solve.add_argument('--dump-circuit', metavar='PATH',
                       help='write the final circuit and its JSON sidecar')
    solve.set_defaults(func=cmd_solve)

    scan = sub.add_parser('regime-scan',
                          help='success probability versus total time')
    _add_source(scan)
    scan.add_argument('--steps', type=int, help='Trotter steps (default 20)')
    scan.add_argument('--times', help='comma separated T values')
    scan.add_argument('--t-min', type=float, default=0.005)
    scan.add_argument('--t-max', type=float, default=10.0)
    scan.add_argument('--points', type=int, default=8)
    scan.add_argument('--oracle', action='store_true',
                      help='continuous evolution instead of circuits')
    scan.add_argument('--grid', type=int, default=400,
                      help='oracle time slices (default 400)')
    scan.add_argument('--convention', choices=CONVENTIONS, default='action')
    scan.add_argument('--coefficients', metavar='CSV',
                      help='also write the per-step coefficient table')
    scan.add_argument('--output', '-o', help='CSV file (default stdout)')
    scan.set_defaults(func=cmd_regime_scan)

    compare = sub.add_parser('compare',
                             help='algorithms side by side over seeds')
    _add_source(compare, required=False)
    _add_run_options(compare)
    compare.add_argument('--algorithms', default='dqa,dcqo',
                         help='comma separated (default dqa,dcqo)')
    compare.add_argument('--seeds', default='0-9',
                         help='e.g. 0-9 or 1,4,7 (default 0-9)')
    compare.add_argument('--no-match-depth', dest='match_depth',
                         action='store_false',
                         help='run DQA with --steps instead of matching '
                              'the DCQO CX count')
    compare.add_argument('--output', '-o', metavar='PREFIX',
                         help='writes PREFIX.csv and PREFIX.json')
    compare.set_defaults(func=cmd_compare)

    lns = sub.add_parser('lns', help='large neighbourhood search')
    group = lns.add_mutually_exclusive_group(required=True)
    group.add_argument('--qubo', metavar='FILE')
    group.add_argument('--dense-qubo', type=int, metavar='N')
    lns.add_argument('--seed', type=int, default=0)
    lns.add_argument('--k', type=int, default=16, help='sub-QUBO size')
    lns.add_argument('--subsolver', choices=('brute', 'dcqo', 'hdcqo'),
                     default='brute')
    lns.add_argument('--strategy', choices=STRATEGIES, default='greedy')
    lns.add_argument('--budget', type=int, default=100,
                     help='maximum subproblem solves (default 100)')
    lns.add_argument('--steps', type=int, help='DCQO steps (default 2)')
    lns.add_argument('--cutoff', type=float, default=0.1)
    lns.add_argument('--variant', choices=ANSATZ_VARIANTS,
                     default='two-param')
    lns.add_argument('--layers', type=int, default=1)
    lns.add_argument('--max-iterations', type=int, default=200)
    lns.add_argument('--output', '-o', help='JSON file (default stdout)')
    lns.set_defaults(func=cmd_lns)
    return parser


def _configure_logging(verbose):
    level = settings.LOG_LEVEL
    if verbose == 1:
        level = 'INFO'
    elif verbose >= 2:
        level = 'DEBUG'
    logging.basicConfig(level=level,
                        format='%(asctime)s %(name)s %(levelname)s '
                               '%(message)s')


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        args.func(args)
    except DcqoError as exc:
        logger.debug('command failed', exc_info=True)
        sys.stderr.write(json.dumps(dict(error=type(exc).__name__,
                                         message=str(exc))) + '\n')
        return 1
    return 0
