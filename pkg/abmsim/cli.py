"""Command line interface of abmsim."""

import os
import time
import argparse
import numba
import numpy as np
import pandas as pd
from . import utils as ut
from . import io_utils as io_ut
from .harness import (ExperimentSpec, sample_case, run_pipeline, run_benchmark,
                      run_sensitivity, results_rows)
from .norm_space import ContinuousEnv
from .simu import run_sim, PositionLog
from .graph_search import search_graph, tsxm_search, __SEARCH_DIC__
from .walk_approx import (fit_walk_model, save_walk_model, load_walk_model,
                          __WALK_DIC__)
from .constants import ABM_SIM_PRINT, SEP, VERSION, SWEEP_RANGES


def _shared_args(parser):
    parser.add_argument('--config', default=None, type=str,
                        help='Configuration file (yaml or json)')
    parser.add_argument('--seed', default=None, type=int,
                        help='Master seed, replaces seeds.master')
    parser.add_argument('--out', default='.', type=str,
                        help='Output directory')
    parser.add_argument('--graph-search', default=None, choices=list(__SEARCH_DIC__),
                        help='Graph search method')
    parser.add_argument('--walk', default=None, choices=list(__WALK_DIC__),
                        help='Walk model')
    parser.add_argument('--replicates', default=None, type=int,
                        help='Number of paired seeds per case')
    parser.add_argument('--nb_threads', default=None, type=int,
                        help='Number of thread numba can use')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='Print progress')


def build_parser():
    """Build the argument parser with one sub-parser per command."""
    parser = argparse.ArgumentParser(prog='abmsim',
                                     description='Norm-based to graph-based agent based '
                                                 'epidemic simulation')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('simulate', help='One simulation -> trajectory csv')
    _shared_args(p)
    p.add_argument('--mode', default='norm', choices=['norm', 'graph'])
    p.add_argument('--graph-dir', default=None, type=str,
                   help='Directory with nodes.csv and edges.csv (graph mode)')
    p.add_argument('--walk-model', default=None, type=str,
                   help='Walk model json file (graph mode)')

    p = sub.add_parser('fit-graph', help='Position log -> graph csv files')
    _shared_args(p)
    p.add_argument('--log', required=True, type=str, help='Position log csv')
    p.add_argument('--env', default=None, type=str, help='Environment circles csv')

    p = sub.add_parser('fit-walk', help='Position log and graph -> walk model file')
    _shared_args(p)
    p.add_argument('--log', required=True, type=str, help='Position log csv')
    p.add_argument('--graph-dir', required=True, type=str,
                   help='Directory with nodes.csv and edges.csv')

    p = sub.add_parser('evaluate', help='One pipeline on one case')
    _shared_args(p)

    p = sub.add_parser('benchmark', help='Every method combination on test cases')
    _shared_args(p)

    p = sub.add_parser('sensitivity', help='Sweep one parameter')
    _shared_args(p)
    p.add_argument('--sweep', required=True, choices=list(SWEEP_RANGES))
    p.add_argument('--range', default=None, type=float, nargs=2, metavar=('LOW', 'HIGH'))
    p.add_argument('--n', default=None, type=int, help='Number of cases')
    return parser


def _spec(args):
    spec = ExperimentSpec(args.config if args.config is not None else {})
    methods = {}
    if args.graph_search is not None:
        methods['graph_search'] = [args.graph_search]
    if args.walk is not None:
        methods['walk'] = [args.walk]
    if args.replicates is not None:
        methods['replicates'] = args.replicates
    seeds = {} if args.seed is None else {'master': args.seed}
    return spec.with_overrides(methods=methods, seeds=seeds)


def _simulate(args, spec, timings):
    case = sample_case(spec, ut.key_rng(spec.master_seed, 3, 0), index=0)
    seed = ut.key_seed(spec.master_seed, 3, 0, 1)
    if args.mode == 'norm':
        space, pop, wp = case.env, case.pop, case.wp
    else:
        if args.graph_dir is None or args.walk_model is None:
            raise ValueError('graph mode needs --graph-dir and --walk-model')
        graph = io_ut.read_graph(args.graph_dir)
        walk_model = load_walk_model(args.walk_model)
        space, pop, wp = (graph, walk_model), case.pop.on_graph(graph), None
    traj, log = run_sim(args.mode, pop, space, case.params, wp, case.cfg, seed)
    traj.to_csv(os.path.join(args.out, 'trajectory.csv'))
    log.to_csv(os.path.join(args.out, 'positions.csv'))
    io_ut.write_frame(case.env.to_frame(), os.path.join(args.out, 'env.csv'))
    io_ut.write_json(case.params.to_dict(), os.path.join(args.out, 'params.json'))
    if traj.n_coerced:
        print(f'{traj.n_coerced} illegal walk moves coerced to stay')


def _fit_graph(args, spec, timings):
    log = PositionLog.from_csv(args.log)
    env = None if args.env is None else ContinuousEnv.from_frame(io_ut.read_frame(args.env))
    gs = spec.graph_searches[0]
    rand_gen = ut.key_rng(spec.master_seed, 3, 0, 2)
    if gs == 'tsxm':
        graph, inertias = tsxm_search(log, env, spec.method_params(gs), rand_gen,
                                      return_inertia=True)
        io_ut.write_frame(pd.DataFrame({'k': np.arange(1, len(inertias) + 1),
                                        'inertia': inertias}),
                          os.path.join(args.out, 'inertia.csv'))
    else:
        graph = search_graph(gs, log, env, spec.method_params(gs), rand_gen)
    io_ut.write_graph(graph, args.out)
    print(f'{gs} graph : |V| = {graph.n_nodes}, |E| = {graph.n_edges}')


def _fit_walk(args, spec, timings):
    log = PositionLog.from_csv(args.log)
    graph = io_ut.read_graph(args.graph_dir)
    wa = spec.walks[0]
    model = fit_walk_model(wa, log, graph, spec.method_params(wa),
                           ut.key_rng(spec.master_seed, 3, 0, 3))
    save_walk_model(model, os.path.join(args.out, 'walk_model.json'))


def _evaluate(args, spec, timings):
    gs, wa = spec.graph_searches[0], spec.walks[0]
    case = sample_case(spec, ut.key_rng(spec.master_seed, 3, 0), index=0)
    res = run_pipeline(case, gs, wa, spec.replicates, ut.key_seed(spec.master_seed, 3, 0, 1),
                       {gs: spec.method_params(gs), wa: spec.method_params(wa)},
                       verbose=args.verbose)
    timings.extend((k, 0, v) for k, v in res.timings.items())
    rows = [{'method': f'{gs}+{wa}', 'metric': 'agreement', 'mean': res.agreement_mean,
             'std': res.agreement_std, 'n': len(res.agreements)},
            {'method': f'{gs}+{wa}', 'metric': 'n_nodes', 'mean': res.mean_nodes,
             'std': float(np.std(res.n_nodes)), 'n': len(res.n_nodes)},
            {'method': f'{gs}+{wa}', 'metric': 'n_edges', 'mean': res.mean_edges,
             'std': float(np.std(res.n_edges)), 'n': len(res.n_edges)}]
    df = io_ut.write_results(rows, os.path.join(args.out, 'results.csv'))
    print(df.to_string(index=False))


def _benchmark(args, spec, timings):
    table, per_case = run_benchmark(spec, verbose=args.verbose, timings=timings)
    io_ut.write_frame(per_case, os.path.join(args.out, 'per_case.csv'))
    df = io_ut.write_results(results_rows(table), os.path.join(args.out, 'results.csv'))
    print(df.to_string(index=False))


def _sensitivity(args, spec, timings):
    gs = args.graph_search or 'tsxm'
    wa = args.walk or 'mac'
    table, per_case = run_sensitivity(spec, args.sweep, args.range, args.n, gs, wa,
                                      verbose=args.verbose, timings=timings)
    io_ut.write_frame(per_case, os.path.join(args.out, f'sensitivity_{args.sweep}_cases.csv'))
    io_ut.write_frame(table, os.path.join(args.out, f'sensitivity_{args.sweep}.csv'))
    print(table.to_string(index=False))


def _case_keys(args, spec):
    """Give the seed keys (master, partition, case, slot) used by a command."""
    m = spec.master_seed
    if args.command == 'benchmark':
        return {'master': m,
                'train_cases': [[m, 0, i, 0] for i in range(spec.n_train)],
                'test_cases': [[m, 1, i, 0] for i in range(spec.n_test)]}
    if args.command == 'sensitivity':
        n = spec.n_test if args.n is None else args.n
        return {'master': m, 'sensitivity_cases': [[m, 2, i, 0] for i in range(n)]}
    return {'master': m, 'single_case': [m, 3, 0, 0]}


__COMMAND_DIC__ = {'simulate': _simulate,
                   'fit-graph': _fit_graph,
                   'fit-walk': _fit_walk,
                   'evaluate': _evaluate,
                   'benchmark': _benchmark,
                   'sensitivity': _sensitivity}


def main(argv=None):
    """Run the abmsim command line."""
    args = build_parser().parse_args(argv)

    # Numba parallel options
    if args.nb_threads is not None:
        numba.set_num_threads(args.nb_threads)

    spec = _spec(args)
    os.makedirs(args.out, exist_ok=True)
    if args.verbose:
        print(ABM_SIM_PRINT)
        print(f'Numba is configured to use {numba.get_num_threads()} threads')
        print(SEP)
        ut.print_dic(spec.resolved())
        print(SEP)

    timings = []
    tstart = time.time()
    __COMMAND_DIC__[args.command](args, spec, timings)
    timings.append((args.command, -1, time.time() - tstart))
    io_ut.write_manifest(args.out, spec.resolved(), _case_keys(args, spec),
                         args.command, VERSION)
    io_ut.write_timings(timings, args.out)


if __name__ == '__main__':
    main()
