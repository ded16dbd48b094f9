"""This module contains the experiment harness.

The harness samples cases, runs the full pipeline (norm simulation, graph
search, walk fit, graph simulation, agreement) and aggregates benchmark and
sensitivity tables.
"""

import time
import itertools
from dataclasses import dataclass, field
import numpy as np
import pandas as pd
from . import utils as ut
from .epi_models import init_model, EpiParams
from .norm_space import ContinuousEnv, Circle, WalkParams, generate_synthetic_env
from .simu import SimConfig, Population, run_sim, agreement
from .graph_search import (search_graph, QuadtreeParams, GAParams, TSxMParams,
                           __SEARCH_DIC__)
from .walk_approx import fit_walk_model, MACTrainParams, __WALK_DIC__
from .constants import (ABM_SIM_PRINT, SEP, PARAM_PRESETS, N_CIRCLES_RANGE,
                        RADIUS_RANGE, ENV_MAX_RETRY, WALK_DEFAULTS, SWEEP_RANGES,
                        SWEEP_ENV, MC_BINS)


__CONFIG_KEYS__ = {
    'model': ('name',),
    'params': ('preset', 'beta', 'gamma', 'rho', 'psi', 'init_infected', 'child_fraction'),
    'env': ('n_circles', 'radius', 'placement_extent', 'circles', 'max_retry'),
    'sim': ('N', 'T', 'dt', 'stop', 'speed', 'delta', 'kappa', 'd_min', 'r_int'),
    'methods': ('graph_search', 'walk', 'replicates', 'train_grid') + tuple(__SEARCH_DIC__)
    + tuple(__WALK_DIC__),
    'seeds': ('master', 'n_train', 'n_test')
    }

__STAGES__ = ('norm_sim', 'graph_search', 'walk_fit', 'graph_sim', 'agreement')


class PipelineStageError(RuntimeError):
    """Failure of one pipeline stage.

    Parameters
    ----------
    stage : str
        The failing stage.
    case_index : int or None
        Index of the case if known.
    cause : Exception
        The original error.
    """

    def __init__(self, stage, case_index, cause):
        self.stage = stage
        self.case_index = case_index
        self.cause = cause
        super().__init__(f'Stage {stage} failed (case {case_index}): '
                         f'{type(cause).__name__}: {cause}')


class ExperimentSpec:
    """Experiment configuration.

    Parameters
    ----------
    config : dict or str
        The configuration dict / the yaml or json configuration file.

    Notes
    -----
    Configuration format, every key is optional :

    | model:
    |     name: 'sir', 'seird2' or 'twostrain'  # default 'sir'
    | params:
    |     preset: 'synthetic', 'airport', 'restaurant' or 'bus'  # default 'synthetic'
    |     beta: [MIN, MAX]  # override the preset range
    |     gamma: [MIN, MAX]  # recovery duration in steps
    |     rho: [MIN, MAX]
    |     psi: [MIN, MAX]
    |     init_infected: FRACTION OF INITIALLY INFECTED AGENTS  # default 0.01
    |     child_fraction: FRACTION OF CHILDREN (seird2)  # default 0.3
    | env:
    |     n_circles: [MIN, MAX]  # default [1, 40]
    |     radius: [MIN, MAX]  # default [2, 25] meters
    |     placement_extent: SIDE OF THE CENTERS SQUARE  # default unbounded
    |     circles: [[X, Y, R], ...]  # fixed environment, no sampling
    |     max_retry: DRAWS PER CIRCLE CENTER  # default 200
    | sim:
    |     N: POPULATION SIZE  # default 200
    |     T: NUMBER OF STEPS  # default 200
    |     dt: STEP DURATION  # default 1
    |     stop: 'T' or 'no_infectious'  # default 'T'
    |     speed, delta, kappa, d_min, r_int: PULL RANDOM WALK PARAMETERS
    | methods:
    |     graph_search: ['quadtree', 'ga', 'tsxm']
    |     walk: ['mc', 'mac']
    |     replicates: NUMBER OF PAIRED SEEDS PER CASE  # default 1
    |     quadtree / ga / tsxm / mc / mac: {PARAM: VALUE}  # method parameters
    |     train_grid: {METHOD: {PARAM: [VALUES]}}  # hyperparameters tried on train cases
    | seeds:
    |     master: MASTER SEED  # default 42
    |     n_train: NUMBER OF TRAIN CASES  # default 30
    |     n_test: NUMBER OF TEST CASES  # default 10
    """

    def __init__(self, config):
        self._config, self._config_path = ut.load_config(config)
        self._config.pop('yaml_path', None)
        for section, dic in self._config.items():
            if section not in __CONFIG_KEYS__:
                raise KeyError(f'Unknown config section {section}, '
                               f'available are {list(__CONFIG_KEYS__)}')
            if dic is None:
                self._config[section] = {}
                continue
            for k in dic:
                if k not in __CONFIG_KEYS__[section]:
                    raise KeyError(f'Unknown key {k} in section {section}, '
                                   f'available are {list(__CONFIG_KEYS__[section])}')
        init_model(self.model)
        if self.preset not in PARAM_PRESETS:
            raise ValueError(f'Available presets are {list(PARAM_PRESETS)}')
        for gs in self.graph_searches:
            if gs not in __SEARCH_DIC__:
                raise ValueError(f'Unknown graph search {gs}')
        for wa in self.walks:
            if wa not in __WALK_DIC__:
                raise ValueError(f'Unknown walk model {wa}')
        if self.n_train < 1 or self.n_test < 1:
            raise ValueError('n_train and n_test must be >= 1')
        if self.N < 1:
            raise ValueError('N must be >= 1')
        if not 0 <= self.init_infected <= 1:
            raise ValueError('init_infected must be in [0, 1]')
        # Fail early on bad walk and loop parameters
        self.walk_params
        self.sim_config

    def _get(self, section, key, default):
        return self._config.get(section, {}).get(key, default)

    @property
    def config(self):
        """Get the configuration dict as given."""
        return self._config

    @property
    def config_path(self):
        """Get the origin of the configuration."""
        return self._config_path

    @property
    def model(self):
        """Get the model id."""
        return self._get('model', 'name', 'sir')

    @property
    def preset(self):
        """Get the parameter preset name."""
        return self._get('params', 'preset', 'synthetic')

    @property
    def param_ranges(self):
        """Get the parameter ranges, the preset completed by explicit ranges."""
        ranges = dict(PARAM_PRESETS[self.preset])
        for k in ('beta', 'gamma', 'rho', 'psi'):
            if k in self._config.get('params', {}):
                ranges[k] = list(self._config['params'][k])
        return ranges

    @property
    def init_infected(self):
        """Get the initially infected fraction."""
        return self._get('params', 'init_infected', 0.01)

    @property
    def child_fraction(self):
        """Get the fraction of children (seird2)."""
        return self._get('params', 'child_fraction', 0.3)

    @property
    def env_config(self):
        """Get the environment generation settings."""
        return {'n_circles': list(self._get('env', 'n_circles', N_CIRCLES_RANGE)),
                'radius': list(self._get('env', 'radius', RADIUS_RANGE)),
                'placement_extent': self._get('env', 'placement_extent', None),
                'circles': self._get('env', 'circles', None),
                'max_retry': self._get('env', 'max_retry', ENV_MAX_RETRY)}

    @property
    def N(self):
        """Get the population size."""
        return int(self._get('sim', 'N', 200))

    @property
    def sim_config(self):
        """Get the SimConfig."""
        return SimConfig(T=int(self._get('sim', 'T', 200)),
                         dt=float(self._get('sim', 'dt', 1.)),
                         model=self.model,
                         stop=self._get('sim', 'stop', 'T'))

    @property
    def walk_params(self):
        """Get the pull random walk parameters."""
        return WalkParams(**{k: float(self._get('sim', k, v)) for k, v in WALK_DEFAULTS.items()})

    @property
    def graph_searches(self):
        """Get the graph search ids."""
        return list(self._get('methods', 'graph_search', list(__SEARCH_DIC__)))

    @property
    def walks(self):
        """Get the walk model ids."""
        return list(self._get('methods', 'walk', list(__WALK_DIC__)))

    @property
    def replicates(self):
        """Get the number of replicates per case."""
        return int(self._get('methods', 'replicates', 1))

    @property
    def train_grid(self):
        """Get the hyperparameter grid of each method."""
        return self._get('methods', 'train_grid', {})

    @property
    def master_seed(self):
        """Get the master seed."""
        return int(self._get('seeds', 'master', 42))

    @property
    def n_train(self):
        """Get the number of train cases."""
        return int(self._get('seeds', 'n_train', 30))

    @property
    def n_test(self):
        """Get the number of test cases."""
        return int(self._get('seeds', 'n_test', 10))

    def method_params(self, name, overrides=None):
        """Build the parameters object of a method.

        Parameters
        ----------
        name : str
            A graph search or walk model id.
        overrides : dict, opt
            Values replacing the configured ones.

        Returns
        -------
        QuadtreeParams, GAParams, TSxMParams, dict or MACTrainParams
            Parameters of the method.
        """
        kw = dict(self._get('methods', name, {}) or {})
        kw.update(overrides or {})
        if name == 'quadtree':
            kw.setdefault('r_int', self.walk_params.r_int)
            return QuadtreeParams(**kw)
        if name == 'ga':
            kw.setdefault('r_cover', self.walk_params.r_int)
            return GAParams(**kw)
        if name == 'tsxm':
            kw.setdefault('r_split', self.walk_params.r_int)
            return TSxMParams(**kw)
        if name == 'mc':
            unknown = set(kw) - {'bins', 'alpha_s'}
            if unknown:
                raise KeyError(f'Unknown mc parameters {sorted(unknown)}')
            return {'bins': tuple(kw.get('bins', MC_BINS)), 'alpha_s': kw.get('alpha_s', 1.)}
        if name == 'mac':
            return MACTrainParams(**kw)
        raise ValueError(f'Unknown method {name}')

    def with_overrides(self, **sections):
        """Give a new spec with some section values replaced.

        Parameters
        ----------
        **sections : dict
            section=dict(key=value).

        Returns
        -------
        ExperimentSpec
            The new spec.
        """
        config = ut.load_config(self._config)[0]
        for section, dic in sections.items():
            config.setdefault(section, {})
            config[section] = dict(config[section] or {})
            config[section].update(dic)
        return ExperimentSpec(config)

    def resolved(self):
        """Give the full configuration with defaults, json friendly."""
        wp = self.walk_params
        cfg = self.sim_config
        return {'model': {'name': self.model},
                'params': {'preset': self.preset, **self.param_ranges,
                           'init_infected': self.init_infected,
                           'child_fraction': self.child_fraction},
                'env': self.env_config,
                'sim': {'N': self.N, 'T': cfg.T, 'dt': cfg.dt, 'stop': cfg.stop,
                        'speed': wp.speed, 'delta': wp.delta, 'kappa': wp.kappa,
                        'd_min': wp.d_min, 'r_int': wp.r_int},
                'methods': {'graph_search': self.graph_searches, 'walk': self.walks,
                            'replicates': self.replicates, 'train_grid': self.train_grid,
                            **{m: dict(self._get('methods', m, {}) or {})
                               for m in list(__SEARCH_DIC__) + list(__WALK_DIC__)}},
                'seeds': {'master': self.master_seed, 'n_train': self.n_train,
                          'n_test': self.n_test}}


@dataclass
class Case:
    """One sampled experiment case.

    Parameters
    ----------
    params : EpiParams
        Epidemiological parameters.
    env : ContinuousEnv
        The environment.
    pop : Population
        Initial population (positions and states).
    wp : WalkParams
        Pull random walk parameters.
    cfg : SimConfig
        Loop configuration.
    index : int, opt
        Case index.
    """

    params: EpiParams
    env: ContinuousEnv
    pop: Population
    wp: WalkParams
    cfg: SimConfig
    index: int = None


@dataclass
class PipelineResult:
    """Result of one pipeline on one case.

    Parameters
    ----------
    agreements : list(float)
        Agreement of each replicate.
    n_nodes : list(int)
        |V| of each replicate graph.
    n_edges : list(int)
        |E| of each replicate graph.
    timings : dict
        Wall-clock seconds per stage, summed over replicates.
    n_coerced : int
        Illegal walk moves coerced to stay, summed over replicates.
    """

    agreements: list
    n_nodes: list
    n_edges: list
    timings: dict = field(default_factory=dict)
    n_coerced: int = 0

    @property
    def agreement_mean(self):
        """Get the mean agreement."""
        return ut.mean_std(self.agreements)[0]

    @property
    def agreement_std(self):
        """Get the agreement standard deviation."""
        return ut.mean_std(self.agreements)[1]

    @property
    def mean_nodes(self):
        """Get the mean |V|."""
        return float(np.mean(self.n_nodes))

    @property
    def mean_edges(self):
        """Get the mean |E|."""
        return float(np.mean(self.n_edges))


def sample_case(spec, rand_gen, index=None):
    """Sample one case of an experiment.

    Parameters
    ----------
    spec : ExperimentSpec
        The experiment.
    rand_gen : numpy.random.Generator
        Numpy random generator.
    index : int, opt
        Case index.

    Returns
    -------
    Case
        Parameters uniform in their ranges, environment from the ExperimentSpec or
        generated, agents uniform in the environment, lowest ids infected.
    """
    model = init_model(spec.model)
    params = model.sample_params(spec.param_ranges, rand_gen)
    env_cfg = spec.env_config
    if env_cfg['circles'] is not None:
        env = ContinuousEnv([Circle((x, y), r) for x, y, r in env_cfg['circles']])
    else:
        env = generate_synthetic_env(rand_gen, env_cfg['n_circles'], env_cfg['radius'],
                                     env_cfg['placement_extent'], env_cfg['max_retry'])
    N = spec.N
    pos = env.sample_points(N, rand_gen)
    n_inf = int(round(spec.init_infected * N))
    if spec.init_infected > 0:
        n_inf = max(1, n_inf)
    xi, zeta = model.initial_states(N, n_inf, rand_gen, spec.child_fraction)
    return Case(params, env, Population(xi, zeta, pos=pos), spec.walk_params,
                spec.sim_config, index)


def _default_method_params(name):
    if name == 'quadtree':
        return QuadtreeParams()
    if name == 'ga':
        return GAParams()
    if name == 'tsxm':
        return TSxMParams()
    if name == 'mc':
        return {}
    return MACTrainParams()


def run_pipeline(case, gs, wa, replicates, seed, method_params=None, verbose=False):
    """Run norm simulation, graph search, walk fit, graph simulation, agreement.

    Parameters
    ----------
    case : Case
        The case.
    gs : str
        Graph search id.
    wa : str
        Walk model id.
    replicates : int
        Number of paired seeds.
    seed : int or numpy.random.SeedSequence
        Seed of the pipeline, each replicate gets its own child seeds.
    method_params : dict, opt
        {gs: params, wa: params}, defaults if missing.
    verbose : bool
        Print stage timings.

    Returns
    -------
    PipelineResult
        Agreement and graph sizes of each replicate.
    """
    if gs not in __SEARCH_DIC__:
        raise ValueError(f'Unknown graph search {gs}')
    if wa not in __WALK_DIC__:
        raise ValueError(f'Unknown walk model {wa}')
    if replicates < 1:
        raise ValueError('replicates must be >= 1')
    method_params = method_params or {}
    gs_params = method_params.get(gs, _default_method_params(gs))
    wa_params = method_params.get(wa, _default_method_params(wa))

    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    res = PipelineResult([], [], [], timings={s: 0. for s in __STAGES__})
    for rep_ss in ss.spawn(replicates):
        norm_ss, gs_ss, wa_ss, graph_ss = rep_ss.spawn(4)
        stage = 'norm_sim'
        try:
            tstart = time.time()
            traj_n, log = run_sim('norm', case.pop, case.env, case.params, case.wp,
                                  case.cfg, norm_ss)
            res.timings[stage] += time.time() - tstart

            stage = 'graph_search'
            tstart = time.time()
            graph = search_graph(gs, log, case.env, gs_params, np.random.default_rng(gs_ss))
            res.timings[stage] += time.time() - tstart

            stage = 'walk_fit'
            tstart = time.time()
            walk_model = fit_walk_model(wa, log, graph, wa_params, np.random.default_rng(wa_ss))
            res.timings[stage] += time.time() - tstart

            stage = 'graph_sim'
            tstart = time.time()
            traj_g, _ = run_sim('graph', case.pop.on_graph(graph), (graph, walk_model),
                                case.params, None, case.cfg, graph_ss)
            res.timings[stage] += time.time() - tstart

            stage = 'agreement'
            score = agreement(traj_n, traj_g)
        except PipelineStageError:
            raise
        except Exception as e:
            raise PipelineStageError(stage, case.index, e) from e
        res.agreements.append(score)
        res.n_nodes.append(graph.n_nodes)
        res.n_edges.append(graph.n_edges)
        res.n_coerced += traj_g.n_coerced

    if verbose:
        print(f'Case {case.index} {gs}+{wa} : agreement = {res.agreement_mean:.3f} '
              f'+/- {res.agreement_std:.3f}, |V| = {res.mean_nodes:.1f}, '
              f'|E| = {res.mean_edges:.1f} '
              + ', '.join(f'{k} {v:.2f}s' for k, v in res.timings.items()))
    return res


def _grid(grid):
    """Expand {param: [values]} into a list of dicts."""
    if not grid:
        return [{}]
    keys = sorted(grid)
    return [dict(zip(keys, vals)) for vals in itertools.product(*(grid[k] for k in keys))]


def _train(spec, gs, wa, verbose=False):
    """Pick the graph search hyperparameters with the best mean train agreement."""
    candidates = _grid(spec.train_grid.get(gs, {}))
    wa_params = spec.method_params(wa)
    if len(candidates) == 1:
        return spec.method_params(gs, candidates[0]), candidates[0]
    scores = []
    for cand in candidates:
        gs_params = spec.method_params(gs, cand)
        agr = []
        for i in range(spec.n_train):
            case = sample_case(spec, ut.key_rng(spec.master_seed, 0, i), index=i)
            agr.append(run_pipeline(case, gs, wa, spec.replicates,
                                    ut.key_seed(spec.master_seed, 0, i, 1),
                                    {gs: gs_params, wa: wa_params}).agreement_mean)
        scores.append(np.mean(agr))
        if verbose:
            print(f'Train {gs}+{wa} {cand} : mean agreement = {scores[-1]:.3f}')
    best = candidates[int(np.argmax(scores))]
    return spec.method_params(gs, best), best


def run_benchmark(spec, verbose=False, timings=None):
    """Benchmark every (graph search, walk model) combination.

    Parameters
    ----------
    spec : ExperimentSpec
        The experiment.
    verbose : bool
        Print progress.
    timings : list, opt
        If given, (stage, case, seconds) records are appended to it.

    Returns
    -------
    pandas.DataFrame, pandas.DataFrame
        One row per combination (mean and std of agreement, |V|, |E| over
        test cases) and one row per (combination, test case).
    """
    if verbose:
        print(ABM_SIM_PRINT)
        print(SEP)
        print(f'CONFIG : {spec.config_path}\nMODEL : {spec.model}\n'
              f'MASTER SEED : {spec.master_seed}\n'
              f'N_TRAIN : {spec.n_train}, N_TEST : {spec.n_test}')
        print(SEP)

    test_cases = [sample_case(spec, ut.key_rng(spec.master_seed, 1, i), index=i)
                  for i in range(spec.n_test)]
    rows, per_case = [], []
    for gs, wa in itertools.product(spec.graph_searches, spec.walks):
        method = f'{gs}+{wa}'
        gs_params, chosen = _train(spec, gs, wa, verbose=verbose)
        if verbose and chosen:
            print(f'{method} : trained hyperparameters {chosen}')
        mp = {gs: gs_params, wa: spec.method_params(wa)}
        for case in test_cases:
            try:
                res = run_pipeline(case, gs, wa, spec.replicates,
                                   ut.key_seed(spec.master_seed, 1, case.index, 1),
                                   mp, verbose=verbose)
            except PipelineStageError as e:
                e.case_index = case.index
                raise
            per_case.append({'method': method, 'case': case.index,
                             'agreement_mean': res.agreement_mean,
                             'agreement_std': res.agreement_std,
                             'n_nodes': res.mean_nodes, 'n_edges': res.mean_edges})
            if timings is not None:
                timings.extend((f'{method}:{k}', case.index, v) for k, v in res.timings.items())
        sub = [r for r in per_case if r['method'] == method]
        row = {'method': method, 'n': len(sub)}
        for metric, key in (('agreement', 'agreement_mean'), ('n_nodes', 'n_nodes'),
                            ('n_edges', 'n_edges')):
            row[f'{metric}_mean'], row[f'{metric}_std'] = ut.mean_std([r[key] for r in sub])
        rows.append(row)
        if verbose:
            print(f"{method} : agreement = {row['agreement_mean']:.3f} "
                  f"+/- {row['agreement_std']:.3f}")
            print(SEP)
    return pd.DataFrame(rows), pd.DataFrame(per_case)


def results_rows(table):
    """Turn a benchmark or sensitivity table into (method, metric, mean, std, n) records."""
    out = []
    for _, row in table.iterrows():
        for metric in ('agreement', 'n_nodes', 'n_edges'):
            if f'{metric}_mean' in row:
                out.append({'method': row['method'], 'metric': metric,
                            'mean': row[f'{metric}_mean'], 'std': row[f'{metric}_std'],
                            'n': int(row['n'])})
    return out


def sweep_spec(base, sweep, value, fixed_geometry=True):
    """Give the experiment of one sensitivity case.

    Parameters
    ----------
    base : ExperimentSpec
        The base experiment.
    sweep : str
        'population', 'circles', 'beta' or 'gamma'.
    value : float or int
        The swept value.
    fixed_geometry : bool
        Use one circle of radius 50 for the population sweep and circles
        of radius 2 for the circles sweep, else keep the base geometry.

    Returns
    -------
    ExperimentSpec
        The case experiment.
    """
    env = ut.load_config(SWEEP_ENV.get(sweep, {}))[0] if fixed_geometry else {}
    sim, params = {}, {}
    if sweep == 'population':
        sim['N'] = value
    elif sweep == 'circles':
        env.update(n_circles=[value, value], circles=None)
    else:
        params[sweep] = [value, value]
    return base.with_overrides(env=env, sim=sim, params=params)


def run_sensitivity(base, sweep, value_range=None, n=None, gs='tsxm', wa='mac',
                    verbose=False, timings=None, fixed_geometry=True):
    """Sweep one parameter and report the pipeline agreement.

    Parameters
    ----------
    base : ExperimentSpec
        The base experiment.
    sweep : str
        'population', 'circles', 'beta' or 'gamma'.
    value_range : list, opt
        [low, high] of the swept value, default from SWEEP_RANGES.
    n : int, opt
        Number of cases, default is base n_test.
    gs, wa : str
        Pipeline methods.
    verbose : bool
        Print progress.
    timings : list, opt
        If given, (stage, case, seconds) records are appended to it.
    fixed_geometry : bool
        See sweep_spec.

    Returns
    -------
    pandas.DataFrame, pandas.DataFrame
        A one row summary and one row per case (with the drawn value).
    """
    if sweep not in SWEEP_RANGES:
        raise ValueError(f'Unknown sweep {sweep}, available are {list(SWEEP_RANGES)}')
    value_range = list(SWEEP_RANGES[sweep] if value_range is None else value_range)
    n = base.n_test if n is None else int(n)
    if n < 1:
        raise ValueError('n must be >= 1')
    integer = sweep in ('population', 'circles', 'gamma')
    mp = {gs: base.method_params(gs), wa: base.method_params(wa)}

    if verbose:
        print(ABM_SIM_PRINT)
        print(SEP)
        print(f'SENSITIVITY : {sweep} in {value_range}, {n} cases, {gs}+{wa}')
        print(SEP)

    per_case = []
    for i in range(n):
        rand_gen = ut.key_rng(base.master_seed, 2, i)
        value = ut.uniform_in(value_range, rand_gen, integer=integer)
        spec = sweep_spec(base, sweep, value, fixed_geometry)
        case = sample_case(spec, rand_gen, index=i)
        try:
            res = run_pipeline(case, gs, wa, spec.replicates,
                               ut.key_seed(base.master_seed, 2, i, 1), mp, verbose=verbose)
        except PipelineStageError as e:
            e.case_index = i
            raise
        per_case.append({'method': f'{gs}+{wa}', 'sweep': sweep, 'case': i, 'value': value,
                         'agreement_mean': res.agreement_mean,
                         'agreement_std': res.agreement_std,
                         'n_nodes': res.mean_nodes, 'n_edges': res.mean_edges})
        if timings is not None:
            timings.extend((f'{sweep}:{k}', i, v) for k, v in res.timings.items())

    per_case = pd.DataFrame(per_case)
    row = {'method': f'{gs}+{wa}', 'sweep': sweep, 'low': value_range[0],
           'high': value_range[1], 'n': n}
    for metric, key in (('agreement', 'agreement_mean'), ('n_nodes', 'n_nodes'),
                        ('n_edges', 'n_edges')):
        row[f'{metric}_mean'], row[f'{metric}_std'] = ut.mean_std(per_case[key])
    if verbose:
        print(f"{sweep} : agreement = {row['agreement_mean']:.3f} "
              f"+/- {row['agreement_std']:.3f}")
    return pd.DataFrame([row]), per_case
