"""Main module of the simulation package: the agent based simulation loop."""

from dataclasses import dataclass, field
import numpy as np
import pandas as pd
from .epi_models import init_model
from .norm_space import ContinuousEnv, SpatialAgent, walk_population, norm_infection
from .graph_space import (SpatialGraph, GraphAgent, walk_graph_population,
                          node_infection, nearest_node)
from .io_utils import read_frame, write_frame

__STOP_DIC__ = ('T', 'no_infectious')


@dataclass(frozen=True)
class SimConfig:
    """Loop configuration.

    Parameters
    ----------
    T : int
        Number of steps.
    dt : float
        Step duration in hours.
    model : str
        Model id, must match the parameters model.
    stop : str
        'T' (run T steps) or 'no_infectious' (end when no agent is
        infectious, the remaining rows repeat the final state).
    """

    T: int
    dt: float = 1.
    model: str = 'sir'
    stop: str = 'T'

    def __post_init__(self):
        if self.T < 0:
            raise ValueError('SimConfig.T must be >= 0')
        if not self.dt > 0:
            raise ValueError('SimConfig.dt must be > 0')
        if self.stop not in __STOP_DIC__:
            raise ValueError(f'SimConfig.stop must be one of {__STOP_DIC__}')
        init_model(self.model)


@dataclass
class Population:
    """Array view of a population.

    Parameters
    ----------
    xi : numpy.ndarray(int)
        States.
    zeta : numpy.ndarray(int)
        Age groups.
    theta : numpy.ndarray(int)
        Inner clocks.
    pos : numpy.ndarray(float, size = (N, 2)), opt
        Positions (norm mode).
    spawn : numpy.ndarray(float, size = (N, 2)), opt
        Spawn positions (norm mode), default is pos.
    node : numpy.ndarray(int), opt
        Nodes (graph mode).
    """

    xi: np.ndarray
    zeta: np.ndarray = None
    theta: np.ndarray = None
    pos: np.ndarray = None
    spawn: np.ndarray = None
    node: np.ndarray = None

    def __post_init__(self):
        self.xi = np.array(self.xi, dtype=np.int64)
        n = len(self.xi)
        self.zeta = np.zeros(n, dtype=np.int64) if self.zeta is None else np.array(self.zeta, dtype=np.int64)
        self.theta = np.zeros(n, dtype=np.int64) if self.theta is None else np.array(self.theta, dtype=np.int64)
        if self.pos is not None:
            self.pos = np.array(self.pos, dtype=float).reshape(n, 2)
            self.spawn = self.pos.copy() if self.spawn is None else np.array(self.spawn, dtype=float).reshape(n, 2)
        if self.node is not None:
            self.node = np.array(self.node, dtype=np.int64)

    def __len__(self):
        return len(self.xi)

    @classmethod
    def from_agents(cls, agents):
        """Build a population from a list of SpatialAgent or GraphAgent."""
        xi = [a.epi.xi for a in agents]
        zeta = [a.epi.zeta for a in agents]
        theta = [a.epi.theta for a in agents]
        if all(isinstance(a, SpatialAgent) for a in agents):
            return cls(xi, zeta, theta, pos=[a.pos for a in agents],
                       spawn=[a.spawn for a in agents])
        if all(isinstance(a, GraphAgent) for a in agents):
            return cls(xi, zeta, theta, node=[a.node for a in agents])
        raise ValueError('agents must all be SpatialAgent or all GraphAgent')

    def on_graph(self, graph):
        """Give a copy placed on the nearest graph nodes."""
        if self.pos is None:
            raise ValueError('Population has no positions to project')
        return Population(self.xi, self.zeta, self.theta,
                          node=nearest_node(graph, self.pos))


@dataclass
class Trajectory:
    """Compartment counts over time.

    Parameters
    ----------
    counts : numpy.ndarray(int, size = (T + 1, m))
        Counts, columns ordered as ``compartments``.
    compartments : list(str)
        Column names.
    n_coerced : int
        Number of illegal walk moves coerced to stay (graph mode).
    """

    counts: np.ndarray
    compartments: list
    n_coerced: int = 0

    @property
    def N(self):
        """Get the population size."""
        return int(self.counts[0].sum())

    @property
    def T(self):
        """Get the number of steps."""
        return self.counts.shape[0] - 1

    def to_frame(self):
        """Give the trajectory as a pandas.DataFrame (t, compartments...)."""
        df = pd.DataFrame(self.counts, columns=self.compartments)
        df.insert(0, 't', np.arange(len(df)))
        return df

    def to_csv(self, path):
        """Write the trajectory CSV."""
        write_frame(self.to_frame(), path)

    @classmethod
    def from_csv(cls, path):
        """Read a trajectory CSV."""
        df = read_frame(path)
        comp = [c for c in df.columns if c != 't']
        return cls(df[comp].to_numpy(dtype=np.int64), comp)


@dataclass
class PositionLog:
    """Agents locations and walk features over time.

    Parameters
    ----------
    mode : str
        'norm' or 'graph'.
    loc : numpy.ndarray
        Positions (T + 1, N, 2) or nodes (T + 1, N).
    macro : numpy.ndarray(int, size = (T + 1, N))
        Macro-class of each agent.
    clock : numpy.ndarray(float, size = (T + 1, N))
        theta / gamma of infected agents, 0 otherwise.
    alive : numpy.ndarray(bool, size = (T + 1, N))
        False once an agent is dead.
    """

    mode: str
    loc: np.ndarray
    macro: np.ndarray
    clock: np.ndarray
    alive: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.alive is None:
            self.alive = np.ones(self.macro.shape, dtype=bool)

    @property
    def T(self):
        """Get the number of steps."""
        return self.loc.shape[0] - 1

    @property
    def N(self):
        """Get the number of agents."""
        return self.loc.shape[1]

    def to_frame(self):
        """Give the log as a pandas.DataFrame (t, agent_id, x, y | node, macro, clock, alive)."""
        t, agent = np.meshgrid(np.arange(self.T + 1), np.arange(self.N), indexing='ij')
        df = pd.DataFrame({'t': t.ravel(), 'agent_id': agent.ravel()})
        if self.mode == 'norm':
            df['x'] = self.loc[..., 0].ravel()
            df['y'] = self.loc[..., 1].ravel()
        else:
            df['node'] = self.loc.ravel()
        df['macro'] = self.macro.ravel()
        df['clock'] = self.clock.ravel()
        df['alive'] = self.alive.ravel().astype(np.int64)
        return df

    def to_csv(self, path):
        """Write the position log CSV."""
        write_frame(self.to_frame(), path)

    @classmethod
    def from_csv(cls, path):
        """Read a position log CSV."""
        df = read_frame(path).sort_values(['t', 'agent_id'])
        shape = (df['t'].max() + 1, df['agent_id'].max() + 1)
        if 'node' in df.columns:
            mode = 'graph'
            loc = df['node'].to_numpy(dtype=np.int64).reshape(shape)
        else:
            mode = 'norm'
            loc = df[['x', 'y']].to_numpy(dtype=float).reshape(shape + (2,))
        return cls(mode, loc,
                   df['macro'].to_numpy(dtype=np.int64).reshape(shape),
                   df['clock'].to_numpy(dtype=float).reshape(shape),
                   df['alive'].to_numpy().astype(bool).reshape(shape))


def _clock(model, xi, zeta, theta, params):
    inf = model.infectious(xi)
    gam = model._gamma_of(xi, zeta, params)
    return np.where(inf, theta / np.maximum(gam, 1), 0.)


def run_sim(mode, pop, space, params, wp, cfg, seed):
    """Run one agent based simulation.

    Parameters
    ----------
    mode : str
        'norm' or 'graph'.
    pop : Population or list(SpatialAgent | GraphAgent)
        Initial agents.
    space : ContinuousEnv or tuple(SpatialGraph, walk model)
        The environment of the mode.
    params : EpiParams
        Model parameters.
    wp : WalkParams
        Walk parameters (norm mode only, None is accepted in graph mode).
    cfg : SimConfig
        Loop configuration.
    seed : int or numpy.random.SeedSequence
        Random seed.

    Returns
    -------
    Trajectory, PositionLog
        Compartment counts and agents locations for t = 0..T.

    Notes
    -----
    Each step applies, in this order: spontaneous transitions, walk,
    interaction, clock tick of the agents that did not change state (the
    others restart at 0), recording.
    """
    if not isinstance(pop, Population):
        pop = Population.from_agents(pop)
    if len(pop) == 0:
        raise ValueError('Population is empty')
    if cfg.model != params.model:
        raise ValueError(f'SimConfig model {cfg.model} does not match params model {params.model}')

    if mode == 'norm':
        if not isinstance(space, ContinuousEnv) or pop.pos is None or wp is None:
            raise ValueError('norm mode needs a ContinuousEnv, positions and WalkParams')
        env = space
        loc = pop.pos.copy()
        spawn = pop.spawn
    elif mode == 'graph':
        if (not isinstance(space, (tuple, list)) or len(space) != 2
           or not isinstance(space[0], SpatialGraph)):
            raise ValueError('graph mode needs a (SpatialGraph, walk model) pair')
        graph, walk_model = space
        loc = pop.on_graph(graph).node if pop.node is None else pop.node.copy()
        if np.any(loc < 0) or np.any(loc >= graph.n_nodes):
            raise ValueError('Agents must be on valid nodes')
    else:
        raise ValueError(f"mode must be 'norm' or 'graph', got {mode}")

    model = init_model(params.model)
    rand_gen = np.random.default_rng(seed)
    xi, zeta, theta = pop.xi.copy(), pop.zeta, pop.theta.copy()
    N, T = len(pop), cfg.T

    counts = np.zeros((T + 1, model.n_compartments), dtype=np.int64)
    loc_log = np.zeros((T + 1,) + loc.shape, dtype=loc.dtype)
    macro_log = np.zeros((T + 1, N), dtype=np.int64)
    clock_log = np.zeros((T + 1, N))
    alive_log = np.zeros((T + 1, N), dtype=bool)
    n_coerced = 0

    def record(t):
        counts[t] = model.counts(xi, zeta)
        loc_log[t] = loc
        macro_log[t] = model.macro_class(xi)
        clock_log[t] = _clock(model, xi, zeta, theta, params)
        alive_log[t] = ~model.dead(xi)

    record(0)
    for t in range(1, T + 1):
        if cfg.stop == 'no_infectious' and not np.any(model.infectious(xi)):
            for arr in (counts, loc_log, macro_log, clock_log, alive_log):
                arr[t:] = arr[t - 1]
            break

        # I_s
        xi, changed_s = model.spontaneous(xi, zeta, theta, params, rand_gen)
        alive = ~model.dead(xi)

        # I_w
        if mode == 'norm':
            loc = walk_population(loc, spawn, alive, env, wp, rand_gen)
        else:
            loc, coerced = walk_graph_population(graph, walk_model, loc,
                                                 model.macro_class(xi),
                                                 _clock(model, xi, zeta, theta, params),
                                                 alive, (t - 1) / max(T, 1), rand_gen)
            n_coerced += coerced

        # I_i
        if mode == 'norm':
            xi, changed_i = norm_infection(model, loc, xi, zeta, params, wp.r_int, rand_gen)
        else:
            xi, changed_i = node_infection(model, loc, xi, zeta, params,
                                           graph.n_nodes, cfg.dt, rand_gen)

        theta = np.where(changed_s | changed_i, 0, theta + 1)
        record(t)

    traj = Trajectory(counts, list(model.compartments), n_coerced=n_coerced)
    log = PositionLog(mode, loc_log, macro_log, clock_log, alive_log)
    return traj, log


def agreement(a, b):
    """Compute the time averaged total variation agreement of two trajectories.

    Parameters
    ----------
    a, b : Trajectory or numpy.ndarray
        Trajectories (or count arrays) of same shape and population.

    Returns
    -------
    float
        1 - mean_t(sum_c |a_tc - b_tc| / 2N), in [0, 1].
    """
    ca = np.asarray(a.counts if isinstance(a, Trajectory) else a, dtype=float)
    cb = np.asarray(b.counts if isinstance(b, Trajectory) else b, dtype=float)
    if ca.shape != cb.shape:
        raise ValueError(f'Trajectories shapes differ: {ca.shape} and {cb.shape}')
    N = ca[0].sum()
    if N != cb[0].sum():
        raise ValueError('Trajectories population sizes differ')
    tv = np.abs(ca - cb).sum(axis=1) / (2 * N)
    return float(np.mean(1. - tv))
