"""This module contains the graph (discrete) environment and dynamics."""

import warnings
from dataclasses import dataclass, replace
import numpy as np
import pandas as pd
from . import nb_fun as nbf
from .epi_models import init_model
from .constants import N_MACRO, MACRO_INFECTIOUS


class SpatialGraph:
    """An undirected graph of locations.

    Parameters
    ----------
    nodes : numpy.ndarray(float, size = (V, 2))
        Node locations, the row index is the node id.
    edges : iterable(tuple(int, int))
        Unordered node id pairs.

    Notes
    -----
    Edges are stored as (src, dst) with src < dst, duplicates are merged.
    """

    def __init__(self, nodes, edges=()):
        nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
        if nodes.shape[0] < 1 or nodes.shape[1] != 2:
            raise ValueError(f'nodes must be a non-empty (V, 2) array, got shape {nodes.shape}')
        self._nodes = nodes
        clean = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f'Self-loop on node {u}')
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ValueError(f'Edge ({u}, {v}) refers to an unknown node')
            clean.add((min(u, v), max(u, v)))
        self._edges = frozenset(clean)
        adj = [[] for _ in range(self.n_nodes)]
        for u, v in self._edges:
            adj[u].append(v)
            adj[v].append(u)
        self._neighbors = [np.array(sorted(a), dtype=np.int64) for a in adj]
        self._degrees = np.array([len(a) for a in adj], dtype=np.int64)

    def __repr__(self):
        return f'SpatialGraph(|V|={self.n_nodes}, |E|={self.n_edges})'

    def __eq__(self, other):
        if not isinstance(other, SpatialGraph):
            return NotImplemented
        return (np.array_equal(self._nodes, other._nodes)
                and self._edges == other._edges)

    @property
    def nodes(self):
        """Get node locations."""
        return self._nodes

    @property
    def edges(self):
        """Get the edge set."""
        return self._edges

    @property
    def n_nodes(self):
        """Get |V|."""
        return self._nodes.shape[0]

    @property
    def n_edges(self):
        """Get |E|."""
        return len(self._edges)

    def neighbors(self, v):
        """Give the sorted neighbors of node v."""
        return self._neighbors[v]

    def degree(self, v):
        """Give the degree of node v."""
        return int(self._degrees[v])

    @property
    def degrees(self):
        """Get the degree of every node."""
        return self._degrees

    def options(self, v):
        """Give the legal moves of node v: stay first, then neighbors by id."""
        return np.concatenate(([v], self._neighbors[v])).astype(np.int64)

    def is_connected(self):
        """Check connectivity with a breadth first search."""
        seen = np.zeros(self.n_nodes, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for v in self._neighbors[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return bool(seen.all())

    def nodes_frame(self):
        """Give nodes as a pandas.DataFrame (id, x, y)."""
        return pd.DataFrame({'id': np.arange(self.n_nodes),
                             'x': self._nodes[:, 0],
                             'y': self._nodes[:, 1]})

    def edges_frame(self):
        """Give edges as a pandas.DataFrame (src, dst) with src < dst."""
        edges = sorted(self._edges)
        return pd.DataFrame(edges if edges else np.empty((0, 2), dtype=np.int64),
                            columns=['src', 'dst'])

    @classmethod
    def from_frames(cls, nodes_df, edges_df):
        """Build a graph from node and edge frames."""
        nodes_df = nodes_df.sort_values('id')
        if not np.array_equal(nodes_df['id'].to_numpy(), np.arange(len(nodes_df))):
            raise ValueError('Node ids must be dense 0..|V|-1')
        return cls(nodes_df[['x', 'y']].to_numpy(dtype=float),
                   zip(edges_df['src'], edges_df['dst']))


@dataclass(frozen=True)
class GraphAgent:
    """An agent of the graph-based simulation.

    Parameters
    ----------
    epi : AgentEpi
        Epidemiological part.
    node : int
        Current node id.
    """

    epi: object
    node: int


@dataclass
class WalkContext:
    """What a walk model sees of an agent before it moves.

    Parameters
    ----------
    macro : int
        Macro-class of the agent.
    clock : float
        theta / gamma of the agent (0 if not infected).
    node : int
        Current node id.
    neighbor_occupancy : numpy.ndarray(float, size = (deg, 3))
        Macro-class fractions of the residents of each neighbor, ordered by id.
    t_frac : float
        t / T.
    """

    macro: int
    clock: float
    node: int
    neighbor_occupancy: np.ndarray
    t_frac: float

    @property
    def neighbor_infected(self):
        """Get the infected fraction of each neighbor."""
        return np.asarray(self.neighbor_occupancy)[:, MACRO_INFECTIOUS]


def nearest_node(graph, p):
    """Give the nearest node id of a point (or of each row of an array).

    Parameters
    ----------
    graph : SpatialGraph
        The graph.
    p : numpy.ndarray(float, size = (2,) or (M, 2))
        Point(s).

    Returns
    -------
    int or numpy.ndarray(int)
        Nearest node id(s), ties go to the lowest id.
    """
    p = np.asarray(p, dtype=float)
    idx = nbf.nearest_idx(np.ascontiguousarray(np.atleast_2d(p)), graph.nodes)
    if p.ndim == 1:
        return int(idx[0])
    return idx


def node_occupancy(node, macro, n_nodes):
    """Compute the macro-class fractions of the residents of every node.

    Parameters
    ----------
    node : numpy.ndarray(int)
        Node of each agent.
    macro : numpy.ndarray(int)
        Macro-class of each agent.
    n_nodes : int
        |V|.

    Returns
    -------
    numpy.ndarray(float, size = (V, 3))
        Fractions, rows of empty nodes are zeros.
    """
    counts = np.zeros((n_nodes, N_MACRO))
    np.add.at(counts, (np.asarray(node), np.asarray(macro)), 1.)
    tot = counts.sum(axis=1, keepdims=True)
    return np.divide(counts, tot, out=np.zeros_like(counts), where=tot > 0)


def make_context(graph, occupancy, node, macro, clock, t_frac):
    """Build the WalkContext of one agent from a node occupancy table."""
    return WalkContext(macro=int(macro), clock=float(clock), node=int(node),
                       neighbor_occupancy=occupancy[graph.neighbors(node)],
                       t_frac=float(t_frac))


def _checked_move(graph, node, target):
    """Return (new node, coerced) for a proposed target."""
    if target == node or target in graph.neighbors(node):
        return int(target), False
    return int(node), True


def walk_graph_population(graph, walk_model, node, macro, clock, alive, t_frac, rand_gen):
    """Move every agent along the graph with a walk model.

    Parameters
    ----------
    graph : SpatialGraph
        The graph.
    walk_model : object
        Fitted walk model with a ``next_node(ctx, u)`` method, u uniform in [0, 1).
    node : numpy.ndarray(int)
        Current nodes.
    macro : numpy.ndarray(int)
        Agents macro-classes.
    clock : numpy.ndarray(float)
        Agents theta / gamma.
    alive : numpy.ndarray(bool)
        False for dead agents, which never move.
    t_frac : float
        t / T.
    rand_gen : numpy.random.Generator
        Numpy random generator.

    Returns
    -------
    numpy.ndarray(int), int
        New nodes and the number of illegal model outputs coerced to stay.

    Notes
    -----
    Contexts are read from the occupancy before any agent moves and one
    uniform is drawn per agent in id order.
    """
    occupancy = node_occupancy(node, macro, graph.n_nodes)
    u = rand_gen.random(len(node))
    new_node = np.array(node, dtype=np.int64)
    n_coerced = 0
    movable = np.asarray(alive, dtype=bool) & (graph.degrees[new_node] > 0)
    for i in np.nonzero(movable)[0]:
        ctx = make_context(graph, occupancy, node[i], macro[i], clock[i], t_frac)
        new_node[i], coerced = _checked_move(graph, node[i],
                                             walk_model.next_node(ctx, u[i]))
        n_coerced += coerced
    return new_node, n_coerced


def graph_walk_step(agent, graph, model, ctx, rand_gen, epi_model=None):
    """Move one agent along the graph.

    Parameters
    ----------
    agent : GraphAgent
        The agent.
    graph : SpatialGraph
        The graph.
    model : object
        Walk model with a ``next_node(ctx, u)`` method.
    ctx : WalkContext
        Context of the agent.
    rand_gen : numpy.random.Generator
        Numpy random generator.
    epi_model : str or BaseEpiModel, opt
        Epidemiological model, used to keep dead agents still.

    Returns
    -------
    GraphAgent
        The moved agent.
    """
    u = rand_gen.random()
    if graph.degree(agent.node) == 0:
        return agent
    if epi_model is not None and init_model(epi_model).dead([agent.epi.xi])[0]:
        return agent
    node, coerced = _checked_move(graph, agent.node, model.next_node(ctx, u))
    if coerced:
        warnings.warn(f'Illegal move proposed from node {agent.node}, agent stays',
                      UserWarning)
    return replace(agent, node=node)


def contact_scale(n_v, dt):
    """Give the contact probability multiplier of a node with n_v residents."""
    return 1. - np.exp(-dt / np.maximum(np.asarray(n_v) - 1, 1))


def node_infection(model, node, xi, zeta, params, n_nodes, dt, rand_gen):
    """Apply well-mixed contacts inside every node.

    Parameters
    ----------
    model : BaseEpiModel
        Epidemiological model.
    node : numpy.ndarray(int)
        Agents nodes.
    xi, zeta : numpy.ndarray(int)
        Agents states and age groups.
    params : EpiParams
        Model parameters.
    n_nodes : int
        |V|.
    dt : float
        Step duration.
    rand_gen : numpy.random.Generator
        Numpy random generator.

    Returns
    -------
    numpy.ndarray(int), numpy.ndarray(bool)
        New states and mask of infected agents.
    """
    node = np.asarray(node)
    alive = ~model.dead(xi)
    n_v = np.bincount(node[alive], minlength=n_nodes)
    cat = model.source_category(xi, zeta)
    node_src = np.zeros((n_nodes, model.n_source_cat), dtype=np.int64)
    src = cat >= 0
    np.add.at(node_src, (node[src], cat[src]), 1)
    counts = node_src[node]
    counts[np.nonzero(src)[0], cat[src]] -= 1
    p_scale = contact_scale(n_v[node], dt)
    return model.infect(xi, zeta, counts, params, p_scale, rand_gen)


def node_interaction_step(pop, graph, params, dt, rand_gen):
    """Apply the well-mixed interaction to a list of graph agents.

    Parameters
    ----------
    pop : list(GraphAgent)
        Agents, the list index is the agent id.
    graph : SpatialGraph
        The graph.
    params : EpiParams
        Model parameters.
    dt : float
        Step duration.
    rand_gen : numpy.random.Generator
        Numpy random generator.

    Returns
    -------
    list(GraphAgent)
        Agents after the contacts, infected agents have theta = 0.
    """
    if len(pop) == 0:
        return []
    model = init_model(params.model)
    node = np.array([a.node for a in pop], dtype=np.int64)
    if np.any(node < 0) or np.any(node >= graph.n_nodes):
        raise ValueError('Agents must be on valid nodes')
    xi = np.array([a.epi.xi for a in pop], dtype=np.int64)
    zeta = np.array([a.epi.zeta for a in pop], dtype=np.int64)
    new_xi, changed = node_infection(model, node, xi, zeta, params,
                                     graph.n_nodes, dt, rand_gen)
    return [replace(a, epi=replace(a.epi, xi=int(x), theta=0)) if c else a
            for a, x, c in zip(pop, new_xi, changed)]
