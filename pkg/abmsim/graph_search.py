"""This module contains the graph search algorithms.

A graph search turns the position log of a norm-based simulation into a
``SpatialGraph``:

    | quadtree
    | └── majority vote average of one quadtree per time step, leaves are nodes
    | ga
    | └── genetic algorithm on node locations, fitness is the mean distance
    |     of agents to their nearest node
    | tsxm
    | └── DTW k-means on the agents position series, the number of clusters
    |     is chosen with the elbow method, then clusters wider than the
    |     interaction radius are bisected

GA and TSxM only place nodes, their edges are inferred from the transitions
of the projected log.
"""

import math
import warnings
from dataclasses import dataclass, field
import numpy as np
from . import nb_fun as nbf
from .graph_space import SpatialGraph
from .simu import PositionLog


__SEARCH_DIC__ = {'quadtree': 'quadtree_search',
                  'ga': 'ga_search',
                  'tsxm': 'tsxm_search'}


# ------------------------------------------------------------------------- #
# Log helpers
# ------------------------------------------------------------------------- #

def _log_arrays(log):
    """Give (positions (T + 1, N, 2), alive (T + 1, N)) of a log or an array."""
    if isinstance(log, PositionLog):
        if log.mode != 'norm':
            raise ValueError('Graph search needs a norm-based position log')
        loc, alive = log.loc, log.alive
    else:
        loc = np.asarray(log, dtype=float)
        if loc.ndim == 2:
            loc = loc[None, ...]
        alive = np.ones(loc.shape[:2], dtype=bool)
    if loc.shape[0] == 0 or loc.shape[1] == 0:
        raise ValueError('Position log is empty')
    return np.ascontiguousarray(loc, dtype=float), np.ascontiguousarray(alive)


def strided_steps(n_steps, max_steps):
    """Give at most max_steps uniformly strided step indices in [0, n_steps)."""
    if max_steps is None or n_steps <= max_steps:
        return np.arange(n_steps)
    return np.unique(np.round(np.linspace(0, n_steps - 1, max_steps)).astype(np.int64))


def _log_bbox(loc, env):
    if env is not None:
        return env.bbox
    flat = loc.reshape(-1, 2)
    return np.array([flat.min(axis=0), flat.max(axis=0)])


def infer_edges(nodes, log, min_count=1):
    """Infer edges from the agents transitions between node cells.

    Parameters
    ----------
    nodes : numpy.ndarray(float, size = (V, 2))
        Node locations.
    log : PositionLog or numpy.ndarray(float, size = (T + 1, N, 2))
        Positions.
    min_count : int
        Minimum number of u -> v or v -> u transitions to add {u, v}.

    Returns
    -------
    set(tuple(int, int))
        Edges (u, v) with u < v.
    """
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    if len(nodes) == 0:
        raise ValueError('nodes must be non-empty')
    loc, _ = _log_arrays(log)
    idx = nbf.nearest_idx(loc.reshape(-1, 2), nodes).reshape(loc.shape[:2])
    u, v = idx[:-1].ravel(), idx[1:].ravel()
    move = u != v
    if not np.any(move):
        return set()
    pairs = np.column_stack((np.minimum(u[move], v[move]), np.maximum(u[move], v[move])))
    uniq, counts = np.unique(pairs, axis=0, return_counts=True)
    return {(int(a), int(b)) for (a, b), c in zip(uniq, counts) if c >= min_count}


# ------------------------------------------------------------------------- #
# Quadtree
# ------------------------------------------------------------------------- #

@dataclass
class QuadtreeNode:
    """A square cell of a quadtree.

    Parameters
    ----------
    cell : tuple(float, float, float)
        (x0, y0, size), the lower left corner and the side.
    children : list(QuadtreeNode)
        Empty or the four quadrants NW, NE, SW, SE.
    depth : int
        Depth, 0 for the root.
    """

    cell: tuple
    children: list = field(default_factory=list)
    depth: int = 0

    @property
    def is_leaf(self):
        """Check if the node has no children."""
        return len(self.children) == 0

    @property
    def center(self):
        """Get the cell center."""
        x0, y0, s = self.cell
        return np.array([x0 + s / 2, y0 + s / 2])

    def quadrants(self):
        """Give the cells of the NW, NE, SW, SE quadrants."""
        x0, y0, s = self.cell
        h = s / 2
        return [(x0, y0 + h, h), (x0 + h, y0 + h, h), (x0, y0, h), (x0 + h, y0, h)]

    def split(self):
        """Add the four quadrant children."""
        self.children = [QuadtreeNode(c, depth=self.depth + 1) for c in self.quadrants()]
        return self.children

    def leaves(self):
        """Give the leaves in NW, NE, SW, SE depth first order."""
        if self.is_leaf:
            return [self]
        return [lf for ch in self.children for lf in ch.leaves()]

    def same_structure(self, other):
        """Check that two trees have the same cells and splits."""
        if self.cell != other.cell or len(self.children) != len(other.children):
            return False
        return all(a.same_structure(b) for a, b in zip(self.children, other.children))


@dataclass(frozen=True)
class QuadtreeParams:
    """Parameters of the average quadtree search.

    Parameters
    ----------
    r_int : float
        Interaction radius of the stop conditions.
    max_depth : int
        Hard depth limit.
    theta_split : float
        Fraction of trees that must split a cell to split it in the average.
    adjacency_augment : bool
        Also connect side adjacent leaves.
    max_steps : int, opt
        Number of strided time steps used, all if None.
    """

    r_int: float = 2.
    max_depth: int = 12
    theta_split: float = 0.5
    adjacency_augment: bool = True
    max_steps: int = 50


def root_cell(bbox):
    """Give the square root cell of a bounding box [[xmin, ymin], [xmax, ymax]]."""
    bbox = np.asarray(bbox, dtype=float)
    side = float(np.max(bbox[1] - bbox[0]))
    if side <= 0:
        side = 1.
    return (float(bbox[0, 0]), float(bbox[0, 1]), side)


def _quadrant_index(pts, cell):
    """Quadrant of each point, west and south halves are half-open."""
    x0, y0, s = cell
    east = pts[:, 0] >= x0 + s / 2
    north = pts[:, 1] >= y0 + s / 2
    # NW 0, NE 1, SW 2, SE 3
    return np.where(north, 0, 2) + east.astype(np.int64)


def _all_within(pts, r_int):
    """Check that all points are pairwise within r_int."""
    ext = pts.max(axis=0) - pts.min(axis=0)
    if np.hypot(*ext) <= r_int:
        return True
    if np.any(ext > r_int):
        return False
    d2 = np.sum((pts[:, None, :] - pts[None, :, :])**2, axis=-1)
    return bool(np.all(d2 <= r_int**2))


def stop_reason(positions, idx, r_int):
    """Give the stop condition satisfied by a cell, None if it must split.

    Parameters
    ----------
    positions : numpy.ndarray(float, size = (N, 2))
        All agents positions.
    idx : numpy.ndarray(int)
        Indices of the agents inside the cell.
    r_int : float
        Interaction radius.

    Returns
    -------
    str or None
        'empty', 'isolated' (single agent far from all others) or
        'interacting' (all agents pairwise within r_int).
    """
    if len(idx) == 0:
        return 'empty'
    if len(idx) == 1:
        others = np.delete(positions, idx[0], axis=0)
        if len(others) == 0 or np.min(np.hypot(*(others - positions[idx[0]]).T)) > r_int:
            return 'isolated'
    if _all_within(positions[idx], r_int):
        return 'interacting'
    return None


def build_quadtree(positions, r_int, max_depth=12, cell=None):
    """Build the quadtree of one population snapshot.

    Parameters
    ----------
    positions : numpy.ndarray(float, size = (N, 2))
        Agents positions.
    r_int : float
        Interaction radius.
    max_depth : int
        Hard depth limit.
    cell : tuple(float, float, float), opt
        Root cell (x0, y0, size), default is the squared bounding box of
        the positions.

    Returns
    -------
    QuadtreeNode
        The root.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    if cell is None:
        if len(positions) == 0:
            cell = (0., 0., 1.)
        else:
            cell = root_cell([positions.min(axis=0), positions.max(axis=0)])
    root = QuadtreeNode(tuple(float(c) for c in cell))
    stack = [(root, np.arange(len(positions)))]
    hit_max = False
    while stack:
        node, idx = stack.pop()
        if stop_reason(positions, idx, r_int) is not None:
            continue
        if node.depth >= max_depth:
            hit_max = True
            continue
        quad = _quadrant_index(positions[idx], node.cell)
        for q, child in enumerate(node.split()):
            stack.append((child, idx[quad == q]))
    if hit_max:
        warnings.warn(f'Quadtree reached max_depth = {max_depth}', UserWarning)
    return root


def average_quadtrees(trees, theta_split=0.5):
    """Average quadtrees by majority vote on the split of each cell.

    Parameters
    ----------
    trees : list(QuadtreeNode)
        Trees sharing the same root cell.
    theta_split : float
        A cell is split if it is split in at least this fraction of trees.

    Returns
    -------
    QuadtreeNode
        The averaged tree.
    """
    if len(trees) == 0:
        raise ValueError('No tree to average')
    cell = trees[0].cell
    if any(t.cell != cell for t in trees):
        raise ValueError('All trees must share the same root cell')
    n = len(trees)

    def vote(out, nodes):
        internal = [nd for nd in nodes if nd is not None and not nd.is_leaf]
        if len(internal) == 0 or len(internal) / n < theta_split:
            return
        for q, child in enumerate(out.split()):
            vote(child, [None if nd is None or nd.is_leaf else nd.children[q]
                         for nd in nodes])

    root = QuadtreeNode(cell)
    vote(root, list(trees))
    return root


def _side_adjacent(cells):
    """Pairs of cells sharing a side segment of positive length."""
    c = np.asarray(cells, dtype=float)
    x0, y0, s = c[:, 0], c[:, 1], c[:, 2]
    x1, y1 = x0 + s, y0 + s
    tol = 1e-9 * np.max(s)
    ov_x = np.minimum(x1[:, None], x1[None, :]) - np.maximum(x0[:, None], x0[None, :])
    ov_y = np.minimum(y1[:, None], y1[None, :]) - np.maximum(y0[:, None], y0[None, :])
    touch_x = (np.abs(x1[:, None] - x0[None, :]) <= tol) | (np.abs(x0[:, None] - x1[None, :]) <= tol)
    touch_y = (np.abs(y1[:, None] - y0[None, :]) <= tol) | (np.abs(y0[:, None] - y1[None, :]) <= tol)
    adj = (touch_x & (ov_y > tol)) | (touch_y & (ov_x > tol))
    ii, jj = np.nonzero(np.triu(adj, k=1))
    return zip(ii.tolist(), jj.tolist())


def quadtree_to_graph(tree, adjacency_augment=True):
    """Turn the leaves of a quadtree into a graph.

    Parameters
    ----------
    tree : QuadtreeNode
        The tree.
    adjacency_augment : bool
        Also connect leaves whose cells share a side.

    Returns
    -------
    SpatialGraph
        One node per leaf at its cell center, leaves with the same parent
        are connected.
    """
    leaves = tree.leaves()
    ids = {id(lf): i for i, lf in enumerate(leaves)}
    edges = set()
    stack = [tree]
    while stack:
        node = stack.pop()
        leaf_children = [ids[id(ch)] for ch in node.children if ch.is_leaf]
        for a in range(len(leaf_children)):
            for b in range(a + 1, len(leaf_children)):
                edges.add((leaf_children[a], leaf_children[b]))
        stack.extend(ch for ch in node.children if not ch.is_leaf)
    if adjacency_augment and len(leaves) > 1:
        edges.update(_side_adjacent([lf.cell for lf in leaves]))
    return SpatialGraph(np.array([lf.center for lf in leaves]), edges)


def quadtree_search(log, env, qp, rand_gen=None):
    """Average quadtree graph search.

    Parameters
    ----------
    log : PositionLog
        Norm-based positions.
    env : ContinuousEnv
        The environment, its squared bbox is the shared root cell.
    qp : QuadtreeParams
        Search parameters.
    rand_gen : numpy.random.Generator, opt
        Unused, the search is deterministic.

    Returns
    -------
    SpatialGraph
        The graph.
    """
    loc, alive = _log_arrays(log)
    cell = root_cell(_log_bbox(loc, env))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        trees = [build_quadtree(loc[t][alive[t]], qp.r_int, qp.max_depth, cell=cell)
                 for t in strided_steps(loc.shape[0], qp.max_steps)]
    if caught:
        warnings.warn(f'{len(caught)} quadtrees reached max_depth = {qp.max_depth}', UserWarning)
    return quadtree_to_graph(average_quadtrees(trees, qp.theta_split), qp.adjacency_augment)


# ------------------------------------------------------------------------- #
# Genetic algorithm
# ------------------------------------------------------------------------- #

@dataclass
class GAMember:
    """A candidate set of node locations.

    Parameters
    ----------
    node_locations : numpy.ndarray(float, size = (k, 2))
        Node locations, k >= 1.
    """

    node_locations: np.ndarray

    def __post_init__(self):
        self.node_locations = np.atleast_2d(np.asarray(self.node_locations, dtype=float))
        if self.node_locations.shape[0] < 1 or self.node_locations.shape[1] != 2:
            raise ValueError('GAMember needs at least one 2D node location')

    def __len__(self):
        return self.node_locations.shape[0]


@dataclass(frozen=True)
class GAParams:
    """Parameters of the genetic algorithm search.

    Parameters
    ----------
    pop_size : int
        Number of members.
    generations : int
        Number of generations.
    alpha : float
        Elite fraction, raised to 1 / pop_size if lower.
    sigma : float
        Mutation standard deviation in meters.
    x0 : int
        Random members have between 1 and 2 * x0 nodes.
    r_cover : float
        Cover radius of the set cover member.
    lambda_v : float
        Penalty per node.
    p_c : float
        Crossover probability of a same length pair.
    p_m : float
        Mutation probability of a member.
    max_steps : int, opt
        Number of strided time steps of the fitness, all if None.
    min_count : int
        Edge inference threshold.
    """

    pop_size: int = 40
    generations: int = 100
    alpha: float = 0.1
    sigma: float = 1.
    x0: int = 10
    r_cover: float = 2.
    lambda_v: float = 0.
    p_c: float = 0.7
    p_m: float = 0.3
    max_steps: int = 50
    min_count: int = 1

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError('GAParams.pop_size must be >= 2')
        if self.generations < 1:
            raise ValueError('GAParams.generations must be >= 1')
        if not 0 <= self.alpha <= 1:
            raise ValueError('GAParams.alpha must be in [0, 1]')


def fitness(member, log, lambda_v=0.):
    """Compute the loss of a member.

    Parameters
    ----------
    member : GAMember
        Node locations.
    log : PositionLog or numpy.ndarray(float, size = (T + 1, N, 2))
        Positions, dead agents are ignored.
    lambda_v : float
        Penalty per node.

    Returns
    -------
    float
        mean_t mean_i (distance of agent i to its nearest node) + lambda_v |V|.
    """
    if not isinstance(member, GAMember):
        member = GAMember(member)
    loc, alive = _log_arrays(log)
    return nbf.mean_nearest_dist(loc, alive, member.node_locations) + lambda_v * len(member)


def greedy_set_cover_init(positions_t0, r_cover):
    """Place nodes on agents until every agent is within r_cover of a node.

    Parameters
    ----------
    positions_t0 : numpy.ndarray(float, size = (N, 2))
        Initial positions, the candidate centers.
    r_cover : float
        Cover radius.

    Returns
    -------
    GAMember
        The picked centers.
    """
    pts = np.asarray(positions_t0, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError('positions_t0 must be non-empty')
    covers = np.sum((pts[:, None, :] - pts[None, :, :])**2, axis=-1) <= r_cover**2
    uncovered = np.ones(len(pts), dtype=bool)
    picked = []
    while np.any(uncovered):
        j = int(np.argmax(covers[:, uncovered].sum(axis=1)))
        picked.append(j)
        uncovered &= ~covers[j]
    return GAMember(pts[picked])


def mutate(member, sigma, rand_gen, bbox=None):
    """Move one random node of a member by a normal(0, sigma^2 I) step.

    Parameters
    ----------
    member : GAMember
        The member.
    sigma : float
        Standard deviation in meters.
    rand_gen : numpy.random.Generator
        Numpy random generator.
    bbox : numpy.ndarray(float, size = (2, 2)), opt
        Bounding box the node is clipped to.

    Returns
    -------
    GAMember
        A new member.
    """
    loc = member.node_locations.copy()
    i = rand_gen.integers(len(loc))
    loc[i] += rand_gen.normal(0., sigma, size=2)
    if bbox is not None:
        loc[i] = np.clip(loc[i], bbox[0], bbox[1])
    return GAMember(loc)


def crossover(m1, m2, rand_gen, j=None):
    """One point crossover of two members of the same length.

    Parameters
    ----------
    m1, m2 : GAMember
        Parents.
    rand_gen : numpy.random.Generator
        Numpy random generator.
    j : int, opt
        Cut index in [1, len], drawn uniformly if None.

    Returns
    -------
    GAMember, GAMember
        Children, the suffixes after j are swapped.
    """
    if len(m1) != len(m2):
        raise ValueError(f'crossover needs members of identical size, got {len(m1)} and {len(m2)}')
    if j is None:
        j = int(rand_gen.integers(1, len(m1) + 1))
    a, b = m1.node_locations, m2.node_locations
    return (GAMember(np.concatenate((a[:j], b[j:]))),
            GAMember(np.concatenate((b[:j], a[j:]))))


def _n_elite(alpha, size):
    return min(size, math.ceil(alpha * size - 1e-9))


def _royalty_indices(losses, alpha, rand_gen):
    losses = np.asarray(losses, dtype=float)
    order = np.argsort(losses, kind='stable')
    n_elite = _n_elite(alpha, len(losses))
    if n_elite == len(losses):
        return order
    w = 1. / (losses + 1e-9)
    sampled = rand_gen.choice(len(losses), size=len(losses) - n_elite, p=w / w.sum())
    return np.concatenate((order[:n_elite], sampled))


def royalty_tournament_select(pop, losses, alpha, rand_gen):
    """Royalty tournament selection.

    Parameters
    ----------
    pop : list(GAMember)
        Members.
    losses : list(float)
        Member losses.
    alpha : float
        Elite fraction.
    rand_gen : numpy.random.Generator
        Numpy random generator.

    Returns
    -------
    list(GAMember)
        ceil(alpha * P) elites by ascending loss, then members sampled with
        replacement with weights 1 / loss.
    """
    if len(pop) != len(losses) or len(pop) < 2:
        raise ValueError('pop and losses must have the same size >= 2')
    return [pop[i] for i in _royalty_indices(losses, alpha, rand_gen)]


def ga_search(log, env, gp, rand_gen, return_history=False):
    """Genetic algorithm graph search.

    Parameters
    ----------
    log : PositionLog
        Norm-based positions.
    env : ContinuousEnv
        The environment, node locations stay in its bbox.
    gp : GAParams
        Search parameters.
    rand_gen : numpy.random.Generator
        Numpy random generator.
    return_history : bool
        Also return the best loss of each generation.

    Returns
    -------
    SpatialGraph or (SpatialGraph, list(float))
        Graph of the best member, edges from ``infer_edges``.
    """
    loc, alive = _log_arrays(log)
    bbox = _log_bbox(loc, env)
    steps = strided_steps(loc.shape[0], gp.max_steps)
    fit_loc = np.ascontiguousarray(loc[steps])
    fit_alive = np.ascontiguousarray(alive[steps])
    P = gp.pop_size
    alpha = max(gp.alpha, 1. / P)
    n_elite = _n_elite(alpha, P)

    def loss(m):
        return nbf.mean_nearest_dist(fit_loc, fit_alive, m.node_locations) + gp.lambda_v * len(m)

    pop = [greedy_set_cover_init(loc[0][alive[0]] if alive[0].any() else loc[0], gp.r_cover)]
    for _ in range(P - 1):
        k = int(rand_gen.integers(1, 2 * gp.x0 + 1))
        pop.append(GAMember(rand_gen.uniform(bbox[0], bbox[1], size=(k, 2))))
    losses = np.array([loss(m) for m in pop])
    history = [float(losses.min())]

    for _ in range(gp.generations):
        sel = _royalty_indices(losses, alpha, rand_gen)
        pop = [pop[i] for i in sel]
        losses = losses[sel]
        changed = np.zeros(P, dtype=bool)
        for i in range(n_elite, P - 1, 2):
            if len(pop[i]) == len(pop[i + 1]) and rand_gen.random() < gp.p_c:
                pop[i], pop[i + 1] = crossover(pop[i], pop[i + 1], rand_gen)
                changed[i:i + 2] = True
        for i in range(n_elite, P):
            if rand_gen.random() < gp.p_m:
                pop[i] = mutate(pop[i], gp.sigma, rand_gen, bbox=bbox)
                changed[i] = True
        for i in np.nonzero(changed)[0]:
            losses[i] = loss(pop[i])
        history.append(float(losses.min()))

    best = pop[int(np.argmin(losses))]
    graph = SpatialGraph(best.node_locations,
                         infer_edges(best.node_locations, loc, gp.min_count))
    if return_history:
        return graph, history
    return graph


# ------------------------------------------------------------------------- #
# Time series x-means
# ------------------------------------------------------------------------- #

@dataclass(frozen=True)
class TSxMParams:
    """Parameters of the DTW time series x-means search.

    Parameters
    ----------
    epsilon : int
        Maximum number of clusters.
    restarts : int
        k-means runs per k.
    dba_iters : int
        Barycenter refinement iterations per centroid update.
    tol : float
        Relative inertia decrease under which k-means stops.
    max_iter : int
        Maximum k-means iterations.
    max_len : int, opt
        Number of strided time steps clustered, all if None.
    min_count : int
        Edge inference threshold.
    r_split : float, opt
        Interaction radius in meters, clusters whose members lie on average
        farther than r_split / 2 from their center of mass are split in two,
        None keeps the elbow clusters.
    """

    epsilon: int = 8
    restarts: int = 3
    dba_iters: int = 5
    tol: float = 1e-4
    max_iter: int = 20
    max_len: int = 50
    min_count: int = 1
    r_split: float = 2.

    def __post_init__(self):
        if self.epsilon < 1:
            raise ValueError('TSxMParams.epsilon must be >= 1')
        if self.restarts < 1:
            raise ValueError('TSxMParams.restarts must be >= 1')
        if self.max_iter < 1:
            raise ValueError('TSxMParams.max_iter must be >= 1')
        if self.r_split is not None and self.r_split <= 0:
            raise ValueError('TSxMParams.r_split must be > 0')


def _as_series(a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape[0] == 0:
        raise ValueError('DTW needs non-empty series')
    return np.ascontiguousarray(a)


def dtw_distance(a, b):
    """Compute the DTW distance with L1 ground distance and full window.

    Parameters
    ----------
    a : numpy.ndarray(float, size = (n,) or (n, d))
        First series.
    b : numpy.ndarray(float, size = (m,) or (m, d))
        Second series.

    Returns
    -------
    float
        The distance.
    """
    return float(nbf.dtw_dist(_as_series(a), _as_series(b)))


def _resample(s, m):
    """Linear resampling of a series to length m."""
    if len(s) == m:
        return s.copy()
    x_old = np.linspace(0, 1, len(s))
    x_new = np.linspace(0, 1, m)
    return np.column_stack([np.interp(x_new, x_old, s[:, c]) for c in range(s.shape[1])])


def _dist_matrix(series, centroids):
    lengths = {len(s) for s in series}
    if len(lengths) == 1:
        return nbf.dtw_to_centroids(np.ascontiguousarray(np.stack(series)),
                                    np.ascontiguousarray(centroids))
    return np.array([[nbf.dtw_dist(s, c) for c in centroids] for s in series])


def _barycenter_step(centroid, members):
    """One DTW median barycenter update."""
    aligned = [[] for _ in range(len(centroid))]
    for s in members:
        for i, j in nbf.dtw_path(nbf.dtw_acc_cost(centroid, s)):
            aligned[i].append(s[j])
    return np.array([np.median(np.array(a), axis=0) for a in aligned])


def dtw_barycenter(centroid, members, n_iter):
    """Refine a centroid by DTW barycenter averaging.

    Parameters
    ----------
    centroid : numpy.ndarray(float, size = (m, d))
        Starting centroid, its length is kept.
    members : list(numpy.ndarray)
        Series of the cluster.
    n_iter : int
        Maximum number of updates.

    Returns
    -------
    numpy.ndarray(float, size = (m, d))
        The centroid, never with a larger summed DTW cost than the start.

    Notes
    -----
    Aligned points are combined with the coordinate-wise median, which
    minimizes the L1 ground cost for a fixed alignment.
    """
    cost = sum(nbf.dtw_dist(centroid, s) for s in members)
    for _ in range(n_iter):
        new = _barycenter_step(centroid, members)
        new_cost = sum(nbf.dtw_dist(new, s) for s in members)
        if new_cost >= cost:
            break
        centroid, cost = new, new_cost
    return centroid


def _kmeanspp(series, k, m, rand_gen):
    first = int(rand_gen.integers(len(series)))
    centroids = [_resample(series[first], m)]
    for _ in range(1, k):
        d = _dist_matrix(series, np.array(centroids)).min(axis=1)
        w = d**2
        if w.sum() > 0:
            nxt = int(rand_gen.choice(len(series), p=w / w.sum()))
        else:
            nxt = int(rand_gen.integers(len(series)))
        centroids.append(_resample(series[nxt], m))
    return np.array(centroids)


def dtw_kmeans(series, k, tp, rand_gen, return_history=False):
    """k-means under DTW with barycenter averaging.

    Parameters
    ----------
    series : list(numpy.ndarray)
        Series (n_i, d) or (n_i,).
    k : int
        Number of clusters.
    tp : TSxMParams
        Iteration parameters (dba_iters, tol, max_iter).
    rand_gen : numpy.random.Generator
        Numpy random generator (seeding).
    return_history : bool
        Also return the inertia of each iteration.

    Returns
    -------
    numpy.ndarray, numpy.ndarray(int), float
        Centroids (k, m, d) with m the median length, assignments and inertia.
    """
    series = [_as_series(s) for s in series]
    if not 1 <= k <= len(series):
        raise ValueError(f'k must be in [1, {len(series)}], got {k}')
    m = int(np.median([len(s) for s in series]))
    centroids = _kmeanspp(series, k, m, rand_gen)
    history = []
    for it in range(tp.max_iter):
        dist = _dist_matrix(series, centroids)
        assign = np.argmin(dist, axis=1)
        inertia = float(dist[np.arange(len(series)), assign].sum())
        history.append(inertia)
        if it > 0 and history[-2] - inertia <= tp.tol * history[-2]:
            break
        # centroids stay those of the returned assignment
        if it == tp.max_iter - 1:
            break
        for c in range(k):
            members = [s for s, a in zip(series, assign) if a == c]
            if members:
                centroids[c] = dtw_barycenter(centroids[c], members, tp.dba_iters)
    if return_history:
        return centroids, assign, inertia, history
    return centroids, assign, inertia


def elbow_select(inertias):
    """Select the number of clusters with the elbow method.

    Parameters
    ----------
    inertias : list(float)
        Inertia for k = 1..epsilon.

    Returns
    -------
    int
        The k whose normalized point is the farthest from the chord joining
        the first and last points, 1 for degenerate profiles.
        With two candidates there is no chord, 2 is kept only when it
        explains every series (zero inertia).
    """
    y = np.asarray(inertias, dtype=float)
    eps = len(y)
    if eps == 2 and y[0] > 0 and y[1] <= 1e-12 * y[0]:
        return 2
    if eps <= 2 or y.max() == y.min():
        return 1
    x = np.arange(eps) / (eps - 1)
    y = (y - y.min()) / (y.max() - y.min())
    slope = y[-1] - y[0]
    dist = np.abs(slope * x - (y - y[0])) / np.sqrt(slope**2 + 1)
    if dist.max() <= 1e-12:
        return 1
    return int(np.argmax(dist)) + 1


def _com_l1(norm_loc, assign, k):
    """Sum over agents and steps of the L1 distance to their cluster center of mass."""
    tot = 0.
    for c in range(k):
        members = norm_loc[:, assign == c]
        if members.shape[1] == 0:
            continue
        com = members.mean(axis=1, keepdims=True)
        tot += np.abs(members - com).sum()
    return tot


def _best_kmeans(series, sub, k, tp, rand_gen):
    """Keep the restart with the smallest center of mass L1 distance."""
    best = None
    for _ in range(tp.restarts):
        _, assign, inertia = dtw_kmeans(series, k, tp, rand_gen)
        score = _com_l1(sub, assign, k)
        if best is None or score < best[0]:
            best = (score, assign, inertia)
    return best[1], best[2]


def _spread(loc, idx):
    """Mean distance (meters) of the members to their center of mass."""
    members = loc[:, idx]
    com = members.mean(axis=1, keepdims=True)
    return float(np.sqrt(np.sum((members - com)**2, axis=-1)).mean())


def split_clusters(series, sub, loc, assign, tp, rand_gen):
    """Bisect the clusters wider than the interaction radius.

    Parameters
    ----------
    series : list(numpy.ndarray)
        Normalized series of the agents.
    sub : numpy.ndarray(float, size = (T', N, 2))
        Normalized positions.
    loc : numpy.ndarray(float, size = (T', N, 2))
        Positions in meters.
    assign : numpy.ndarray(int)
        Starting clusters.
    tp : TSxMParams
        Search parameters, r_split gives the width limit.
    rand_gen : numpy.random.Generator
        Numpy random generator.

    Returns
    -------
    numpy.ndarray(int)
        New assignments, clusters numbered by their lowest agent id.

    Notes
    -----
    A cluster is split with the DTW 2-means until its mean distance to the
    center of mass is at most r_split / 2, it holds one agent or the
    2-means leaves one side empty.
    """
    todo = [np.nonzero(assign == c)[0] for c in np.unique(assign)]
    done = []
    while todo:
        idx = todo.pop(0)
        if len(idx) < 2 or _spread(loc, idx) <= tp.r_split / 2:
            done.append(idx)
            continue
        half, _ = _best_kmeans([series[i] for i in idx], sub[:, idx], 2, tp, rand_gen)
        if half.min() == half.max():
            done.append(idx)
            continue
        todo += [idx[half == 0], idx[half == 1]]
    done.sort(key=lambda idx: idx[0])
    new = np.empty(len(assign), dtype=np.int64)
    for c, idx in enumerate(done):
        new[idx] = c
    return new


def tsxm_search(log, env, tp, rand_gen, return_inertia=False):
    """DTW time series x-means graph search.

    Parameters
    ----------
    log : PositionLog
        Norm-based positions.
    env : ContinuousEnv
        The environment, positions are normalized by its bbox.
    tp : TSxMParams
        Search parameters.
    rand_gen : numpy.random.Generator
        Numpy random generator.
    return_inertia : bool
        Also return the inertia of the kept run for each k.

    Returns
    -------
    SpatialGraph or (SpatialGraph, list(float))
        One node per cluster at its time averaged center of mass.

    Notes
    -----
    The elbow of the inertia for k = 1..epsilon gives the first clusters,
    then clusters wider than the interaction radius are bisected (see
    split_clusters) so that agents sharing a node could meet.
    """
    loc, _ = _log_arrays(log)
    bbox = _log_bbox(loc, env)
    scale = np.where(bbox[1] - bbox[0] > 0, bbox[1] - bbox[0], 1.)
    norm_loc = (loc - bbox[0]) / scale
    steps = strided_steps(loc.shape[0], tp.max_len)
    sub = norm_loc[steps]
    series = [sub[:, i] for i in range(sub.shape[1])]

    inertias, assigns = [], []
    for k in range(1, min(tp.epsilon, len(series)) + 1):
        assign, inertia = _best_kmeans(series, sub, k, tp, rand_gen)
        inertias.append(inertia)
        assigns.append(assign)

    k_best = elbow_select(inertias)
    assign = assigns[k_best - 1]
    if tp.r_split is not None:
        assign = split_clusters(series, sub, loc[steps], assign, tp, rand_gen)
    nodes = []
    for c in range(assign.max() + 1):
        if np.any(assign == c):
            com = norm_loc[:, assign == c].mean(axis=1).mean(axis=0)
            nodes.append(com * scale + bbox[0])
    nodes = np.array(nodes)
    graph = SpatialGraph(nodes, infer_edges(nodes, loc, tp.min_count))
    if return_inertia:
        return graph, inertias
    return graph


def search_graph(method, log, env, method_params, rand_gen):
    """Run a graph search by id.

    Parameters
    ----------
    method : str
        One of ``__SEARCH_DIC__``.
    log : PositionLog
        Norm-based positions.
    env : ContinuousEnv
        The environment.
    method_params : QuadtreeParams, GAParams or TSxMParams
        Parameters of the method.
    rand_gen : numpy.random.Generator
        Numpy random generator.

    Returns
    -------
    SpatialGraph
        The graph.
    """
    if method not in __SEARCH_DIC__:
        raise ValueError(f'Available graph searches are {list(__SEARCH_DIC__)}')
    return globals()[__SEARCH_DIC__[method]](log, env, method_params, rand_gen)
