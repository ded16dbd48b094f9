"""This module contains the walk models fitted on norm-based logs.

A walk model maps a ``WalkContext`` to a distribution over the legal moves
of the agent's node, ``graph.options(node)`` = [stay, neighbors by id...]:

    | mc   Markov chain table keyed by (node, macro-class, binned neighbors
    |      infected fractions), with (node, macro-class) and (node) backoffs
    | mac  one softmax classifier per node on summary features
"""

import warnings
from dataclasses import dataclass
import numpy as np
from .graph_space import SpatialGraph, nearest_node, node_occupancy, make_context
from .simu import PositionLog
from .io_utils import write_json, read_json
from .constants import MC_BINS, N_MACRO

__WALK_DIC__ = {'mc': 'fit_mc', 'mac': 'fit_mac'}


def project_log_to_graph(log, graph):
    """Replace each logged position by its nearest node.

    Parameters
    ----------
    log : PositionLog or numpy.ndarray(float, size = (T + 1, N, 2))
        Positions.
    graph : SpatialGraph
        The graph.

    Returns
    -------
    numpy.ndarray(int, size = (T + 1, N))
        Node ids, ties go to the lowest id.
    """
    loc = log.loc if isinstance(log, PositionLog) else np.asarray(log, dtype=float)
    return nearest_node(graph, loc.reshape(-1, 2)).reshape(loc.shape[:2])


def _epi_arrays(epi_log, shape):
    """Give (macro, clock, alive) arrays from a PositionLog or a macro array."""
    if isinstance(epi_log, PositionLog):
        return epi_log.macro, epi_log.clock, epi_log.alive
    macro = np.asarray(epi_log, dtype=np.int64)
    if macro.shape != shape:
        raise ValueError(f'epi_log shape {macro.shape} does not match sequences {shape}')
    return macro, np.zeros(shape), np.ones(shape, dtype=bool)


def _transitions(sequences, epi_log, graph):
    """Yield (ctx, option index) of every legal observed move of living agents."""
    seq = np.asarray(sequences, dtype=np.int64)
    if seq.ndim != 2 or seq.shape[0] < 2 or seq.shape[1] == 0:
        raise ValueError('sequences must have at least 2 steps and 1 agent')
    if np.any(seq < 0) or np.any(seq >= graph.n_nodes):
        raise ValueError('sequences refer to unknown nodes')
    macro, clock, alive = _epi_arrays(epi_log, seq.shape)
    T = seq.shape[0] - 1
    for t in range(T):
        occ = node_occupancy(seq[t], macro[t], graph.n_nodes)
        for i in np.nonzero(alive[t] & alive[t + 1])[0]:
            u, v = seq[t, i], seq[t + 1, i]
            if u == v:
                opt = 0
            else:
                pos = np.searchsorted(graph.neighbors(u), v)
                if pos >= graph.degree(u) or graph.neighbors(u)[pos] != v:
                    continue
                opt = pos + 1
            yield make_context(graph, occ, u, macro[t, i], clock[t, i], t / T), opt


def _draw(options, probs, u):
    """Inverse CDF draw of an option with a uniform u."""
    k = int(np.searchsorted(np.cumsum(probs), u, side='right'))
    return int(options[min(k, len(options) - 1)])


class MCWalkModel:
    """Markov chain walk model.

    Parameters
    ----------
    graph : SpatialGraph
        The graph the model walks on.
    bins : tuple(float)
        Boundaries of the infected fraction bins.
    alpha_s : float
        Additive smoothing.
    table, backoff_class, backoff_node : dict
        Distributions keyed by (node, macro, signature), (node, macro), node.
    """

    kind = 'mc'

    def __init__(self, graph, bins=MC_BINS, alpha_s=1., table=None,
                 backoff_class=None, backoff_node=None):
        self.graph = graph
        self.bins = tuple(float(b) for b in bins)
        self.alpha_s = float(alpha_s)
        self.table = {} if table is None else table
        self.backoff_class = {} if backoff_class is None else backoff_class
        self.backoff_node = {} if backoff_node is None else backoff_node

    def signature(self, ctx):
        """Bin the infected fraction of each neighbor."""
        return tuple(int(b) for b in np.digitize(ctx.neighbor_infected, self.bins[1:-1]))

    def distribution(self, ctx):
        """Give the move distribution of the most specific known key."""
        keys = ((self.table, (ctx.node, ctx.macro, self.signature(ctx))),
                (self.backoff_class, (ctx.node, ctx.macro)),
                (self.backoff_node, ctx.node))
        for tab, key in keys:
            if key in tab:
                return tab[key]
        n_opt = self.graph.degree(ctx.node) + 1
        return np.full(n_opt, 1. / n_opt)

    def next_node(self, ctx, u):
        """Give the next node for a uniform draw u."""
        return _draw(self.graph.options(ctx.node), self.distribution(ctx), u)


@dataclass(frozen=True)
class MACTrainParams:
    """Training parameters of the per-node softmax classifiers.

    Parameters
    ----------
    lr : float
        Learning rate.
    l2 : float
        L2 weight.
    epochs : int
        Number of passes over the data.
    batch_size : int
        Mini-batch size.
    """

    lr: float = 0.05
    l2: float = 1e-4
    epochs: int = 200
    batch_size: int = 64


def mac_features(ctx):
    """Featurize a context: one-hot macro-class, clock, t / T, occupancies, bias."""
    onehot = np.zeros(N_MACRO)
    onehot[ctx.macro] = 1.
    return np.concatenate((onehot, [ctx.clock, ctx.t_frac],
                           np.asarray(ctx.neighbor_occupancy, dtype=float).ravel(), [1.]))


def n_mac_features(degree):
    """Give the feature length of a node of given degree."""
    return N_MACRO + 2 + N_MACRO * degree + 1


def softmax(logits):
    """Row-wise stable softmax."""
    z = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def softmax_loss_grad(W, X, y, l2=0.):
    """Cross-entropy loss of a softmax classifier and its gradient.

    Parameters
    ----------
    W : numpy.ndarray(float, size = (C, F))
        Weights, the bias is the last feature.
    X : numpy.ndarray(float, size = (n, F))
        Features.
    y : numpy.ndarray(int)
        Classes.
    l2 : float
        L2 weight, the penalty is l2 / 2 * |W|^2.

    Returns
    -------
    float, numpy.ndarray(float, size = (C, F))
        Loss and gradient with respect to W.
    """
    P = softmax(X @ W.T)
    n = len(y)
    loss = -np.mean(np.log(P[np.arange(n), y] + 1e-300)) + 0.5 * l2 * np.sum(W**2)
    P[np.arange(n), y] -= 1.
    return loss, P.T @ X / n + l2 * W


class MACWalkModel:
    """Per-node softmax walk model.

    Parameters
    ----------
    graph : SpatialGraph
        The graph the model walks on.
    weights : dict(int, numpy.ndarray)
        Weights (1 + degree, n_mac_features(degree)) of each node.
    """

    kind = 'mac'

    def __init__(self, graph, weights=None):
        self.graph = graph
        if weights is None:
            weights = {}
        self.weights = {v: weights.get(v, np.zeros((graph.degree(v) + 1,
                                                    n_mac_features(graph.degree(v)))))
                        for v in range(graph.n_nodes)}

    def distribution(self, ctx):
        """Give the softmax move distribution of the context node."""
        return softmax(self.weights[ctx.node] @ mac_features(ctx))

    def next_node(self, ctx, u):
        """Give the next node for a uniform draw u."""
        return _draw(self.graph.options(ctx.node), self.distribution(ctx), u)


def fit_mc(sequences, epi_log, graph, bins=MC_BINS, alpha_s=1.):
    """Fit a Markov chain walk model.

    Parameters
    ----------
    sequences : numpy.ndarray(int, size = (T + 1, N))
        Node of each agent at each step.
    epi_log : PositionLog or numpy.ndarray(int, size = (T + 1, N))
        Macro-classes (and alive mask) of the agents.
    graph : SpatialGraph
        The graph.
    bins : tuple(float)
        Infected fraction bin boundaries.
    alpha_s : float
        Additive smoothing.

    Returns
    -------
    MCWalkModel
        The model, moves to non neighbors and dead agents are not counted.
    """
    model = MCWalkModel(graph, bins, alpha_s)
    counts = ({}, {}, {})
    for ctx, opt in _transitions(sequences, epi_log, graph):
        n_opt = graph.degree(ctx.node) + 1
        for tab, key in zip(counts, ((ctx.node, ctx.macro, model.signature(ctx)),
                                     (ctx.node, ctx.macro), ctx.node)):
            if key not in tab:
                tab[key] = np.zeros(n_opt)
            tab[key][opt] += 1
    for out, tab in zip((model.table, model.backoff_class, model.backoff_node), counts):
        for key, c in tab.items():
            out[key] = (c + alpha_s) / (c.sum() + alpha_s * len(c))
    return model


def mc_sample_next(model, ctx, rand_gen):
    """Draw the next node of an agent with a Markov chain model."""
    return model.next_node(ctx, rand_gen.random())


def _mac_dataset(sequences, epi_log, graph):
    data = {}
    for ctx, opt in _transitions(sequences, epi_log, graph):
        X, y = data.setdefault(ctx.node, ([], []))
        X.append(mac_features(ctx))
        y.append(opt)
    return {v: (np.array(X), np.array(y, dtype=np.int64)) for v, (X, y) in data.items()}


def train_softmax(X, y, n_class, train, rand_gen, W=None):
    """Mini-batch gradient descent of a softmax classifier.

    Parameters
    ----------
    X : numpy.ndarray(float, size = (n, F))
        Features.
    y : numpy.ndarray(int)
        Classes in [0, n_class).
    n_class : int
        Number of classes.
    train : MACTrainParams
        Training parameters.
    rand_gen : numpy.random.Generator
        Numpy random generator (batch shuffling).
    W : numpy.ndarray(float, size = (n_class, F)), opt
        Starting weights, zeros by default.

    Returns
    -------
    numpy.ndarray, list(float)
        Weights and the full data loss after each epoch (first is the start).
    """
    if W is None:
        W = np.zeros((n_class, X.shape[1]))
    history = [softmax_loss_grad(W, X, y, train.l2)[0]]
    for _ in range(train.epochs):
        perm = rand_gen.permutation(len(y))
        for b in range(0, len(y), train.batch_size):
            idx = perm[b:b + train.batch_size]
            _, grad = softmax_loss_grad(W, X[idx], y[idx], train.l2)
            W = W - train.lr * grad
        history.append(softmax_loss_grad(W, X, y, train.l2)[0])
    return W, history


def fit_mac(sequences, epi_log, graph, train, rand_gen):
    """Fit the per-node softmax walk model.

    Parameters
    ----------
    sequences : numpy.ndarray(int, size = (T + 1, N))
        Node of each agent at each step.
    epi_log : PositionLog or numpy.ndarray(int, size = (T + 1, N))
        Macro-classes, clocks and alive mask of the agents.
    graph : SpatialGraph
        The graph.
    train : MACTrainParams
        Training parameters.
    rand_gen : numpy.random.Generator
        Numpy random generator.

    Returns
    -------
    MACWalkModel
        The model, nodes without data keep uniform (zero) weights.
    """
    data = _mac_dataset(sequences, epi_log, graph)
    weights = {}
    no_data = 0
    for v in range(graph.n_nodes):
        deg = graph.degree(v)
        if deg == 0:
            continue
        if v not in data:
            no_data += 1
            continue
        X, y = data[v]
        weights[v], _ = train_softmax(X, y, deg + 1, train, rand_gen)
    if no_data:
        warnings.warn(f'{no_data} connected nodes have no observed move, '
                      'they use a uniform walk', UserWarning)
    return MACWalkModel(graph, weights)


def mac_predict(model, ctx, rand_gen):
    """Draw the next node of an agent with a per-node softmax model."""
    return model.next_node(ctx, rand_gen.random())


def fit_walk_model(kind, log, graph, walk_params, rand_gen):
    """Fit a walk model by id on a norm-based log.

    Parameters
    ----------
    kind : str
        'mc' or 'mac'.
    log : PositionLog
        Norm-based log.
    graph : SpatialGraph
        The graph.
    walk_params : dict or MACTrainParams
        {'bins', 'alpha_s'} for mc, MACTrainParams for mac.
    rand_gen : numpy.random.Generator
        Numpy random generator.

    Returns
    -------
    MCWalkModel or MACWalkModel
        The fitted model.
    """
    seq = project_log_to_graph(log, graph)
    if kind == 'mc':
        walk_params = {} if walk_params is None else walk_params
        return fit_mc(seq, log, graph, **walk_params)
    if kind == 'mac':
        return fit_mac(seq, log, graph, walk_params or MACTrainParams(), rand_gen)
    raise ValueError(f'Available walk models are {list(__WALK_DIC__)}')


def save_walk_model(model, file_path):
    """Write a walk model as json, floats keep their exact value.

    Parameters
    ----------
    model : MCWalkModel or MACWalkModel
        The model.
    file_path : str
        Destination file.
    """
    dic = {'kind': model.kind,
           'nodes': model.graph.nodes,
           'edges': sorted(model.graph.edges)}
    if model.kind == 'mc':
        dic['bins'] = list(model.bins)
        dic['alpha_s'] = model.alpha_s
        dic['table'] = [[int(n), int(m), list(s), p] for (n, m, s), p in model.table.items()]
        dic['backoff_class'] = [[int(n), int(m), p] for (n, m), p in model.backoff_class.items()]
        dic['backoff_node'] = [[int(n), p] for n, p in model.backoff_node.items()]
    else:
        dic['features'] = ['macro_onehot', 'clock', 't_frac', 'neighbor_occupancy', 'bias']
        dic['weights'] = [[int(v), W] for v, W in model.weights.items()]
    write_json(dic, file_path)


def load_walk_model(file_path):
    """Read a walk model written by save_walk_model."""
    dic = read_json(file_path)
    graph = SpatialGraph(np.array(dic['nodes'], dtype=float), dic['edges'])
    if dic['kind'] == 'mc':
        return MCWalkModel(
            graph, dic['bins'], dic['alpha_s'],
            table={(n, m, tuple(s)): np.array(p) for n, m, s, p in dic['table']},
            backoff_class={(n, m): np.array(p) for n, m, p in dic['backoff_class']},
            backoff_node={n: np.array(p) for n, p in dic['backoff_node']})
    if dic['kind'] == 'mac':
        return MACWalkModel(graph, {v: np.array(W, dtype=float).reshape(
            graph.degree(v) + 1, n_mac_features(graph.degree(v))) for v, W in dic['weights']})
    raise ValueError(f"Unknown walk model kind {dic['kind']}")
