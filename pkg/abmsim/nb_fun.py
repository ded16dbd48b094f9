"""This module contains functions with numba decorator to speed up the simulation."""
from numba import njit, prange
import numpy as np


@njit(cache=True, parallel=True)
def count_sources_within(pos, target_mask, source_cat, n_cat, radius):
    """Count the infectious sources around each target agent.

    Parameters
    ----------
    pos : numpy.ndarray(float, size = (N, 2))
        Agents positions.
    target_mask : numpy.ndarray(bool)
        True for the agents that can be infected.
    source_cat : numpy.ndarray(int)
        Source category of each agent, -1 if the agent is not infectious.
    n_cat : int
        Number of source categories.
    radius : float
        Interaction radius.

    Returns
    -------
    numpy.ndarray(int, size = (N, n_cat))
        Number of sources of each category at distance <= radius of each target.

    """
    n = pos.shape[0]
    counts = np.zeros((n, n_cat), dtype=np.int64)
    src_idx = np.where(source_cat >= 0)[0]
    r2 = radius * radius
    for i in prange(n):
        if not target_mask[i]:
            continue
        for k in range(len(src_idx)):
            j = src_idx[k]
            if j == i:
                continue
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            if dx * dx + dy * dy <= r2:
                counts[i, source_cat[j]] += 1
    return counts


@njit(cache=True)
def nearest_idx(points, nodes):
    """Return the index of the nearest node of each point.

    Parameters
    ----------
    points : numpy.ndarray(float, size = (P, 2))
        Points to assign.
    nodes : numpy.ndarray(float, size = (K, 2))
        Node locations.

    Returns
    -------
    numpy.ndarray(int)
        Index of the nearest node, ties go to the lowest index.

    """
    idx = np.zeros(points.shape[0], dtype=np.int64)
    for p in range(points.shape[0]):
        best = np.inf
        for k in range(nodes.shape[0]):
            dx = points[p, 0] - nodes[k, 0]
            dy = points[p, 1] - nodes[k, 1]
            d = dx * dx + dy * dy
            if d < best:
                best = d
                idx[p] = k
    return idx


@njit(cache=True)
def dtw_acc_cost(a, b):
    """Compute the DTW accumulated cost matrix with L1 ground distance.

    Parameters
    ----------
    a : numpy.ndarray(float, size = (n, d))
        First series.
    b : numpy.ndarray(float, size = (m, d))
        Second series.

    Returns
    -------
    numpy.ndarray(float, size = (n, m))
        Accumulated cost, the DTW distance is the last element.

    """
    n, m = a.shape[0], b.shape[0]
    acc = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            cost = 0.
            for c in range(a.shape[1]):
                cost += abs(a[i, c] - b[j, c])
            if i == 0 and j == 0:
                acc[i, j] = cost
            elif i == 0:
                acc[i, j] = cost + acc[i, j - 1]
            elif j == 0:
                acc[i, j] = cost + acc[i - 1, j]
            else:
                acc[i, j] = cost + min(acc[i - 1, j],
                                       acc[i, j - 1],
                                       acc[i - 1, j - 1])
    return acc


@njit(cache=True)
def dtw_dist(a, b):
    """Return the DTW distance between two series."""
    return dtw_acc_cost(a, b)[-1, -1]


@njit(cache=True)
def dtw_path(acc):
    """Backtrack the optimal warping path.

    Parameters
    ----------
    acc : numpy.ndarray(float, size = (n, m))
        Accumulated cost matrix.

    Returns
    -------
    numpy.ndarray(int, size = (L, 2))
        Index pairs (i, j) of the path from (0, 0) to (n-1, m-1).

    """
    i, j = acc.shape[0] - 1, acc.shape[1] - 1
    path = np.empty((acc.shape[0] + acc.shape[1], 2), dtype=np.int64)
    k = 0
    path[k, 0] = i
    path[k, 1] = j
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            diag = acc[i - 1, j - 1]
            up = acc[i - 1, j]
            left = acc[i, j - 1]
            if diag <= up and diag <= left:
                i -= 1
                j -= 1
            elif up <= left:
                i -= 1
            else:
                j -= 1
        k += 1
        path[k, 0] = i
        path[k, 1] = j
    return path[:k + 1][::-1].copy()


@njit(cache=True, parallel=True)
def dtw_to_centroids(series, centroids):
    """Compute the DTW distance of each series to each centroid.

    Parameters
    ----------
    series : numpy.ndarray(float, size = (S, n, d))
        Equal length series.
    centroids : numpy.ndarray(float, size = (K, m, d))
        Equal length centroids.

    Returns
    -------
    numpy.ndarray(float, size = (S, K))
        DTW distances.

    """
    out = np.empty((series.shape[0], centroids.shape[0]))
    for s in prange(series.shape[0]):
        for k in range(centroids.shape[0]):
            out[s, k] = dtw_acc_cost(series[s], centroids[k])[-1, -1]
    return out


@njit(cache=True, parallel=True)
def mean_nearest_dist(loc, alive, nodes):
    """Time average of the mean distance of agents to their nearest node.

    Parameters
    ----------
    loc : numpy.ndarray(float, size = (T, N, 2))
        Agents positions.
    alive : numpy.ndarray(bool, size = (T, N))
        Agents taken into account at each step.
    nodes : numpy.ndarray(float, size = (K, 2))
        Node locations.

    Returns
    -------
    float
        mean_t mean_i min_k |loc[t, i] - nodes[k]|, steps without agents are skipped.

    """
    n_t = loc.shape[0]
    per_t = np.zeros(n_t)
    used = np.zeros(n_t, dtype=np.bool_)
    for t in prange(n_t):
        s = 0.
        c = 0
        for i in range(loc.shape[1]):
            if not alive[t, i]:
                continue
            best = np.inf
            for k in range(nodes.shape[0]):
                dx = loc[t, i, 0] - nodes[k, 0]
                dy = loc[t, i, 1] - nodes[k, 1]
                d = dx * dx + dy * dy
                if d < best:
                    best = d
            s += np.sqrt(best)
            c += 1
        if c > 0:
            per_t[t] = s / c
            used[t] = True
    n_used = 0
    tot = 0.
    for t in range(n_t):
        if used[t]:
            tot += per_t[t]
            n_used += 1
    if n_used == 0:
        return 0.
    return tot / n_used
