import itertools
import numpy as np
import pytest
from abmsim import graph_search as gs
from abmsim.graph_search import (QuadtreeNode, QuadtreeParams, GAMember, GAParams,
                                 TSxMParams)
from abmsim.simu import PositionLog


def _stationary_log(points, T=5):
    points = np.asarray(points, dtype=float)
    loc = np.repeat(points[None, ...], T + 1, axis=0)
    return PositionLog('norm', loc, np.zeros(loc.shape[:2], dtype=np.int64),
                       np.zeros(loc.shape[:2]))


def _two_groups(n=3):
    return np.array([[0., 0.]] * n + [[10., 10.]] * n)


# Quadtree

def test_quadtree_stop_conditions():
    root = gs.build_quadtree(np.empty((0, 2)), 1.)
    assert root.is_leaf
    root = gs.build_quadtree([[0., 0.], [0.5, 0.], [0.2, 0.3]], 1.)
    assert root.is_leaf


def test_quadtree_one_split():
    root = gs.build_quadtree([[0.05, 0.05], [0.95, 0.95]], 0.2, cell=(0., 0., 1.))
    assert len(root.children) == 4
    assert all(ch.is_leaf for ch in root.children)
    # NE and SW hold the agents
    np.testing.assert_allclose(root.children[1].center, [0.75, 0.75])
    np.testing.assert_allclose(root.children[2].center, [0.25, 0.25])


def test_quadtree_leaves_tile_root():
    pts = np.random.default_rng(0).uniform(0, 16, size=(40, 2))
    root = gs.build_quadtree(pts, 1., cell=(0., 0., 16.))
    assert sum(lf.cell[2]**2 for lf in root.leaves()) == pytest.approx(256.)
    for lf in root.leaves():
        x0, y0, s = lf.cell
        inside = ((pts[:, 0] >= x0) & (pts[:, 0] < x0 + s)
                  & (pts[:, 1] >= y0) & (pts[:, 1] < y0 + s))
        assert gs.stop_reason(pts, np.nonzero(inside)[0], 1.) is not None


def test_quadtree_max_depth_warns():
    with pytest.warns(UserWarning):
        root = gs.build_quadtree([[0., 0.], [1e-6, 0.], [2e-6, 0.]], 1e-7, max_depth=3,
                                 cell=(0., 0., 1.))
    assert max(lf.depth for lf in root.leaves()) == 3


def test_average_quadtrees_vote():
    leaf = QuadtreeNode((0., 0., 1.))
    split = QuadtreeNode((0., 0., 1.))
    split.split()
    avg = gs.average_quadtrees([split, split], 0.5)
    assert avg.same_structure(split)
    assert not gs.average_quadtrees([leaf, split], 0.5).is_leaf
    assert gs.average_quadtrees([leaf, leaf, split], 0.5).is_leaf
    with pytest.raises(ValueError):
        gs.average_quadtrees([leaf, QuadtreeNode((0., 0., 2.))])


def _internal_cells(tree):
    out, stack = [], [tree]
    while stack:
        nd = stack.pop()
        if not nd.is_leaf:
            out.append(nd.cell)
            stack += nd.children
    return out


@pytest.mark.parametrize('theta_split', [0.2, 0.5, 0.8])
def test_average_quadtrees_recount(theta_split):
    rand_gen = np.random.default_rng(21)
    for _ in range(10):
        trees = [gs.build_quadtree(rand_gen.random((12, 2)), 0.15, max_depth=10,
                                   cell=(0., 0., 1.)) for _ in range(5)]
        votes = {}
        for tree in trees:
            for cell in _internal_cells(tree):
                votes[cell] = votes.get(cell, 0) + 1
        avg = gs.average_quadtrees(trees, theta_split)
        stack = [avg]
        while stack:
            nd = stack.pop()
            n_split = votes.get(nd.cell, 0)
            if nd.is_leaf:
                assert n_split == 0 or n_split / 5 < theta_split
            else:
                assert n_split > 0 and n_split / 5 >= theta_split
                stack += nd.children




def test_quadtree_to_graph():
    leaf = QuadtreeNode((0., 0., 1.))
    g = gs.quadtree_to_graph(leaf)
    assert (g.n_nodes, g.n_edges) == (1, 0)
    root = QuadtreeNode((0., 0., 1.))
    root.split()
    g = gs.quadtree_to_graph(root, adjacency_augment=False)
    assert (g.n_nodes, g.n_edges) == (4, 6)
    root.children[0].split()
    g = gs.quadtree_to_graph(root, adjacency_augment=False)
    assert (g.n_nodes, g.n_edges) == (7, 9)
    assert not g.is_connected()
    g = gs.quadtree_to_graph(root, adjacency_augment=True)
    assert g.is_connected()


def test_quadtree_search():
    log = _stationary_log([[0.05, 0.05], [0.95, 0.95]])
    g = gs.quadtree_search(log, None, QuadtreeParams(r_int=0.2))
    assert (g.n_nodes, g.n_edges) == (4, 6)


# Genetic algorithm

def test_fitness_values():
    log = _stationary_log([[3., 4.]], T=7)
    assert gs.fitness(GAMember([[0., 0.]]), log) == pytest.approx(5.)
    assert gs.fitness(GAMember([[3., 4.]]), log) == 0.
    loc = np.array([[[1., 0.]], [[3., 0.]]])
    assert gs.fitness(GAMember([[0., 0.]]), loc) == pytest.approx(2.)
    assert gs.fitness(GAMember([[0., 0.]]), loc, lambda_v=0.5) == pytest.approx(2.5)
    with pytest.raises(ValueError):
        GAMember(np.empty((0, 2)))


def test_fitness_ignores_dead_agents():
    loc = np.array([[[1., 0.], [100., 0.]]])
    log = PositionLog('norm', loc, np.zeros((1, 2), dtype=np.int64), np.zeros((1, 2)),
                      np.array([[True, False]]))
    assert gs.fitness(GAMember([[0., 0.]]), log) == pytest.approx(1.)


def test_greedy_set_cover():
    m = gs.greedy_set_cover_init([[0., 0.], [0.5, 0.], [0., 0.5]], 1.)
    assert len(m) == 1
    m = gs.greedy_set_cover_init([[0., 0.], [0.1, 0.], [50., 50.], [50.1, 50.]], 1.)
    assert len(m) == 2
    m = gs.greedy_set_cover_init([[2., 3.]], 1.)
    np.testing.assert_array_equal(m.node_locations, [[2., 3.]])
    with pytest.raises(ValueError):
        gs.greedy_set_cover_init(np.empty((0, 2)), 1.)


def test_mutate():
    m = GAMember([[0., 0.], [1., 1.]])
    same = gs.mutate(m, 0., np.random.default_rng(0))
    np.testing.assert_array_equal(same.node_locations, m.node_locations)
    one = gs.mutate(GAMember([[5., 5.]]), 1., np.random.default_rng(1))
    assert not np.array_equal(one.node_locations, [[5., 5.]])
    a = gs.mutate(m, 1., np.random.default_rng(2))
    b = gs.mutate(m, 1., np.random.default_rng(2))
    np.testing.assert_array_equal(a.node_locations, b.node_locations)
    assert np.sum(np.any(a.node_locations != m.node_locations, axis=1)) == 1


def test_crossover():
    rand_gen = np.random.default_rng(3)
    m1 = GAMember([[0., 0.], [1., 1.], [2., 2.]])
    m2 = GAMember([[10., 10.], [11., 11.], [12., 12.]])
    c1, c2 = gs.crossover(m1, m2, rand_gen, j=1)
    np.testing.assert_array_equal(c1.node_locations, [[0., 0.], [11., 11.], [12., 12.]])
    np.testing.assert_array_equal(c2.node_locations, [[10., 10.], [1., 1.], [2., 2.]])
    c1, c2 = gs.crossover(m1, m2, rand_gen, j=3)
    np.testing.assert_array_equal(c1.node_locations, m1.node_locations)
    c1, c2 = gs.crossover(GAMember([[0., 0.]]), GAMember([[1., 1.]]), rand_gen)
    np.testing.assert_array_equal(c1.node_locations, [[0., 0.]])
    with pytest.raises(ValueError):
        gs.crossover(m1, GAMember([[0., 0.]]), rand_gen)


def test_royalty_selection():
    pop = [GAMember([[float(i), 0.]]) for i in range(10)]
    losses = [5., 3., 9., 1., 7., 2., 8., 4., 6., 0.5]
    out = gs.royalty_tournament_select(pop, losses, 1., np.random.default_rng(4))
    assert [m.node_locations[0, 0] for m in out] == [9., 3., 5., 1., 7., 0., 8., 4., 6., 2.]
    out = gs.royalty_tournament_select(pop, losses, 0.1, np.random.default_rng(4))
    assert len(out) == 10
    assert out[0] is pop[9]
    with pytest.raises(ValueError):
        gs.royalty_tournament_select(pop, losses[:3], 0.1, np.random.default_rng(4))


def test_royalty_equal_losses_uniform():
    idx = gs._royalty_indices(np.ones(4), 0.25, np.random.default_rng(5))
    counts = np.zeros(4)
    rand_gen = np.random.default_rng(6)
    for _ in range(500):
        counts += np.bincount(gs._royalty_indices(np.ones(4), 0.25, rand_gen)[1:], minlength=4)
    assert len(idx) == 4
    assert np.all(np.abs(counts / counts.sum() - 0.25) < 0.05)


def test_ga_single_point():
    log = _stationary_log([[2., 3.]] * 4)
    g = gs.ga_search(log, None, GAParams(pop_size=2, generations=1), np.random.default_rng(7))
    assert g.n_nodes == 1
    np.testing.assert_allclose(g.nodes, [[2., 3.]])
    assert g.n_edges == 0


def test_ga_history_monotone_and_deterministic():
    rand_gen = np.random.default_rng(8)
    loc = rand_gen.uniform(0, 10, size=(6, 15, 2))
    log = PositionLog('norm', loc, np.zeros((6, 15), dtype=np.int64), np.zeros((6, 15)))
    gp = GAParams(pop_size=10, generations=15, x0=3)
    g1, hist = gs.ga_search(log, None, gp, np.random.default_rng(9), return_history=True)
    g2 = gs.ga_search(log, None, gp, np.random.default_rng(9))
    assert len(hist) == 16
    assert np.all(np.diff(hist) <= 1e-12)
    assert g1 == g2


# Time series x-means

def test_dtw_distance():
    assert gs.dtw_distance([0.], [1.]) == 1.
    assert gs.dtw_distance([0., 0.], [0., 1., 1.]) == 2.
    assert gs.dtw_distance([1., 2., 3.], [1., 2., 3.]) == 0.
    with pytest.raises(ValueError):
        gs.dtw_distance([], [1.])


def test_dtw_brute_force():
    a = np.array([0., 2., 1.])
    b = np.array([1., 0., 2., 2.])

    def paths(i, j):
        if (i, j) == (0, 0):
            return [abs(a[0] - b[0])]
        out = []
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            if i - di >= 0 and j - dj >= 0:
                out += [c + abs(a[i] - b[j]) for c in paths(i - di, j - dj)]
        return out

    assert gs.dtw_distance(a, b) == pytest.approx(min(paths(2, 3)))


def _all_paths_min(a, b):
    """Minimum cost over an explicit enumeration of the warping paths."""
    best = np.inf
    stack = [(0, 0, abs(a[0] - b[0]))]
    while stack:
        i, j, cost = stack.pop()
        if (i, j) == (len(a) - 1, len(b) - 1):
            best = min(best, cost)
            continue
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            if i + di < len(a) and j + dj < len(b):
                stack.append((i + di, j + dj, cost + abs(a[i + di] - b[j + dj])))
    return best


def test_dtw_example():
    assert gs.dtw_distance([0., 0.], [0., 1., 1.]) == 2.


def test_dtw_binary_series_exhaustive():
    series = [np.array(bits, dtype=float) for n in range(1, 6)
              for bits in itertools.product((0, 1), repeat=n)]
    for a in series:
        for b in series:
            assert gs.dtw_distance(a, b) == _all_paths_min(a, b)


def test_dtw_symmetry_and_self_distance():
    rand_gen = np.random.default_rng(20)
    for _ in range(1000):
        d = int(rand_gen.integers(1, 3))
        a = rand_gen.normal(size=(int(rand_gen.integers(1, 9)), d))
        b = rand_gen.normal(size=(int(rand_gen.integers(1, 9)), d))
        assert abs(gs.dtw_distance(a, b) - gs.dtw_distance(b, a)) <= 1e-12
        assert gs.dtw_distance(a, a) == 0.




def test_dtw_kmeans():
    tp = TSxMParams()
    series = [np.full(4, 0.), np.full(4, 0.1), np.full(4, 5.), np.full(4, 5.2), np.full(4, 0.05)]
    _, assign, _ = gs.dtw_kmeans(series, 1, tp, np.random.default_rng(10))
    assert np.all(assign == 0)
    _, assign, _ = gs.dtw_kmeans(series, 2, tp, np.random.default_rng(10))
    assert assign[0] == assign[1] == assign[4] != assign[2] == assign[3]
    _, _, inertia = gs.dtw_kmeans([np.arange(3.)] * 3, 2, tp, np.random.default_rng(11))
    assert inertia == 0.
    with pytest.raises(ValueError):
        gs.dtw_kmeans(series, 6, tp, np.random.default_rng(12))


@pytest.mark.parametrize('max_iter', [1, 2, 3, 20])
def test_dtw_kmeans_centroids_match_assignment(max_iter):
    rand_gen = np.random.default_rng(18)
    series = [rand_gen.normal(size=(6, 2)) for _ in range(10)]
    centroids, assign, inertia = gs.dtw_kmeans(series, 3, TSxMParams(max_iter=max_iter, tol=0.),
                                               np.random.default_rng(19))
    dist = np.array([[gs.dtw_distance(s, c) for c in centroids] for s in series])
    np.testing.assert_array_equal(assign, dist.argmin(axis=1))
    assert inertia == pytest.approx(dist.min(axis=1).sum())
    with pytest.raises(ValueError):
        TSxMParams(max_iter=0)


def test_dtw_kmeans_history_non_increasing():
    rand_gen = np.random.default_rng(13)
    series = [rand_gen.normal(size=(8, 2)) for _ in range(12)]
    _, _, _, hist = gs.dtw_kmeans(series, 3, TSxMParams(), rand_gen, return_history=True)
    assert np.all(np.diff(hist) <= 1e-9)


def test_elbow_select():
    assert gs.elbow_select([10.]) == 1
    assert gs.elbow_select([4., 3., 2., 1.]) == 1
    assert gs.elbow_select([100., 10., 9., 8.5]) == 2
    assert gs.elbow_select([5., 5., 5.]) == 1
    assert gs.elbow_select([5., 0.]) == 2


def test_tsxm_single_point():
    log = _stationary_log([[1., 1.]] * 5)
    g = gs.tsxm_search(log, None, TSxMParams(epsilon=3), np.random.default_rng(14))
    assert g.n_nodes == 1
    np.testing.assert_allclose(g.nodes, [[1., 1.]])


@pytest.mark.parametrize('epsilon', [2, 4])
def test_tsxm_two_groups(epsilon):
    log = _stationary_log(_two_groups())
    tp = TSxMParams(epsilon=epsilon)
    g1, inertias = gs.tsxm_search(log, None, tp, np.random.default_rng(15), return_inertia=True)
    assert g1.n_nodes == 2
    assert len(inertias) == epsilon
    nodes = g1.nodes[np.argsort(g1.nodes[:, 0])]
    np.testing.assert_allclose(nodes, [[0., 0.], [10., 10.]], atol=1e-9)
    assert g1 == gs.tsxm_search(log, None, tp, np.random.default_rng(15))


def test_tsxm_splits_wide_clusters():
    log = _stationary_log([[10. * i, 0.] for i in range(6)])
    g = gs.tsxm_search(log, None, TSxMParams(epsilon=2), np.random.default_rng(16))
    assert g.n_nodes == 6
    np.testing.assert_allclose(np.sort(g.nodes[:, 0]), [0., 10., 20., 30., 40., 50.], atol=1e-9)
    for r_split in (None, 100.):
        g = gs.tsxm_search(log, None, TSxMParams(epsilon=2, r_split=r_split),
                           np.random.default_rng(16))
        assert g.n_nodes <= 2


def test_split_clusters_width_rule():
    rand_gen = np.random.default_rng(17)
    loc = (np.cumsum(rand_gen.normal(scale=0.5, size=(20, 30, 2)), axis=0)
           + rand_gen.uniform(0, 40, size=(1, 30, 2)))
    sub = loc / 40.
    series = [sub[:, i] for i in range(30)]
    assign = gs.split_clusters(series, sub, loc, np.zeros(30, dtype=np.int64),
                               TSxMParams(r_split=2.), rand_gen)
    assert assign[0] == 0
    assert set(assign) == set(range(assign.max() + 1))
    for c in range(assign.max() + 1):
        idx = np.nonzero(assign == c)[0]
        if len(idx) > 1:
            com = loc[:, idx].mean(axis=1, keepdims=True)
            assert np.sqrt(np.sum((loc[:, idx] - com)**2, axis=-1)).mean() <= 1.


def test_infer_edges():
    nodes = np.array([[0., 0.], [10., 0.], [20., 0.]])
    assert gs.infer_edges(nodes, _stationary_log([[0., 0.], [20., 0.]])) == set()
    loc = np.array([[[9., 0.]], [[19., 0.]], [[11., 0.]], [[21., 0.]]])
    assert gs.infer_edges(nodes, loc) == {(1, 2)}
    assert gs.infer_edges(nodes, loc[:2], min_count=2) == set()


def test_search_graph_dispatch():
    log = _stationary_log([[1., 1.]])
    g = gs.search_graph('quadtree', log, None, QuadtreeParams(), np.random.default_rng(0))
    assert g.n_nodes == 1
    with pytest.raises(ValueError):
        gs.search_graph('rnn', log, None, None, np.random.default_rng(0))
