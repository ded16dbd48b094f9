import numpy as np
import pytest
from abmsim import walk_approx as wa
from abmsim.walk_approx import MCWalkModel, MACWalkModel, MACTrainParams
from abmsim.graph_space import SpatialGraph, WalkContext
from abmsim.simu import PositionLog


def _pair_graph():
    return SpatialGraph([[0., 0.], [10., 0.]], [(0, 1)])


def _ctx(node, macro=0, deg=1, t_frac=0.):
    return WalkContext(macro=macro, clock=0., node=node,
                       neighbor_occupancy=np.zeros((deg, 3)), t_frac=t_frac)


def _staying_sequences(n_steps=11, n_agents=1):
    return np.zeros((n_steps, n_agents), dtype=np.int64)


def test_project_log_to_graph():
    single = SpatialGraph([[3., 3.]])
    loc = np.random.default_rng(0).uniform(-5, 5, size=(4, 3, 2))
    assert np.all(wa.project_log_to_graph(loc, single) == 0)
    g = SpatialGraph([[0., 0.], [2., 0.], [4., 0.]])
    loc = np.array([[[2., 0.], [4., 0.], [1., 0.]]])
    np.testing.assert_array_equal(wa.project_log_to_graph(loc, g), [[1, 2, 0]])


def test_mc_smoothing():
    g = _pair_graph()
    seq = _staying_sequences()
    model = wa.fit_mc(seq, np.zeros_like(seq), g)
    np.testing.assert_allclose(model.distribution(_ctx(0)), [11 / 12, 1 / 12])
    np.testing.assert_allclose(model.backoff_node[0], [11 / 12, 1 / 12])


def test_mc_backoff():
    g = _pair_graph()
    seq = _staying_sequences()
    model = wa.fit_mc(seq, np.zeros_like(seq), g)
    # unseen class at a seen node uses the node table
    assert (0, 1) not in model.backoff_class
    np.testing.assert_allclose(model.distribution(_ctx(0, macro=1)), [11 / 12, 1 / 12])
    # unseen node is uniform
    np.testing.assert_allclose(model.distribution(_ctx(1)), [0.5, 0.5])


def test_mc_isolated_node():
    g = SpatialGraph([[0., 0.], [5., 0.]])
    model = MCWalkModel(g)
    np.testing.assert_allclose(model.distribution(_ctx(0, deg=0)), [1.])
    assert wa.mc_sample_next(model, _ctx(0, deg=0), np.random.default_rng(1)) == 0


def test_mc_counts_legal_moves_only():
    g = SpatialGraph([[0., 0.], [1., 0.], [2., 0.]], [(0, 1), (1, 2)])
    seq = np.array([[0], [2], [1], [1]])
    model = wa.fit_mc(seq, np.zeros_like(seq), g, alpha_s=0.)
    assert 0 not in model.backoff_node
    np.testing.assert_allclose(model.backoff_node[2], [0., 1.])
    np.testing.assert_allclose(model.backoff_node[1], [1., 0., 0.])


def test_mc_skips_dead_agents():
    g = _pair_graph()
    seq = np.array([[0, 1], [1, 1], [1, 1]])
    log = PositionLog('graph', seq, np.zeros((3, 2), dtype=np.int64), np.zeros((3, 2)),
                      np.array([[False, True], [False, True], [False, True]]))
    model = wa.fit_mc(seq, log, g, alpha_s=0.)
    assert 0 not in model.backoff_node
    np.testing.assert_allclose(model.backoff_node[1], [1., 0.])


def test_mc_signature_bins():
    g = SpatialGraph([[0., 0.], [1., 0.], [2., 0.]], [(0, 1), (0, 2)])
    model = MCWalkModel(g)
    occ = np.array([[1., 0., 0.], [0., 0.6, 0.4]])
    ctx = WalkContext(macro=0, clock=0., node=0, neighbor_occupancy=occ, t_frac=0.)
    assert model.signature(ctx) == (0, 2)


def test_mc_sampling():
    g = _pair_graph()
    model = MCWalkModel(g, backoff_node={0: np.array([1., 0.])})
    rand_gen = np.random.default_rng(2)
    assert all(wa.mc_sample_next(model, _ctx(0), rand_gen) == 0 for _ in range(50))
    model = MCWalkModel(g)
    a = [wa.mc_sample_next(model, _ctx(0), np.random.default_rng(3)) for _ in range(2)]
    assert a[0] == a[1]


def test_fit_rejects_empty_sequences():
    g = _pair_graph()
    with pytest.raises(ValueError):
        wa.fit_mc(np.zeros((1, 1), dtype=np.int64), np.zeros((1, 1)), g)
    with pytest.raises(ValueError):
        wa.fit_mc(np.full((3, 1), 5), np.zeros((3, 1)), g)


def test_mac_features():
    ctx = WalkContext(macro=1, clock=0.5, node=0, neighbor_occupancy=np.ones((2, 3)),
                      t_frac=0.25)
    x = wa.mac_features(ctx)
    assert len(x) == wa.n_mac_features(2) == 12
    np.testing.assert_allclose(x[:5], [0., 1., 0., 0.5, 0.25])
    assert x[-1] == 1.


@pytest.mark.parametrize('seed', range(50))
def test_softmax_gradient(seed):
    rand_gen = np.random.default_rng(seed)
    n_class, d, n = rand_gen.integers(2, 5), rand_gen.integers(1, 7), rand_gen.integers(5, 21)
    W = rand_gen.normal(size=(n_class, d))
    X = rand_gen.normal(size=(n, d))
    y = rand_gen.integers(0, n_class, size=n)
    l2 = rand_gen.uniform(0., 0.5)
    _, grad = wa.softmax_loss_grad(W, X, y, l2=l2)
    num = np.zeros_like(W)
    h = 1e-6
    for idx in np.ndindex(*W.shape):
        Wp, Wm = W.copy(), W.copy()
        Wp[idx] += h
        Wm[idx] -= h
        num[idx] = (wa.softmax_loss_grad(Wp, X, y, l2)[0]
                    - wa.softmax_loss_grad(Wm, X, y, l2)[0]) / (2 * h)
    rel = np.linalg.norm(grad - num) / max(np.linalg.norm(grad) + np.linalg.norm(num), 1e-12)
    assert rel <= 1e-5


def test_mac_zero_epochs_is_uniform():
    g = _pair_graph()
    seq = _staying_sequences()
    model = wa.fit_mac(seq, np.zeros_like(seq), g, MACTrainParams(epochs=0),
                       np.random.default_rng(5))
    np.testing.assert_allclose(model.distribution(_ctx(0)), [0.5, 0.5])


def test_mac_learns_stay():
    g = _pair_graph()
    seq = _staying_sequences(51, 2)
    model = wa.fit_mac(seq, np.zeros_like(seq), g, MACTrainParams(),
                       np.random.default_rng(6))
    assert model.distribution(_ctx(0, t_frac=0.5))[0] >= 0.9
    rand_gen = np.random.default_rng(7)
    stays = sum(wa.mac_predict(model, _ctx(0), rand_gen) == 0 for _ in range(200))
    assert stays >= 170


def test_mac_training_loss_decreases():
    rand_gen = np.random.default_rng(8)
    X = np.column_stack((rand_gen.normal(size=(100, 2)), np.ones(100)))
    y = (X[:, 0] > 0).astype(np.int64)
    _, hist = wa.train_softmax(X, y, 2, MACTrainParams(epochs=50), rand_gen)
    assert len(hist) == 51
    assert hist[-1] < hist[0]


def test_mac_warns_without_data():
    g = SpatialGraph([[0., 0.], [10., 0.], [20., 0.]], [(0, 1), (1, 2)])
    seq = _staying_sequences()
    with pytest.warns(UserWarning):
        model = wa.fit_mac(seq, np.zeros_like(seq), g, MACTrainParams(epochs=5),
                           np.random.default_rng(9))
    np.testing.assert_allclose(model.distribution(_ctx(1, deg=2)), [1 / 3] * 3)


def test_fit_walk_model_from_log():
    g = _pair_graph()
    loc = np.zeros((6, 2, 2))
    loc[:, 1] = [10., 0.]
    log = PositionLog('norm', loc, np.zeros((6, 2), dtype=np.int64), np.zeros((6, 2)))
    model = wa.fit_walk_model('mc', log, g, None, np.random.default_rng(10))
    assert model.kind == 'mc'
    np.testing.assert_allclose(model.backoff_node[1], [6 / 7, 1 / 7])
    model = wa.fit_walk_model('mac', log, g, MACTrainParams(epochs=2), np.random.default_rng(10))
    assert model.kind == 'mac'
    with pytest.raises(ValueError):
        wa.fit_walk_model('ppo', log, g, None, np.random.default_rng(10))


def test_save_load(tmp_path):
    g = SpatialGraph([[0., 0.], [10., 0.], [20., 0.]], [(0, 1), (1, 2)])
    rand_gen = np.random.default_rng(11)
    seq = rand_gen.integers(0, 2, size=(20, 4))
    macro = rand_gen.integers(0, 3, size=(20, 4))
    mc = wa.fit_mc(seq, macro, g)
    wa.save_walk_model(mc, tmp_path / 'mc.json')
    mc2 = wa.load_walk_model(tmp_path / 'mc.json')
    assert mc2.graph == g
    for key, p in mc.table.items():
        np.testing.assert_array_equal(mc2.table[key], p)
    mac = wa.fit_mac(seq, macro, g, MACTrainParams(epochs=3), rand_gen)
    wa.save_walk_model(mac, tmp_path / 'mac.json')
    mac2 = wa.load_walk_model(tmp_path / 'mac.json')
    ctx = WalkContext(macro=1, clock=0.3, node=1, neighbor_occupancy=np.full((2, 3), 0.5),
                      t_frac=0.5)
    np.testing.assert_array_equal(mac2.distribution(ctx), mac.distribution(ctx))
