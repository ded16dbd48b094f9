import numpy as np
import pandas as pd
import pytest
from abmsim import graph_space as gsp
from abmsim.graph_space import SpatialGraph, GraphAgent, WalkContext
from abmsim.epi_models import AgentEpi, EpiParams


class FixedWalk:
    """Walk model always proposing the same target, None to stay."""

    def __init__(self, target=None):
        self.target = target

    def next_node(self, ctx, u):
        return ctx.node if self.target is None else self.target


def _line_graph():
    return SpatialGraph([[0., 0.], [1., 0.], [2., 0.]], [(1, 0), (1, 2)])


def _ctx(graph, node):
    occ = np.zeros((graph.n_nodes, 3))
    return gsp.make_context(graph, occ, node, 0, 0., 0.)


def test_graph_validation():
    with pytest.raises(ValueError):
        SpatialGraph([[0., 0.]], [(0, 0)])
    with pytest.raises(ValueError):
        SpatialGraph([[0., 0.], [1., 1.]], [(0, 2)])
    with pytest.raises(ValueError):
        SpatialGraph(np.empty((0, 2)))


def test_graph_structure():
    g = _line_graph()
    assert g.edges == frozenset({(0, 1), (1, 2)})
    np.testing.assert_array_equal(g.neighbors(1), [0, 2])
    np.testing.assert_array_equal(g.options(0), [0, 1])
    assert g.degree(2) == 1
    assert g.is_connected()
    assert not SpatialGraph([[0., 0.], [1., 0.]]).is_connected()


def test_graph_frames():
    g = _line_graph()
    assert list(g.edges_frame().columns) == ['src', 'dst']
    assert SpatialGraph.from_frames(g.nodes_frame(), g.edges_frame()) == g
    bad = pd.DataFrame({'id': [0, 2], 'x': [0., 1.], 'y': [0., 0.]})
    with pytest.raises(ValueError):
        SpatialGraph.from_frames(bad, pd.DataFrame({'src': [], 'dst': []}))


def test_nearest_node():
    single = SpatialGraph([[5., 5.]])
    assert gsp.nearest_node(single, (-100., 3.)) == 0
    g = SpatialGraph([[0., 0.], [1., 0.], [2., 0.], [3., 3.], [1., 2.]])
    assert gsp.nearest_node(g, (3., 3.)) == 3
    # equidistant from nodes 1 and 4
    assert gsp.nearest_node(g, (1., 1.)) == 1
    np.testing.assert_array_equal(gsp.nearest_node(g, [[0., 0.1], [2.9, 2.9]]), [0, 3])


def test_node_occupancy():
    occ = gsp.node_occupancy(np.array([0, 0, 1, 0]), np.array([0, 1, 2, 1]), 3)
    np.testing.assert_allclose(occ, [[1 / 3, 2 / 3, 0.], [0., 0., 1.], [0., 0., 0.]])


def test_context_neighbors():
    g = _line_graph()
    occ = gsp.node_occupancy(np.array([0, 2]), np.array([1, 0]), 3)
    ctx = gsp.make_context(g, occ, 1, 0, 0.5, 0.1)
    np.testing.assert_allclose(ctx.neighbor_infected, [1., 0.])
    assert isinstance(ctx, WalkContext)


def test_walk_step_rules():
    g = _line_graph()
    rand_gen = np.random.default_rng(0)
    agent = GraphAgent(AgentEpi(0), 1)
    assert gsp.graph_walk_step(agent, g, FixedWalk(), _ctx(g, 1), rand_gen).node == 1
    assert gsp.graph_walk_step(agent, g, FixedWalk(2), _ctx(g, 1), rand_gen).node == 2
    isolated = SpatialGraph([[0., 0.], [1., 0.]])
    agent = GraphAgent(AgentEpi(0), 0)
    assert gsp.graph_walk_step(agent, isolated, FixedWalk(1), _ctx(isolated, 0),
                               rand_gen).node == 0


def test_walk_step_coerces_illegal_moves():
    g = _line_graph()
    agent = GraphAgent(AgentEpi(0), 0)
    with pytest.warns(UserWarning):
        new = gsp.graph_walk_step(agent, g, FixedWalk(2), _ctx(g, 0), np.random.default_rng(1))
    assert new.node == 0


def test_walk_step_dead_agent():
    g = _line_graph()
    agent = GraphAgent(AgentEpi(4), 1)
    new = gsp.graph_walk_step(agent, g, FixedWalk(2), _ctx(g, 1), np.random.default_rng(2),
                              epi_model='seird2')
    assert new.node == 1


def test_walk_population_counts_coercions():
    g = _line_graph()
    node = np.array([0, 1, 2, 1])
    new, n_coerced = gsp.walk_graph_population(g, FixedWalk(2), node, np.zeros(4, dtype=int),
                                               np.zeros(4), np.array([True, True, True, False]),
                                               0., np.random.default_rng(3))
    np.testing.assert_array_equal(new, [0, 2, 2, 1])
    assert n_coerced == 1


def test_contact_scale():
    assert gsp.contact_scale(1, 1.) == pytest.approx(1. - np.exp(-1.))
    assert gsp.contact_scale(3, 1.) == pytest.approx(1. - np.exp(-0.5))
    assert gsp.contact_scale(2, 1e3) == 1.


def test_node_interaction():
    g = _line_graph()
    params = EpiParams('sir', 1., 10)
    pop = [GraphAgent(AgentEpi(0, theta=3), 0), GraphAgent(AgentEpi(1), 0),
           GraphAgent(AgentEpi(0), 2)]
    out = gsp.node_interaction_step(pop, g, params, 1e3, np.random.default_rng(4))
    assert out[0].epi == AgentEpi(1, theta=0)
    assert out[1] == pop[1]
    assert out[2] == pop[2]


def test_node_interaction_only_susceptibles():
    g = _line_graph()
    params = EpiParams('sir', 1., 10)
    pop = [GraphAgent(AgentEpi(0), 1) for _ in range(4)]
    assert gsp.node_interaction_step(pop, g, params, 1e3, np.random.default_rng(5)) == pop


def test_node_interaction_invalid_node():
    params = EpiParams('sir', 1., 10)
    with pytest.raises(ValueError):
        gsp.node_interaction_step([GraphAgent(AgentEpi(0), 7)], _line_graph(), params, 1.,
                                  np.random.default_rng(6))
