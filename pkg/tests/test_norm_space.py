import numpy as np
import pytest
from abmsim import norm_space as ns
from abmsim.norm_space import Circle, ContinuousEnv, WalkParams, SpatialAgent
from abmsim.epi_models import AgentEpi, EpiParams


BIG_ENV = ContinuousEnv([Circle((0., 0.), 1000.)])


def test_circle_validation():
    with pytest.raises(ValueError):
        Circle((0, 0), 0.)
    assert Circle((1, 2), 3).center == (1., 2.)


def test_env_validation():
    with pytest.raises(ValueError):
        ContinuousEnv([])
    with pytest.raises(ValueError):
        ContinuousEnv([Circle((0, 0), 1), Circle((0, 0), 1)])


def test_contains_closed_disk():
    env = ContinuousEnv([Circle((1., 1.), 2.)])
    assert ns.contains(env, (1., 1.))
    assert ns.contains(env, (3., 1.))
    assert not ns.contains(env, (3. + 1e-9, 1.))
    np.testing.assert_array_equal(env.contains([[1., 1.], [10., 10.]]), [True, False])


def test_env_geometry():
    env = ContinuousEnv([Circle((0., 0.), 1.), Circle((3., 0.), 2.)])
    np.testing.assert_allclose(env.bbox, [[-1., -2.], [5., 2.]])
    assert env.is_connected()
    assert abs(env.area - 5 * np.pi) < 0.05
    assert not ContinuousEnv([Circle((0., 0.), 1.), Circle((5., 0.), 1.)]).is_connected()


def test_frame_round_trip():
    env = ContinuousEnv([Circle((0., 0.), 1.), Circle((1.5, 0.25), 2.)])
    assert ContinuousEnv.from_frame(env.to_frame()) == env


def test_sample_points_inside():
    env = ContinuousEnv([Circle((0., 0.), 1.), Circle((1.5, 0.), 1.)])
    pts = env.sample_points(500, np.random.default_rng(0))
    assert pts.shape == (500, 2)
    assert np.all(env.contains(pts))


def test_generate_degenerate_ranges():
    env = ns.generate_synthetic_env(np.random.default_rng(1), [1, 1], [5, 5])
    assert len(env.circles) == 1
    assert env.circles[0].radius == 5.


def test_generate_defaults_and_determinism():
    for seed in range(5):
        env = ns.generate_synthetic_env(np.random.default_rng(seed))
        assert 1 <= len(env.circles) <= 40
        assert np.all((env.radii >= 2) & (env.radii <= 25))
        assert env.is_connected()
        assert env == ns.generate_synthetic_env(np.random.default_rng(seed))


def test_generate_retry_cap():
    # every center has to sit on the single point (0, 0)
    with pytest.raises(RuntimeError):
        ns.generate_synthetic_env(np.random.default_rng(2), [5, 5], [1, 1],
                                  placement_extent=0., max_retry=3)


@pytest.mark.parametrize('n_circles', [40, 100])
@pytest.mark.parametrize('radius', [[2., 25.], [2., 2.]])
def test_generate_always_connected(n_circles, radius):
    for seed in range(30):
        env = ns.generate_synthetic_env(np.random.default_rng(seed), [n_circles, n_circles],
                                        radius)
        assert len(env.circles) == n_circles
        assert env.is_connected()


def test_generate_inside_extent():
    env = ns.generate_synthetic_env(np.random.default_rng(4), [20, 20], [2., 5.],
                                    placement_extent=30.)
    assert env.is_connected()
    assert np.all((env.centers >= 0) & (env.centers <= 30.))


def test_walk_params_validation():
    with pytest.raises(ValueError):
        WalkParams(speed=0.)
    with pytest.raises(ValueError):
        WalkParams(kappa=-1.)
    with pytest.raises(ValueError):
        WalkParams(delta=1., d_min=2.)


@pytest.mark.parametrize('pos, pull', [
    ((0., 0.), (0., 0.)),
    ((20., 0.), (0., 0.)),
    ((5., 0.), (-0.2, 0.))])
def test_pull_term(pos, pull):
    wp = WalkParams(speed=1., delta=10., kappa=1.)
    agent = SpatialAgent(AgentEpi(0), pos, (0., 0.))
    new = ns.pull_random_walk_step(agent, BIG_ENV, wp, np.random.default_rng(3))
    step = np.array(new.pos) - np.array(pos) - np.array(pull)
    assert abs(np.linalg.norm(step) - 1.) < 1e-9


def test_walk_rejects_outside_and_dead():
    env = ContinuousEnv([Circle((0., 0.), 1.)])
    wp = WalkParams(speed=100.)
    agent = SpatialAgent(AgentEpi(0), (0.5, 0.), (0.5, 0.))
    assert ns.pull_random_walk_step(agent, env, wp, np.random.default_rng(4)).pos == (0.5, 0.)
    dead = SpatialAgent(AgentEpi(4), (0., 0.), (0., 0.))
    new = ns.pull_random_walk_step(dead, BIG_ENV, WalkParams(), np.random.default_rng(4),
                                   model='seird2')
    assert new.pos == (0., 0.)


def test_interaction_within_radius():
    params = EpiParams('sir', 1., 10)
    wp = WalkParams(r_int=0.5)
    pop = [SpatialAgent(AgentEpi(0, theta=4), (0., 0.), (0., 0.)),
           SpatialAgent(AgentEpi(1, theta=2), (0.1, 0.), (0., 0.))]
    out = ns.norm_interaction_step(pop, BIG_ENV, params, wp, np.random.default_rng(5))
    assert out[0].epi == AgentEpi(1, theta=0)
    assert out[1] == pop[1]


def test_interaction_out_of_radius_and_all_susceptible():
    params = EpiParams('sir', 1., 10)
    wp = WalkParams(r_int=0.5)
    pop = [SpatialAgent(AgentEpi(0), (0., 0.), (0., 0.)),
           SpatialAgent(AgentEpi(1), (10., 0.), (0., 0.))]
    assert ns.norm_interaction_step(pop, BIG_ENV, params, wp, np.random.default_rng(6)) == pop
    pop = [SpatialAgent(AgentEpi(0), (0., 0.), (0., 0.)) for _ in range(5)]
    assert ns.norm_interaction_step(pop, BIG_ENV, params, wp, np.random.default_rng(6)) == pop
    assert ns.norm_interaction_step([], BIG_ENV, params, wp, np.random.default_rng(6)) == []


def test_walk_determinism():
    rand_gen = np.random.default_rng(7)
    pos = BIG_ENV.sample_points(50, rand_gen)
    outs = [ns.walk_population(pos, pos, np.ones(50, dtype=bool), BIG_ENV, WalkParams(),
                               np.random.default_rng(8)) for _ in range(2)]
    np.testing.assert_array_equal(outs[0], outs[1])
