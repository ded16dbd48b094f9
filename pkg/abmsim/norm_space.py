"""This module contains the continuous (norm-based) environment and dynamics."""

import warnings
from dataclasses import dataclass, replace
import numpy as np
import pandas as pd
from shapely import geometry as shp_geo
from shapely import ops as shp_ops
from . import nb_fun as nbf
from .epi_models import init_model
from .constants import N_CIRCLES_RANGE, RADIUS_RANGE, ENV_MAX_RETRY, WALK_DEFAULTS


@dataclass(frozen=True)
class Circle:
    """A closed disk of the environment.

    Parameters
    ----------
    center : tuple(float, float)
        Center of the disk in meters.
    radius : float
        Radius in meters, > 0.
    """

    center: tuple
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f'Circle radius must be > 0, got {self.radius}')
        object.__setattr__(self, 'center', (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, 'radius', float(self.radius))


class ContinuousEnv:
    """A 2D environment made of a union of circles.

    Parameters
    ----------
    circles : list(Circle)
        The circles, non empty and pairwise distinct.

    Notes
    -----
    Membership and connectivity are computed from the disks arithmetic, the
    shapely ``footprint`` is a polygonal approximation used for the area.
    """

    dim = 2

    def __init__(self, circles):
        circles = list(circles)
        if len(circles) == 0:
            raise ValueError('ContinuousEnv needs at least one circle')
        if len(set(circles)) != len(circles):
            raise ValueError('ContinuousEnv circles must be pairwise distinct')
        self._circles = circles
        self._centers = np.array([c.center for c in circles], dtype=float)
        self._radii = np.array([c.radius for c in circles], dtype=float)
        self._footprint = None

    def __repr__(self):
        return f'ContinuousEnv(n_circles={len(self._circles)}, bbox={self.bbox.tolist()})'

    def __eq__(self, other):
        if not isinstance(other, ContinuousEnv):
            return NotImplemented
        return self._circles == other._circles

    @property
    def circles(self):
        """Get the list of circles."""
        return self._circles

    @property
    def centers(self):
        """Get circles centers as an array (K, 2)."""
        return self._centers

    @property
    def radii(self):
        """Get circles radii."""
        return self._radii

    @property
    def bbox(self):
        """Get the minimal bounding box [[xmin, ymin], [xmax, ymax]]."""
        low = np.min(self._centers - self._radii[:, None], axis=0)
        high = np.max(self._centers + self._radii[:, None], axis=0)
        return np.array([low, high])

    @property
    def footprint(self):
        """Get the shapely union of the circles."""
        if self._footprint is None:
            disks = [shp_geo.Point(c.center).buffer(c.radius, resolution=32)
                     for c in self._circles]
            self._footprint = shp_ops.unary_union(disks)
        return self._footprint

    @property
    def area(self):
        """Get the area of the circles union in square meters."""
        return self.footprint.area

    def contains(self, points):
        """Check if points are inside the union of closed disks.

        Parameters
        ----------
        points : numpy.ndarray(float, size = (2,) or (M, 2))
            Points to test.

        Returns
        -------
        bool or numpy.ndarray(bool)
            True for points inside the environment.
        """
        points = np.asarray(points, dtype=float)
        single = points.ndim == 1
        pts = np.atleast_2d(points)
        d2 = np.sum((pts[:, None, :] - self._centers[None, :, :])**2, axis=-1)
        inside = np.any(d2 <= self._radii[None, :]**2, axis=1)
        if single:
            return bool(inside[0])
        return inside

    def is_connected(self):
        """Check that the circles union is path-connected."""
        return _connected_disks(self._centers, self._radii)

    def sample_points(self, n, rand_gen):
        """Draw points uniformly inside the environment.

        Parameters
        ----------
        n : int
            Number of points.
        rand_gen : numpy.random.Generator
            Numpy random generator.

        Returns
        -------
        numpy.ndarray(float, size = (n, 2))
            Uniform positions in the circles union (rejection in the bbox).
        """
        bbox = self.bbox
        out = np.empty((n, 2))
        n_ok = 0
        while n_ok < n:
            n_try = max(2 * (n - n_ok), 16)
            cand = rand_gen.uniform(bbox[0], bbox[1], size=(n_try, 2))
            cand = cand[self.contains(cand)][:n - n_ok]
            out[n_ok:n_ok + len(cand)] = cand
            n_ok += len(cand)
        return out

    def to_frame(self):
        """Give the circle records as a pandas.DataFrame."""
        return pd.DataFrame({'center_x': self._centers[:, 0],
                             'center_y': self._centers[:, 1],
                             'radius': self._radii})

    @classmethod
    def from_frame(cls, df):
        """Build an environment from circle records (center_x, center_y, radius)."""
        return cls([Circle((x, y), r) for x, y, r in
                    zip(df['center_x'], df['center_y'], df['radius'])])


@dataclass(frozen=True)
class WalkParams:
    """Parameters of the pull random walk.

    Parameters
    ----------
    speed : float
        Step length in meters / step.
    delta : float
        Pull cutoff distance in meters.
    kappa : float
        Pull coefficient in m^2 / step.
    d_min : float
        Guard distance of the pull singularity.
    r_int : float
        Interaction radius in meters.
    """

    speed: float = WALK_DEFAULTS['speed']
    delta: float = WALK_DEFAULTS['delta']
    kappa: float = WALK_DEFAULTS['kappa']
    d_min: float = WALK_DEFAULTS['d_min']
    r_int: float = WALK_DEFAULTS['r_int']

    def __post_init__(self):
        for k in ('speed', 'delta', 'd_min', 'r_int'):
            if not getattr(self, k) > 0:
                raise ValueError(f'WalkParams.{k} must be > 0')
        if self.kappa < 0:
            raise ValueError('WalkParams.kappa must be >= 0')
        if not self.d_min < self.delta:
            raise ValueError('WalkParams.d_min must be < delta')


@dataclass(frozen=True)
class SpatialAgent:
    """An agent of the norm-based simulation.

    Parameters
    ----------
    epi : AgentEpi
        Epidemiological part.
    pos : tuple(float, float)
        Current position.
    spawn : tuple(float, float)
        Original location, the pull target.
    """

    epi: object
    pos: tuple
    spawn: tuple


def _connected_disks(centers, radii):
    """Union-find over overlapping (or touching) disks."""
    n = len(radii)
    parent = np.arange(n)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.sqrt(np.sum((centers[:, None, :] - centers[None, :, :])**2, axis=-1))
    ii, jj = np.nonzero(np.triu(dist <= radii[:, None] + radii[None, :], k=1))
    for i, j in zip(ii, jj):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri
    return len({find(i) for i in range(n)}) == 1


def generate_synthetic_env(rand_gen, n_circles_range=N_CIRCLES_RANGE,
                           radius_range=RADIUS_RANGE, placement_extent=None,
                           max_retry=ENV_MAX_RETRY):
    """Generate a random connected union of circles.

    Parameters
    ----------
    rand_gen : numpy.random.Generator
        Numpy random generator.
    n_circles_range : list(int)
        Inclusive range of the number of circles.
    radius_range : list(float)
        Range of the circles radii in meters.
    placement_extent : float, opt
        Side of the square [0, side]^2 that must hold every center,
        default is no bound.
    max_retry : int
        Number of draws of one center before giving up.

    Returns
    -------
    ContinuousEnv
        The environment.

    Notes
    -----
    Circles are placed one after the other. The center of circle i is
    drawn uniformly in the disk of radius r_i + r_j around a circle j
    already placed (j uniform), so the union is path-connected by
    construction. Draws that leave the placement square or duplicate a
    circle are redone.
    """
    n = int(rand_gen.integers(n_circles_range[0], n_circles_range[1] + 1))
    radii = rand_gen.uniform(radius_range[0], radius_range[1], size=n)
    centers = np.zeros((n, 2))
    if placement_extent is not None:
        centers[0] = rand_gen.uniform(0, placement_extent, size=2)

    for i in range(1, n):
        for _ in range(max_retry):
            j = rand_gen.integers(0, i)
            d = (radii[i] + radii[j]) * np.sqrt(rand_gen.random())
            angle = rand_gen.uniform(0, 2 * np.pi)
            c = centers[j] + d * np.array([np.cos(angle), np.sin(angle)])
            if placement_extent is not None and np.any((c < 0) | (c > placement_extent)):
                continue
            if np.any(np.all(centers[:i] == c, axis=1) & (radii[:i] == radii[i])):
                continue
            centers[i] = c
            break
        else:
            raise RuntimeError(f'Circle {i} of {n} (radius {radii[i]:.2f}) could not be placed '
                               f'in the square of side {placement_extent} '
                               f'after {max_retry} tries')
    return ContinuousEnv([Circle(c, r) for c, r in zip(centers, radii)])


def contains(env, p):
    """Check if p is inside env (closed disks)."""
    return env.contains(p)


def walk_population(pos, spawn, moving, env, wp, rand_gen):
    """Apply one pull random walk step to all agents.

    Parameters
    ----------
    pos : numpy.ndarray(float, size = (N, 2))
        Current positions.
    spawn : numpy.ndarray(float, size = (N, 2))
        Spawn positions.
    moving : numpy.ndarray(bool)
        False for agents that do not move (dead).
    env : ContinuousEnv
        The environment.
    wp : WalkParams
        Walk parameters.
    rand_gen : numpy.random.Generator
        Numpy random generator.

    Returns
    -------
    numpy.ndarray(float, size = (N, 2))
        New positions, proposals outside env are rejected.
    """
    angle = rand_gen.uniform(0, 2 * np.pi, size=len(pos))
    step = wp.speed * np.column_stack((np.cos(angle), np.sin(angle)))
    to_spawn = spawn - pos
    d = np.sqrt(np.sum(to_spawn**2, axis=1))
    active = (d > 0) & (d <= wp.delta)
    pull = np.zeros_like(pos)
    pull[active] = (wp.kappa / np.maximum(d[active], wp.d_min)
                    / d[active])[:, None] * to_spawn[active]
    proposal = pos + step + pull
    accept = moving & env.contains(proposal)
    return np.where(accept[:, None], proposal, pos)


def pull_random_walk_step(agent, env, wp, rand_gen, model=None):
    """Move one agent with the pull random walk.

    Parameters
    ----------
    agent : SpatialAgent
        The agent.
    env : ContinuousEnv
        The environment.
    wp : WalkParams
        Walk parameters.
    rand_gen : numpy.random.Generator
        Numpy random generator.
    model : str or BaseEpiModel, opt
        Epidemiological model, used to keep dead agents still.

    Returns
    -------
    SpatialAgent
        The agent at its new position.
    """
    moving = np.array([True])
    if model is not None:
        moving = ~init_model(model).dead([agent.epi.xi])
    new = walk_population(np.array([agent.pos], dtype=float),
                          np.array([agent.spawn], dtype=float),
                          moving, env, wp, rand_gen)
    return replace(agent, pos=(float(new[0, 0]), float(new[0, 1])))


def norm_infection(model, pos, xi, zeta, params, r_int, rand_gen):
    """Apply distance based contacts to a population.

    Parameters
    ----------
    model : BaseEpiModel
        Epidemiological model.
    pos : numpy.ndarray(float, size = (N, 2))
        Agents positions.
    xi, zeta : numpy.ndarray(int)
        Agents states and age groups.
    params : EpiParams
        Model parameters.
    r_int : float
        Interaction radius.
    rand_gen : numpy.random.Generator
        Numpy random generator.

    Returns
    -------
    numpy.ndarray(int), numpy.ndarray(bool)
        New states and mask of infected agents.
    """
    cat = model.source_category(xi, zeta).astype(np.int64)
    counts = nbf.count_sources_within(np.ascontiguousarray(pos, dtype=float),
                                      model.susceptible(xi), cat,
                                      model.n_source_cat, float(r_int))
    return model.infect(xi, zeta, counts, params, 1., rand_gen)


def norm_interaction_step(pop, env, params, wp, rand_gen):
    """Apply the distance based interaction to a list of agents.

    Parameters
    ----------
    pop : list(SpatialAgent)
        Agents, the list index is the agent id.
    env : ContinuousEnv
        The environment (positions are assumed inside).
    params : EpiParams
        Model parameters.
    wp : WalkParams
        Walk parameters, only r_int is read.
    rand_gen : numpy.random.Generator
        Numpy random generator.

    Returns
    -------
    list(SpatialAgent)
        Agents after the contacts, infected agents have theta = 0.
    """
    if len(pop) == 0:
        return []
    model = init_model(params.model)
    pos = np.array([a.pos for a in pop], dtype=float)
    if not np.all(env.contains(pos)):
        warnings.warn('Some agents are outside the environment', UserWarning)
    xi = np.array([a.epi.xi for a in pop], dtype=np.int64)
    zeta = np.array([a.epi.zeta for a in pop], dtype=np.int64)
    new_xi, changed = norm_infection(model, pos, xi, zeta, params, wp.r_int, rand_gen)
    return [replace(a, epi=replace(a.epi, xi=int(x), theta=0)) if c else a
            for a, x, c in zip(pop, new_xi, changed)]
