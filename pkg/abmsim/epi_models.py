"""This module contains the epidemiological (temporal) models.

Each model gives the compartment ODE right-hand side and the agent level
transition rules: the spontaneous rule (recovery / death when the inner clock
reaches the recovery duration) and the pairwise contact rule (infection).

Agent states are integer codes ``xi`` (and an age group ``zeta`` for the
SEIRD model with two age groups):

    | sir
    | └── 0: S, 1: I, 2: R
    | seird2
    | ├── xi    0: S, 1: I_sym, 2: I_asym, 3: R, 4: D
    | └── zeta  0: child, 1: adult   (compartment column = 2 * xi + zeta)
    | twostrain
    | └── 0: R_0, 1: R_1, 2: R_2, 3: R_12,
    |     4: R_0I_1, 5: R_0I_2, 6: R_1I_2, 7: R_2I_1, 8: D
"""

import abc
from dataclasses import dataclass, replace
import numpy as np
from .constants import MACRO_SUSCEPTIBLE, MACRO_INFECTIOUS, MACRO_REMOVED


__MODEL_DIC__ = {'sir': 'SIRModel',
                 'seird2': 'SEIRD2Model',
                 'twostrain': 'TwoStrainModel'}


@dataclass
class EpiParams:
    """Epidemiological parameters of one case.

    Parameters
    ----------
    model : str
        The model id, one of the keys of ``__MODEL_DIC__``.
    beta : numpy.ndarray(float)
        Infection probability per contact pair per step.

      | sir        scalar
      | seird2     (2, 2, 2) [source symptom (0: sym, 1: asym), target age, source age]
      | twostrain  (4,) [(0, 1), (0, 2), ({1}, 2), ({2}, 1)] (recovered set, strain)
    gamma : numpy.ndarray(int)
        Recovery duration in steps, scalar / per age group / per infected state.
    rho : numpy.ndarray(float)
        Recovery probability (the complement is death), same shape as gamma.
    psi : numpy.ndarray(float), opt
        Probability of the asymptomatic branch per age group (seird2 only).
    """

    model: str
    beta: np.ndarray
    gamma: np.ndarray
    rho: np.ndarray = None
    psi: np.ndarray = None

    def __post_init__(self):
        self.beta = np.asarray(self.beta, dtype=float)
        self.gamma = np.asarray(self.gamma, dtype=np.int64)
        if self.rho is None:
            self.rho = np.ones(self.gamma.shape)
        self.rho = np.asarray(self.rho, dtype=float)
        if self.psi is not None:
            self.psi = np.asarray(self.psi, dtype=float)
        init_model(self.model).check_params(self)

    def to_dict(self):
        """Give a json friendly dict of the parameters."""
        dic = {'model': self.model,
               'beta': self.beta.tolist(),
               'gamma': self.gamma.tolist(),
               'rho': self.rho.tolist()}
        if self.psi is not None:
            dic['psi'] = self.psi.tolist()
        return dic


@dataclass(frozen=True)
class AgentEpi:
    """Epidemiological part of one agent.

    Parameters
    ----------
    xi : int
        State code of the agent.
    theta : int
        Steps since the last state change.
    zeta : int
        Age group (0: child, 1: adult), only read by seird2.
    """

    xi: int
    theta: int = 0
    zeta: int = 0


class BaseEpiModel(abc.ABC):
    """Abstract class for epidemiological models.

    Notes
    -----
    Population level methods work on numpy arrays of states so that the
    simulation engine never loops over agents in python. Single agent
    operations of the module are thin wrappers around them.
    """

    _name = ''
    compartments = []
    n_source_cat = 1

    @property
    def name(self):
        """Get the model id."""
        return self._name

    @property
    def n_compartments(self):
        """Get the number of trajectory columns."""
        return len(self.compartments)

    def column(self, xi, zeta):
        """Give the trajectory column of agents states."""
        return np.asarray(xi)

    def counts(self, xi, zeta):
        """Count agents in each compartment.

        Parameters
        ----------
        xi : numpy.ndarray(int)
            Agents states.
        zeta : numpy.ndarray(int)
            Agents age groups.

        Returns
        -------
        numpy.ndarray(int)
            Count vector ordered as ``compartments``.
        """
        return np.bincount(self.column(xi, zeta), minlength=self.n_compartments)

    @abc.abstractmethod
    def ode_rhs(self, y, params):
        """Return dy/dt on compartment fractions."""
        pass

    @abc.abstractmethod
    def check_params(self, params):
        """Raise ValueError if params do not fit the model."""
        pass

    @abc.abstractmethod
    def sample_params(self, ranges, rand_gen):
        """Draw uniform parameters in ranges {'beta', 'gamma', 'rho', 'psi'}."""
        pass

    @abc.abstractmethod
    def macro_class(self, xi):
        """Map states to the shared macro-classes."""
        pass

    @abc.abstractmethod
    def source_category(self, xi, zeta):
        """Give the source category of infectious agents, -1 otherwise."""
        pass

    @abc.abstractmethod
    def susceptible(self, xi):
        """Mask of agents that at least one source can infect."""
        pass

    @abc.abstractmethod
    def infect(self, xi, zeta, counts, params, p_scale, rand_gen):
        """Apply the contact rule.

        Parameters
        ----------
        xi : numpy.ndarray(int)
            Agents states.
        zeta : numpy.ndarray(int)
            Agents age groups.
        counts : numpy.ndarray(int, size = (N, n_source_cat))
            Number of sources of each category in contact with each agent.
        params : EpiParams
            Model parameters.
        p_scale : float or numpy.ndarray(float)
            Contact probability multiplier (per agent or global).
        rand_gen : numpy.random.Generator
            Numpy random generator.

        Returns
        -------
        numpy.ndarray(int), numpy.ndarray(bool)
            New states and the mask of infected agents.

        Notes
        -----
        Every (susceptible, source) pair is an independent trial, so an agent
        in contact with c sources of infection probability p escapes with
        probability (1 - p)^c. Sources are read from the states before the
        step, newly infected agents do not infect within the same step.
        """
        pass

    @abc.abstractmethod
    def spontaneous(self, xi, zeta, theta, params, rand_gen):
        """Apply recovery / death rules, return new states and changed mask."""
        pass

    def infectious(self, xi):
        """Mask of infectious agents."""
        return self.macro_class(xi) == MACRO_INFECTIOUS

    def dead(self, xi):
        """Mask of dead agents."""
        return np.zeros(np.shape(xi), dtype=bool)

    def initial_states(self, n, n_infected, rand_gen, child_fraction=0.3):
        """Build the initial states of a population.

        Parameters
        ----------
        n : int
            Population size.
        n_infected : int
            Number of initially infected agents (lowest ids).
        rand_gen : numpy.random.Generator
            Numpy random generator (age groups).
        child_fraction : float
            Share of children (seird2 only).

        Returns
        -------
        numpy.ndarray(int), numpy.ndarray(int)
            States and age groups.
        """
        xi = np.zeros(n, dtype=np.int64)
        zeta = np.zeros(n, dtype=np.int64)
        xi[:n_infected] = 1
        return xi, zeta

    def _gamma_of(self, xi, zeta, params):
        """Recovery duration of each agent."""
        return np.broadcast_to(params.gamma, np.shape(xi))

    @staticmethod
    def _check_range(name, arr, low, high):
        arr = np.asarray(arr)
        if np.any(arr < low) or np.any(arr > high):
            raise ValueError(f'{name} must be in [{low}, {high}]')


class SIRModel(BaseEpiModel):
    """SIR model, states S, I, R."""

    _name = 'sir'
    compartments = ['S', 'I', 'R']
    n_source_cat = 1

    def ode_rhs(self, y, params):
        S, I, R = y
        g = 1. / params.gamma
        inf = params.beta * S * I
        return np.array([-inf, inf - g * I, g * I])

    def check_params(self, params):
        if params.beta.shape != () or params.gamma.shape != ():
            raise ValueError('sir beta and gamma must be scalars')
        self._check_range('beta', params.beta, 0, 1)
        if params.gamma < 1:
            raise ValueError('gamma must be >= 1')
        if np.any(params.rho != 1):
            raise ValueError('sir has no death state, rho must be 1')

    def sample_params(self, ranges, rand_gen):
        beta = rand_gen.uniform(*ranges['beta'])
        gamma = rand_gen.integers(ranges['gamma'][0], ranges['gamma'][1] + 1)
        return EpiParams('sir', beta, gamma)

    def macro_class(self, xi):
        return np.asarray(xi, dtype=np.int64)

    def source_category(self, xi, zeta):
        return np.where(np.asarray(xi) == 1, 0, -1)

    def susceptible(self, xi):
        return np.asarray(xi) == 0

    def infect(self, xi, zeta, counts, params, p_scale, rand_gen):
        xi = np.array(xi, dtype=np.int64)
        escape = (1. - params.beta * p_scale)**counts[:, 0]
        u = rand_gen.random(len(xi))
        new_inf = self.susceptible(xi) & (u < 1. - escape)
        xi[new_inf] = 1
        return xi, new_inf

    def spontaneous(self, xi, zeta, theta, params, rand_gen):
        xi = np.array(xi, dtype=np.int64)
        rand_gen.random(len(xi))
        rec = (xi == 1) & (np.asarray(theta) >= params.gamma)
        xi[rec] = 2
        return xi, rec


class SEIRD2Model(BaseEpiModel):
    """SEIRD model with two age groups (child c, adult a).

    Notes
    -----
    ``psi`` is the probability of the asymptomatic branch, as it multiplies
    the asymptomatic equation of the children ODE. The adult equations use
    the same convention.
    """

    _name = 'seird2'
    compartments = ['S_c', 'S_a', 'Is_c', 'Is_a', 'Ia_c', 'Ia_a',
                    'R_c', 'R_a', 'D_c', 'D_a']
    n_source_cat = 4

    def column(self, xi, zeta):
        return 2 * np.asarray(xi) + np.asarray(zeta)

    def ode_rhs(self, y, params):
        S, Is, Ia, R, D = y.reshape(5, 2)
        g = 1. / params.gamma
        # force[i] = sum_j beta[s, i, j] Is[j] + beta[a, i, j] Ia[j]
        force = params.beta[0] @ Is + params.beta[1] @ Ia
        new_inf = force * S
        out = np.empty((5, 2))
        out[0] = -new_inf
        out[1] = (1. - params.psi) * new_inf - g * Is
        out[2] = params.psi * new_inf - g * Ia
        out[3] = g * params.rho * (Is + Ia)
        out[4] = g * (1. - params.rho) * (Is + Ia)
        return out.reshape(-1)

    def check_params(self, params):
        if params.beta.shape != (2, 2, 2):
            raise ValueError('seird2 beta must have shape (2, 2, 2)')
        if params.gamma.shape != (2,) or params.rho.shape != (2,):
            raise ValueError('seird2 gamma and rho must have shape (2,)')
        if params.psi is None or params.psi.shape != (2,):
            raise ValueError('seird2 psi must have shape (2,)')
        self._check_range('beta', params.beta, 0, 1)
        self._check_range('rho', params.rho, 0, 1)
        self._check_range('psi', params.psi, 0, 1)
        if np.any(params.gamma < 1):
            raise ValueError('gamma must be >= 1')

    def sample_params(self, ranges, rand_gen):
        beta = rand_gen.uniform(*ranges['beta'], size=(2, 2, 2))
        gamma = rand_gen.integers(ranges['gamma'][0], ranges['gamma'][1] + 1, size=2)
        rho = rand_gen.uniform(*ranges['rho'], size=2)
        psi = rand_gen.uniform(*ranges['psi'], size=2)
        return EpiParams('seird2', beta, gamma, rho, psi)

    def macro_class(self, xi):
        xi = np.asarray(xi)
        return np.select([xi == 0, (xi == 1) | (xi == 2)],
                         [MACRO_SUSCEPTIBLE, MACRO_INFECTIOUS], MACRO_REMOVED)

    def source_category(self, xi, zeta):
        xi = np.asarray(xi)
        return np.where((xi == 1) | (xi == 2), 2 * (xi - 1) + np.asarray(zeta), -1)

    def susceptible(self, xi):
        return np.asarray(xi) == 0

    def dead(self, xi):
        return np.asarray(xi) == 4

    def initial_states(self, n, n_infected, rand_gen, child_fraction=0.3):
        xi = np.zeros(n, dtype=np.int64)
        zeta = (rand_gen.random(n) >= child_fraction).astype(np.int64)
        xi[:n_infected] = 1
        return xi, zeta

    def _gamma_of(self, xi, zeta, params):
        return params.gamma[np.asarray(zeta)]

    def infect(self, xi, zeta, counts, params, p_scale, rand_gen):
        xi = np.array(xi, dtype=np.int64)
        zeta = np.asarray(zeta)
        # beta_cat[i, c] : infection probability of target i by a source of category c
        beta_cat = params.beta[:, zeta, :].transpose(1, 0, 2).reshape(len(xi), 4)
        p_scale = np.reshape(p_scale, (-1, 1)) if np.ndim(p_scale) else p_scale
        escape = np.prod((1. - beta_cat * p_scale)**counts, axis=1)
        u = rand_gen.random(len(xi))
        u_branch = rand_gen.random(len(xi))
        new_inf = self.susceptible(xi) & (u < 1. - escape)
        asym = u_branch < params.psi[zeta]
        xi[new_inf & asym] = 2
        xi[new_inf & ~asym] = 1
        return xi, new_inf

    def spontaneous(self, xi, zeta, theta, params, rand_gen):
        xi = np.array(xi, dtype=np.int64)
        zeta = np.asarray(zeta)
        u = rand_gen.random(len(xi))
        due = ((xi == 1) | (xi == 2)) & (np.asarray(theta) >= params.gamma[zeta])
        die = due & (xi == 1) & (u >= params.rho[zeta])
        xi[due] = 3
        xi[die] = 4
        return xi, due


class TwoStrainModel(BaseEpiModel):
    """Two-strain SIR model with strain-specific immunity.

    Notes
    -----
    Parameter arrays are indexed by infected state ``xi - 4``:
    (R_0, strain 1), (R_0, strain 2), (R_1, strain 2), (R_2, strain 1).
    An agent reached by both strains in the same step is tested against
    strain 1 first.
    """

    _name = 'twostrain'
    compartments = ['R_0', 'R_1', 'R_2', 'R_12',
                    'R_0I_1', 'R_0I_2', 'R_1I_2', 'R_2I_1', 'D']
    n_source_cat = 2

    # recovered state reached from each infected state
    _recover_to = np.array([1, 2, 3, 3])
    _recovered_sets = [frozenset(), frozenset({1}), frozenset({2}), frozenset({1, 2}),
                       frozenset(), frozenset(), frozenset({1}), frozenset({2})]

    def ode_rhs(self, y, params):
        R0, R1, R2, R12, R0I1, R0I2, R1I2, R2I1, D = y
        b = params.beta
        g = 1. / params.gamma
        rho = params.rho
        lam1 = R0I1 + R2I1
        lam2 = R0I2 + R1I2
        inf = np.array([b[0] * lam1 * R0, b[1] * lam2 * R0,
                        b[2] * lam2 * R1, b[3] * lam1 * R2])
        rec = g * np.array([R0I1, R0I2, R1I2, R2I1])
        return np.array([-inf[0] - inf[1],
                         rho[0] * rec[0] - inf[2],
                         rho[1] * rec[1] - inf[3],
                         rho[2] * rec[2] + rho[3] * rec[3],
                         inf[0] - rec[0],
                         inf[1] - rec[1],
                         inf[2] - rec[2],
                         inf[3] - rec[3],
                         np.sum((1. - rho) * rec)])

    def check_params(self, params):
        for k in ('beta', 'gamma', 'rho'):
            if getattr(params, k).shape != (4,):
                raise ValueError(f'twostrain {k} must have shape (4,)')
        self._check_range('beta', params.beta, 0, 1)
        self._check_range('rho', params.rho, 0, 1)
        if np.any(params.gamma < 1):
            raise ValueError('gamma must be >= 1')

    def sample_params(self, ranges, rand_gen):
        beta = rand_gen.uniform(*ranges['beta'], size=4)
        gamma = rand_gen.integers(ranges['gamma'][0], ranges['gamma'][1] + 1, size=4)
        rho = rand_gen.uniform(*ranges['rho'], size=4)
        return EpiParams('twostrain', beta, gamma, rho)

    def macro_class(self, xi):
        xi = np.asarray(xi)
        return np.select([xi <= 2, (xi >= 4) & (xi <= 7)],
                         [MACRO_SUSCEPTIBLE, MACRO_INFECTIOUS], MACRO_REMOVED)

    def source_category(self, xi, zeta):
        xi = np.asarray(xi)
        return np.select([(xi == 4) | (xi == 7), (xi == 5) | (xi == 6)], [0, 1], -1)

    def susceptible(self, xi):
        return np.asarray(xi) <= 2

    def dead(self, xi):
        return np.asarray(xi) == 8

    def recovered_set(self, xi):
        """Give the set of strains an agent in state xi recovered from."""
        if xi == 8:
            return None
        return self._recovered_sets[xi]

    def initial_states(self, n, n_infected, rand_gen, child_fraction=0.3):
        xi = np.zeros(n, dtype=np.int64)
        zeta = np.zeros(n, dtype=np.int64)
        xi[:n_infected] = 4 + np.arange(n_infected) % 2
        return xi, zeta

    def _gamma_of(self, xi, zeta, params):
        xi = np.asarray(xi)
        gam = np.zeros(xi.shape, dtype=np.int64)
        inf = (xi >= 4) & (xi <= 7)
        gam[inf] = params.gamma[xi[inf] - 4]
        return gam

    def infect(self, xi, zeta, counts, params, p_scale, rand_gen):
        xi = np.array(xi, dtype=np.int64)
        b = params.beta
        # strain 1 reaches R_0 -> R_0I_1 and R_2 -> R_2I_1
        b1 = np.select([xi == 0, xi == 2], [b[0], b[3]], 0.)
        new1 = np.select([xi == 0, xi == 2], [4, 7], -1)
        # strain 2 reaches R_0 -> R_0I_2 and R_1 -> R_1I_2
        b2 = np.select([xi == 0, xi == 1], [b[1], b[2]], 0.)
        new2 = np.select([xi == 0, xi == 1], [5, 6], -1)
        p1 = 1. - (1. - b1 * p_scale)**counts[:, 0]
        p2 = 1. - (1. - b2 * p_scale)**counts[:, 1]
        u1 = rand_gen.random(len(xi))
        u2 = rand_gen.random(len(xi))
        inf1 = (new1 >= 0) & (u1 < p1)
        inf2 = ~inf1 & (new2 >= 0) & (u2 < p2)
        xi[inf1] = new1[inf1]
        xi[inf2] = new2[inf2]
        return xi, inf1 | inf2

    def spontaneous(self, xi, zeta, theta, params, rand_gen):
        xi = np.array(xi, dtype=np.int64)
        u = rand_gen.random(len(xi))
        inf = (xi >= 4) & (xi <= 7)
        due = inf & (np.asarray(theta) >= self._gamma_of(xi, zeta, params))
        idx = xi[due] - 4
        xi[due] = np.where(u[due] < params.rho[idx], self._recover_to[idx], 8)
        return xi, due


def init_model(model):
    """Give the model object of a model id.

    Parameters
    ----------
    model : str or BaseEpiModel
        The model id or an already built model.

    Returns
    -------
    BaseEpiModel
        The epidemiological model.
    """
    if isinstance(model, BaseEpiModel):
        return model
    if model not in __MODEL_DIC__:
        raise ValueError(f'Available models are {list(__MODEL_DIC__)}')
    return globals()[__MODEL_DIC__[model]]()


def ode_rhs(model, y, params):
    """Compute the compartment ODE right-hand side.

    Parameters
    ----------
    model : str or BaseEpiModel
        The model.
    y : numpy.ndarray(float)
        Compartment fractions, ordered as ``model.compartments``.
    params : EpiParams
        Model parameters, gamma is used as the rate 1 / gamma.

    Returns
    -------
    numpy.ndarray(float)
        dy/dt with frequency-dependent transmission.
    """
    model = init_model(model)
    y = np.asarray(y, dtype=float)
    if y.shape != (model.n_compartments,):
        raise ValueError(f'{model.name} state must have {model.n_compartments} entries, '
                         f'got shape {y.shape}')
    return model.ode_rhs(y, params)


def integrate_rk4(model, y0, params, dt, steps):
    """Integrate an ODE with the classical 4th order Runge-Kutta scheme.

    Parameters
    ----------
    model : str, BaseEpiModel or callable
        The epidemiological model, or any function f(y) -> dy/dt.
    y0 : numpy.ndarray(float)
        Initial state.
    params : EpiParams
        Model parameters (ignored for a callable).
    dt : float
        Step size.
    steps : int
        Number of steps.

    Returns
    -------
    numpy.ndarray(float, size = (steps + 1, len(y0)))
        The solution, first row is y0.
    """
    if dt <= 0 or steps < 0:
        raise ValueError('dt must be > 0 and steps >= 0')
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    if callable(model) and not isinstance(model, BaseEpiModel):
        f = model
    else:
        model = init_model(model)
        if abs(y0.sum() - 1.) > 1e-9:
            raise ValueError('y0 must be compartment fractions summing to 1')
        f = lambda y: ode_rhs(model, y, params)

    out = np.empty((steps + 1, len(y0)))
    out[0] = y0
    y = y0
    for i in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6. * (k1 + 2 * k2 + 2 * k3 + k4)
        if np.any(np.isnan(y)) or np.any(y < -1e-9):
            raise RuntimeError(f'RK4 integration failed at step {i + 1}: y = {y}')
        out[i + 1] = y
    return out


def ode_reference(model, y0_counts, params, steps):
    """Integrate the ODE from a count vector and return counts.

    Parameters
    ----------
    model : str or BaseEpiModel
        The model.
    y0_counts : numpy.ndarray(int)
        Initial compartment counts.
    params : EpiParams
        Model parameters.
    steps : int
        Number of simulation steps (dt = 1 step).

    Returns
    -------
    numpy.ndarray(float, size = (steps + 1, m))
        Expected compartment counts, comparable to a Trajectory.
    """
    y0_counts = np.asarray(y0_counts, dtype=float)
    N = y0_counts.sum()
    return integrate_rk4(model, y0_counts / N, params, 1., steps) * N


def fixed_duration_reference(y0_counts, params, steps, dt=1.):
    """Give the mean-field SIR counts of a single well-mixed node.

    Parameters
    ----------
    y0_counts : numpy.ndarray(int)
        Initial counts (S, I, R), initial infected have theta = 0.
    params : EpiParams
        SIR parameters.
    steps : int
        Number of simulation steps.
    dt : float
        Step duration.

    Returns
    -------
    numpy.ndarray(float, size = (steps + 1, 3))
        Expected counts, comparable to a single node graph Trajectory.

    Notes
    -----
    Follows the agent rules step by step: agents infected at step s
    recover at step s + gamma + 1, then every susceptible escapes each of
    the I remaining infectious with probability 1 - beta p, with
    p = 1 - exp(-dt / (N - 1)). Unlike ode_reference the recovery is a
    fixed delay, not a rate.
    """
    if params.model != 'sir':
        raise ValueError('fixed_duration_reference only handles sir')
    S, I, R = np.asarray(y0_counts, dtype=float)
    N = S + I + R
    p = params.beta * (1. - np.exp(-dt / max(N - 1., 1.)))
    delay = int(params.gamma) + 1
    incidence = np.zeros(steps + 1)
    incidence[0] = I
    out = np.empty((steps + 1, 3))
    out[0] = S, I, R
    for t in range(1, steps + 1):
        rec = incidence[t - delay] if t >= delay else 0.
        I -= rec
        new = S * (1. - (1. - p)**I)
        S, I, R = S - new, I + new, R + rec
        incidence[t] = new
        out[t] = S, I, R
    return out


def spontaneous_step(agent, params, rand_gen):
    """Apply the spontaneous rule to one agent.

    Parameters
    ----------
    agent : AgentEpi
        The agent.
    params : EpiParams
        Model parameters.
    rand_gen : numpy.random.Generator
        Numpy random generator.

    Returns
    -------
    AgentEpi
        The agent, with theta = 0 if it changed state.
    """
    model = init_model(params.model)
    xi, changed = model.spontaneous([agent.xi], [agent.zeta], [agent.theta],
                                    params, rand_gen)
    if changed[0]:
        return replace(agent, xi=int(xi[0]), theta=0)
    return agent


def contact_infect(a, b, params, p_scale, rand_gen):
    """Apply the contact rule to a pair of agents.

    Parameters
    ----------
    a, b : AgentEpi
        The two agents in contact.
    params : EpiParams
        Model parameters.
    p_scale : float
        Contact probability multiplier in [0, 1].
    rand_gen : numpy.random.Generator
        Numpy random generator.

    Returns
    -------
    AgentEpi, AgentEpi
        The two agents after the contact.
    """
    if not 0. <= p_scale <= 1.:
        raise ValueError('p_scale must be in [0, 1]')
    model = init_model(params.model)
    xi = np.array([a.xi, b.xi])
    zeta = np.array([a.zeta, b.zeta])
    cat = model.source_category(xi, zeta)
    counts = np.zeros((2, model.n_source_cat), dtype=np.int64)
    if cat[1] >= 0:
        counts[0, cat[1]] = 1
    if cat[0] >= 0:
        counts[1, cat[0]] = 1
    new_xi, changed = model.infect(xi, zeta, counts, params, p_scale, rand_gen)
    out = [replace(ag, xi=int(x), theta=0) if c else ag
           for ag, x, c in zip((a, b), new_xi, changed)]
    return out[0], out[1]


def tick_clock(agent, transitioned=False):
    """Advance the inner clock of one agent.

    Parameters
    ----------
    agent : AgentEpi
        The agent.
    transitioned : bool
        True if the agent changed state during this step.

    Returns
    -------
    AgentEpi
        The agent with theta + 1, unchanged if it transitioned.
    """
    if transitioned:
        return agent
    return replace(agent, theta=agent.theta + 1)
