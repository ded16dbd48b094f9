"""Init file of abmsim package.

The abmsim module runs norm-based (continuous-space) agent-based epidemic
simulations, fits a compact graph-based surrogate (graph nodes, edges and a
stochastic walk model) from the recorded trajectories and measures how well
the surrogate preserves the epidemic dynamics.

The package use numpy, numba, pandas and shapely.
"""

import os
__abmsim_dir_path__ = os.path.dirname(__file__)

__version__ = "0.1.0"

from .epi_models import EpiParams, AgentEpi, init_model
from .simu import SimConfig, Population, Trajectory, PositionLog, run_sim, agreement
from .harness import ExperimentSpec, sample_case, run_pipeline, run_benchmark, run_sensitivity
from . import epi_models
from . import norm_space
from . import graph_space
from . import graph_search
from . import walk_approx
from . import harness
from . import utils
from . import io_utils
