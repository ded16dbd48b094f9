"""This module contains all the constants used in the package."""
import re
from pathlib import Path

path_location = Path(__file__).absolute().parent
init_location = path_location / '__init__.py'
VERSION = re.findall(r"__version__ = \"(.*?)\"",
                     init_location.open().read())[0]
ABM_SIM_PRINT = '        _                     _           \n'
ABM_SIM_PRINT += '   __ _| |__  _ __ ___  ___(_)_ __ ___  \n'
ABM_SIM_PRINT += '  / _` | \'_ \\| \'_ ` _ \\/ __| | \'_ ` _ \\ \n'
ABM_SIM_PRINT += ' | (_| | |_) | | | | | \\__ \\ | | | | | |\n'
ABM_SIM_PRINT += '  \\__,_|_.__/|_| |_| |_|___/_|_| |_| |_|\n'
ABM_SIM_PRINT += f'=================== Version : {VERSION} ===== '

SEP = '###############################################'

# Parameter ranges per case (beta per contact-pair per hour step,
# gamma in hour steps, rho and psi probabilities)
PARAM_PRESETS = {
    'synthetic': {'beta': [0.037, 0.1], 'gamma': [120, 240],
                  'rho': [0.9, 0.99], 'psi': [0.05, 0.20]},
    'airport': {'beta': [0.05, 0.1], 'gamma': [144, 170],
                'rho': [0.98, 1.], 'psi': [0.1, 0.15]},
    'restaurant': {'beta': [0.062, 0.079], 'gamma': [144, 170],
                   'rho': [0.98, 1.], 'psi': [0.1, 0.15]},
    'bus': {'beta': [0.048, 0.069], 'gamma': [144, 170],
            'rho': [0.98, 1.], 'psi': [0.1, 0.15]}
    }

# Synthetic circle environments
N_CIRCLES_RANGE = (1, 40)
RADIUS_RANGE = (2., 25.)
ENV_MAX_RETRY = 200

# Pull random walk defaults (meters, steps)
WALK_DEFAULTS = {'speed': 1., 'delta': 10., 'kappa': 1.,
                 'd_min': 0.1, 'r_int': 2.}

# Macro-classes shared by every epidemiological model
MACRO_SUSCEPTIBLE = 0
MACRO_INFECTIOUS = 1
MACRO_REMOVED = 2
N_MACRO = 3

# Neighbour infected-fraction bins of the Markov chain walk model
MC_BINS = (0., 0.1, 0.5, 1.)

# Sensitivity sweeps (desk scale for the population sweep)
SWEEP_RANGES = {'population': (100, 3000),
                'circles': (10, 100),
                'beta': (0.037, 0.37),
                'gamma': (60, 380)}

# Geometry held fixed by the spatial sweeps
SWEEP_ENV = {'population': {'circles': [[0., 0., 50.]]},
             'circles': {'circles': None, 'radius': [2., 2.]}}
