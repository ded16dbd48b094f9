"""This module contains usefull function for the simulation."""

import copy
import yaml
import numpy as np


def load_config(config):
    """Load a configuration dict.

    Parameters
    ----------
    config : dict or str
        The configuration / the path of a yaml or json file.

    Returns
    -------
    dict, str
        A deep copy of the configuration and its origin.

    """
    if isinstance(config, dict):
        return copy.deepcopy(config), config.get('yaml_path', 'No config file')
    with open(config, 'r') as f:
        # json is a subset of yaml
        dic = yaml.safe_load(f)
    if not isinstance(dic, dict):
        raise ValueError(f'{config} does not contain a configuration mapping')
    return dic, str(config)


def key_seed(master, partition, case, slot=0):
    """Give the seed sequence of a (master, partition, case, slot) key.

    Parameters
    ----------
    master : int
        Master seed.
    partition : int
        0 for train cases, 1 for test cases, 2 for sensitivity cases,
        3 for single runs.
    case : int
        Case index.
    slot : int
        0 for the case sampling, r + 1 for the replicate r.

    Returns
    -------
    numpy.random.SeedSequence
        The seed, keys have a fixed length so that they never alias.

    """
    return np.random.SeedSequence([int(master), int(partition), int(case), int(slot)])


def key_rng(master, partition, case, slot=0):
    """Give the random generator of a (master, partition, case, slot) key."""
    return np.random.default_rng(key_seed(master, partition, case, slot))


def uniform_in(rng_range, rand_gen, integer=False):
    """Draw one value uniformly in an inclusive range.

    Parameters
    ----------
    rng_range : list
        [low, high].
    rand_gen : numpy.random.Generator
        Numpy random generator.
    integer : bool
        Draw an integer.

    Returns
    -------
    float or int
        The value.

    """
    low, high = rng_range
    if low > high:
        raise ValueError(f'Invalid range {list(rng_range)}')
    if integer:
        return int(rand_gen.integers(int(low), int(high) + 1))
    return float(rand_gen.uniform(low, high))


def mean_std(values):
    """Give mean and standard deviation (ddof = 0) of a list, 0 std for one value."""
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        return np.nan, np.nan
    return float(values.mean()), float(values.std())


def print_dic(dic, prefix=''):
    indent = '    '
    for K in dic:
        if isinstance(dic[K], dict):
            print(prefix + K + ':')
            print_dic(dic[K], prefix=prefix + indent)
        else:
            print(prefix + f'{K}: {dic[K]}')
