"""This module contains io stuff."""

import os
import json
import pandas as pd
import numpy as np


class NpEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        elif isinstance(obj, np.floating):
            return float(obj)
        elif isinstance(obj, np.bool_):
            return bool(obj)
        elif isinstance(obj, np.ndarray):
            return obj.tolist()
        elif isinstance(obj, (set, frozenset, tuple)):
            return sorted(obj) if isinstance(obj, (set, frozenset)) else list(obj)
        else:
            return super(NpEncoder, self).default(obj)


def read_frame(file_path):
    """Read a csv file with exact float round trip.

    Parameters
    ----------
    file_path : str
        Path of the file.

    Returns
    -------
    pandas.DataFrame
        The table.

    """
    return pd.read_csv(file_path, float_precision='round_trip')


def write_frame(df, file_path):
    """Write a pandas.DataFrame as csv without index."""
    df.to_csv(file_path, index=False)


def write_json(dic, file_path):
    """Write a dict with numpy content as json."""
    with open(file_path, 'w') as f:
        json.dump(dic, f, cls=NpEncoder, indent=2)


def read_json(file_path):
    """Read a json file."""
    with open(file_path, 'r') as f:
        return json.load(f)


def write_graph(graph, directory, prefix=''):
    """Write graph nodes and edges csv files.

    Parameters
    ----------
    graph : SpatialGraph
        The graph.
    directory : str
        Destination directory.
    prefix : str
        Files prefix.

    Returns
    -------
    str, str
        Paths of the nodes and edges files.

    """
    os.makedirs(directory, exist_ok=True)
    nodes_path = os.path.join(directory, prefix + 'nodes.csv')
    edges_path = os.path.join(directory, prefix + 'edges.csv')
    write_frame(graph.nodes_frame(), nodes_path)
    write_frame(graph.edges_frame(), edges_path)
    return nodes_path, edges_path


def read_graph(directory, prefix=''):
    """Read graph nodes and edges csv files written by write_graph."""
    from .graph_space import SpatialGraph
    return SpatialGraph.from_frames(read_frame(os.path.join(directory, prefix + 'nodes.csv')),
                                    read_frame(os.path.join(directory, prefix + 'edges.csv')))


def write_results(rows, file_path):
    """Write a results table.

    Parameters
    ----------
    rows : list(dict)
        Records with keys method, metric, mean, std, n.
    file_path : str
        Destination file.

    Returns
    -------
    pandas.DataFrame
        The written table.

    """
    df = pd.DataFrame(rows, columns=['method', 'metric', 'mean', 'std', 'n'])
    write_frame(df, file_path)
    return df


def write_manifest(directory, config, seeds, command, version):
    """Write the provenance file manifest.json of a run."""
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, 'manifest.json')
    write_json({'command': command,
                'version': version,
                'seeds': seeds,
                'config': config}, path)
    return path


def write_timings(timings, directory):
    """Write the stage timings of a run (stage, case, seconds)."""
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, 'timings.csv')
    write_frame(pd.DataFrame(timings, columns=['stage', 'case', 'seconds']), path)
    return path
