"""Tab-separated output tables and run metadata."""

import json
import os

import numpy as np

from . import __version__


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_table(path, header, rows):
    with open(path, "w") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_fmt(v) for v in row) + "\n")


def write_draws(path, draws):
    """``draws`` has shape (nchains, iters, d); chains and iterations are 1-based."""
    draws = np.asarray(draws, dtype=float)
    if draws.ndim == 2:
        draws = draws[None]
    d = draws.shape[2]
    header = ["chain", "iter"] + ["theta_%d" % (k + 1) for k in range(d)]
    rows = ([c + 1, t + 1, *draws[c, t]]
            for c in range(draws.shape[0]) for t in range(draws.shape[1]))
    write_table(path, header, rows)


def read_draws(path):
    """Inverse of ``write_draws``; returns an (nchains, iters, d) array."""
    with open(path) as fh:
        header = fh.readline().split()
        if header[:2] != ["chain", "iter"] or len(header) < 3:
            raise ValueError("%s: expected header 'chain iter theta_1 ...'" % path)
        data = np.loadtxt(fh, ndmin=2)
    if data.size == 0:
        raise ValueError("%s: draws table has no rows" % path)
    if data.shape[1] != len(header):
        raise ValueError("%s: rows do not match the header" % path)
    chains = np.unique(data[:, 0]).astype(int)
    per_chain = [data[data[:, 0] == c] for c in chains]
    lengths = {len(p) for p in per_chain}
    if len(lengths) != 1:
        raise ValueError("%s: chains have different lengths" % path)
    return np.stack([p[np.argsort(p[:, 1], kind="stable"), 2:] for p in per_chain])


def write_metadata(path, **fields):
    fields = dict(fields, version=__version__)
    with open(path, "w") as fh:
        json.dump(_jsonable(fields), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_metadata(path):
    with open(path) as fh:
        return json.load(fh)


def metadata_beside(draws_path):
    path = os.path.join(os.path.dirname(os.path.abspath(draws_path)), "metadata.json")
    return read_metadata(path) if os.path.exists(path) else None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj
