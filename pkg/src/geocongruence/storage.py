"""On-disk network layout: one directory per network.

``edges.txt``       two 0-based node ids per line, i < j
``coords.csv``      node_id, r, theta, community
``communities.csv`` node_id, community
``geodesics.csv``   dense hyperbolic distance matrix (optional)

Every file starts with ``#`` comment lines carrying the generating config.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import DataError
from .generator import GeneratedNetwork, NpsoParams
from .geometry import GeodesicMatrix, pairwise_distances


def config_header(config: dict) -> str:
    return "# config: " + json.dumps(config, sort_keys=True) + "\n"


def read_config_header(path) -> dict:
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            if line.startswith("# config: "):
                return json.loads(line[len("# config: "):])
    return {}


def save_network(net: GeneratedNetwork, out_dir, geodesics: bool = True, extra: dict | None = None) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = {"params": net.params.as_dict() if net.params else None, "n_nodes": net.n_nodes,
              "n_edges": net.n_edges, **(extra or {})}
    header = config_header(config)
    with open(out / "edges.txt", "w") as fh:
        fh.write(header)
        for i, j in net.edges():
            fh.write(f"{i} {j}\n")
    with open(out / "coords.csv", "w") as fh:
        fh.write(header + "node_id,r,theta,community\n")
        for k, (r, t, c) in enumerate(zip(net.r, net.theta, net.communities)):
            fh.write(f"{k},{float(r)!r},{float(t)!r},{int(c)}\n")
    with open(out / "communities.csv", "w") as fh:
        fh.write(header + "node_id,community\n")
        for k, c in enumerate(net.communities):
            fh.write(f"{k},{int(c)}\n")
    if geodesics:
        with open(out / "geodesics.csv", "w") as fh:
            fh.write(header)
            np.savetxt(fh, net.geodesics.d, delimiter=",", fmt="%.17g")
    return out


def load_network(path) -> GeneratedNetwork:
    """Read a network directory; geodesics are recomputed when the file is absent."""
    path = Path(path)
    try:
        with open(path / "coords.csv", newline="") as fh:
            rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
        table = np.array([[float(row[k]) for k in ("node_id", "r", "theta", "community")]
                          for row in rows]).reshape(-1, 4)
    except OSError as exc:
        raise DataError(f"cannot read {path / 'coords.csv'}: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path / 'coords.csv'}: malformed coordinate table ({exc})") from exc
    n = table.shape[0]
    if n == 0:
        raise DataError(f"{path / 'coords.csv'}: no nodes")
    if not np.array_equal(table[:, 0], np.arange(n)):
        raise DataError("coords.csv node ids must be 0..n-1 in order")
    r, theta, comm = table[:, 1], table[:, 2], table[:, 3].astype(int)

    adjacency = np.zeros((n, n), dtype=bool)
    try:
        edges = np.loadtxt(path / "edges.txt", comments="#", ndmin=2, dtype=int)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read {path / 'edges.txt'}: {exc}") from exc
    if edges.size:
        if edges.shape[1] != 2 or edges.min() < 0 or edges.max() >= n:
            raise DataError("edges.txt must list pairs of valid node ids")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise DataError("edges.txt contains a self-loop")
        adjacency[edges[:, 0], edges[:, 1]] = True
        adjacency[edges[:, 1], edges[:, 0]] = True

    geo_file = path / "geodesics.csv"
    if geo_file.exists():
        d = np.loadtxt(geo_file, delimiter=",", comments="#", ndmin=2)
        if d.shape != (n, n):
            raise DataError(f"geodesics.csv has shape {d.shape}, expected {(n, n)}")
    else:
        d = pairwise_distances(r, theta)

    params = read_config_header(path / "coords.csv").get("params")
    return GeneratedNetwork(adjacency, r, theta, comm, GeodesicMatrix(d),
                            NpsoParams(**params) if params else None)
