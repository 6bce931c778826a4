"""Growth of PSO (C = 0) and nPSO (C >= 1) hyperbolic random graphs.

Construction, for node t = 1..N (1-based birth time):

* the newcomer appears at radius ``2 ln t`` with an angle drawn up front
  (uniform for C = 0, Gaussian mixture otherwise);
* every older node s has faded to ``beta * 2 ln s + (1 - beta) * 2 ln t``
  with ``beta = 1 / (gamma - 1)``;
* the newcomer links to all older nodes while there are at most m of them.
  Otherwise, at T = 0 it links to the m hyperbolically closest (ties to the
  lower id); at T > 0 it draws m distinct targets without replacement with
  weights ``1 / (1 + exp((x - R_t) / (2T)))``, x being the hyperbolic
  distance to the newcomer.

Weighted sampling without replacement uses the Gumbel-top-k construction,
which is distributionally identical to sequential draws proportional to the
remaining weights and stays exact when weights underflow.

Random stream order: all N angles first (component choices, then Gaussian
offsets, or N uniforms for C = 0), then one Gumbel vector per node in birth
order for nodes that sample targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ParameterError
from .geometry import (
    TWO_PI, GeodesicMatrix, PolarPoint, angular_separation, distances_to, pairwise_distances, reduce_angle,
)


@dataclass(frozen=True)
class NpsoParams:
    """Parameters of the (n)PSO model.

    Parameters
    ----------
    N : int
        Number of nodes.
    m : int
        Links formed by each newcomer; mean degree is about ``2 m`` when sparse.
    T : float
        Temperature in [0, 1); higher values weaken clustering.
    gamma : float
        Target power-law exponent of the degree distribution (>= 2).
    C : int
        Number of Gaussian angular components; 0 gives uniform angles.
    seed : int
        Seed of the PCG64 stream.
    """

    N: int
    m: int
    T: float
    gamma: float
    C: int = 0
    seed: int = 0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ParameterError(f"N must be an integer >= 2, got {self.N}")
        if int(self.m) != self.m or self.m < 1:
            raise ParameterError(f"m must be an integer >= 1, got {self.m}")
        if self.m >= self.N:
            raise ParameterError(f"m must be smaller than N (m={self.m}, N={self.N})")
        if not 0.0 <= self.T < 1.0:
            raise ParameterError(f"temperature must lie in [0, 1), got {self.T}")
        if not self.gamma >= 2.0:
            raise ParameterError(f"gamma must be >= 2, got {self.gamma}")
        if int(self.C) != self.C or self.C < 0:
            raise ParameterError(f"C must be a nonnegative integer, got {self.C}")

    @property
    def beta(self) -> float:
        return 1.0 / (self.gamma - 1.0)

    def as_dict(self) -> dict:
        return {"N": int(self.N), "m": int(self.m), "T": float(self.T),
                "gamma": float(self.gamma), "C": int(self.C), "seed": int(self.seed)}


@dataclass(frozen=True, eq=False)
class GeneratedNetwork:
    """Simple undirected graph with its hyperbolic embedding.

    ``adjacency`` is a symmetric boolean matrix without self-loops, ``r`` and
    ``theta`` the final (faded) coordinates and ``geodesics`` the pairwise
    hyperbolic distances between them.
    """

    adjacency: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    communities: np.ndarray
    geodesics: GeodesicMatrix
    params: NpsoParams | None = field(default=None)

    @property
    def n_nodes(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency, 1)))

    @property
    def coords(self) -> list[PolarPoint]:
        return [PolarPoint(r, t) for r, t in zip(self.r, self.theta)]

    @cached_property
    def neighbors(self) -> list[list[int]]:
        return [np.flatnonzero(row).tolist() for row in self.adjacency]

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def edges(self) -> np.ndarray:
        """(e, 2) array of edges i < j in lexicographic order."""
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return np.column_stack([i, j])


def mixture_components(C: int) -> tuple[np.ndarray, np.ndarray]:
    """Means and standard deviations of the angular Gaussian mixture."""
    if C < 1:
        raise ParameterError("mixture components need C >= 1")
    means = TWO_PI / C * np.arange(C)
    sigmas = np.full(C, TWO_PI / C / 6.0)
    return means, sigmas


def nearest_component(theta, means) -> np.ndarray:
    """Index of the mixture mean closest in angle to each theta (ties -> lower index)."""
    sep = angular_separation(np.asarray(theta, dtype=float)[:, None], np.asarray(means)[None, :])
    return np.argmin(np.atleast_2d(sep), axis=1)


def sample_angles(params: NpsoParams, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw N angular coordinates and community labels."""
    N, C = params.N, params.C
    if C == 0:
        return rng.uniform(0.0, TWO_PI, size=N), np.zeros(N, dtype=int)
    means, sigmas = mixture_components(C)
    comp = rng.integers(0, C, size=N)
    theta = reduce_angle(rng.normal(means[comp], sigmas[comp]))
    return theta, nearest_component(theta, means)


def _connection_radius(t: int, params: NpsoParams) -> float:
    """Cutoff R_t of the Fermi-Dirac connection probability for node t."""
    T, m, beta = params.T, params.m, params.beta
    lnt = math.log(t)
    r_t = 2.0 * lnt
    if beta == 1.0:
        return r_t - 2.0 * math.log(2.0 * T * lnt / (math.sin(T * math.pi) * m))
    num = 2.0 * T * (1.0 - math.exp(-(1.0 - beta) * lnt))
    return r_t - 2.0 * math.log(num / (math.sin(T * math.pi) * m * (1.0 - beta)))


def generate(params: NpsoParams) -> GeneratedNetwork:
    """Grow one network; deterministic for a fixed ``params.seed``."""
    N, m, T, beta = params.N, params.m, params.T, params.beta
    rng = np.random.Generator(np.random.PCG64(params.seed))
    theta, labels = sample_angles(params, rng)

    birth_r = 2.0 * np.log(np.arange(1, N + 1, dtype=float))
    adjacency = np.zeros((N, N), dtype=bool)
    for i in range(1, N):
        t = i + 1
        if i <= m:
            targets = np.arange(i)
        else:
            r_old = beta * birth_r[:i] + (1.0 - beta) * birth_r[i]
            x = distances_to(r_old, theta[:i], birth_r[i], theta[i])
            if T == 0:
                targets = np.argsort(x, kind="stable")[:m]
            else:
                z = (x - _connection_radius(t, params)) / (2.0 * T)
                keys = -np.logaddexp(0.0, z) + rng.gumbel(size=i)
                targets = np.argsort(-keys, kind="stable")[:m]
        adjacency[i, targets] = True
        adjacency[targets, i] = True

    r_final = beta * birth_r + (1.0 - beta) * birth_r[-1]
    return GeneratedNetwork(
        adjacency=adjacency,
        r=r_final,
        theta=theta,
        communities=labels,
        geodesics=GeodesicMatrix(pairwise_distances(r_final, theta)),
        params=params,
    )
