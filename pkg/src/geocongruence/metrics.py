"""Geometrical congruence (GC), greedy routing and greedy routing efficiency (GRE)."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

log = logging.getLogger(__name__)


class Reference(str, enum.Enum):
    """Reference distance placed in the numerator of GC and GRE."""

    GEO = "geo"
    GSP = "gsp"


@dataclass
class CongruenceReport:
    gc: float
    reference: Reference
    n_pairs: int
    per_pair_ratios: np.ndarray | None = field(default=None, repr=False)


@dataclass
class GreedyRouteResult:
    source: int
    target: int
    delivered: bool
    hops: list[int]
    pgrp: float
    # "delivered", "backtrack" (dropped by the one-step rule) or "hop_cap"
    outcome: str = "delivered"


@dataclass
class NavigabilityReport:
    gre: float
    reference: Reference
    success_rate: float
    n_pairs: int
    variant: str = "nonadjacent"
    hop_cap_drops: int = 0


def gc(records, reference: Reference | str) -> CongruenceReport:
    """Mean of RD / mean-pTSP over unordered nonadjacent pairs.

    ``records`` is a sequence of :class:`~geocongruence.paths.PairRecord` or a
    :class:`~geocongruence.paths.PairSweep`.
    """
    reference = Reference(reference)
    records = getattr(records, "records", records)
    if len(records) == 0:
        raise DomainError("GC undefined: the network has no nonadjacent pairs")
    rd = np.array([getattr(rec, reference.value) for rec in records], dtype=object)
    if any(v is None for v in rd):
        raise DomainError(f"reference {reference.value!r} missing from pair records")
    ratios = rd.astype(float) / np.array([rec.mean_ptsp for rec in records])
    return CongruenceReport(float(ratios.mean()), reference, len(records), ratios)


def greedy_route(neighbors, distances, source: int, target: int, weights=None,
                 max_hops: int | None = None) -> GreedyRouteResult:
    """Forward a packet hop by hop to the neighbour closest to the destination.

    ``distances[v][target]`` is the latent-space distance used for routing
    decisions; only neighbours of the current node are ever consulted.  The
    packet is dropped as soon as the chosen neighbour is the node it just
    came from, or once ``max_hops`` (default: number of nodes) is exceeded.
    The projection ``pgrp`` sums ``weights`` (default ``distances``) along
    the route, and is ``inf`` on drop.
    """
    if source == target:
        raise DomainError("greedy routing needs distinct source and target")
    if weights is None:
        weights = distances
    if max_hops is None:
        max_hops = len(neighbors)
    hops = [source]
    prev = None
    current = source
    pgrp = 0.0
    while current != target:
        nbrs = neighbors[current]
        if not nbrs:
            return GreedyRouteResult(source, target, False, hops, math.inf, "backtrack")
        # ties go to the lower id: min over (distance, id)
        nxt = min(nbrs, key=lambda v: (distances[v][target], v))
        if nxt == prev:
            return GreedyRouteResult(source, target, False, hops, math.inf, "backtrack")
        if len(hops) > max_hops:
            log.debug("greedy route %d->%d hit the %d-hop cap", source, target, max_hops)
            return GreedyRouteResult(source, target, False, hops, math.inf, "hop_cap")
        pgrp += weights[current][nxt]
        hops.append(nxt)
        prev, current = current, nxt
    return GreedyRouteResult(source, target, True, hops, pgrp)


def route_pairs(neighbors, distances, pairs, weights=None) -> list[GreedyRouteResult]:
    """Greedy routes for an iterable of ordered (source, target) pairs."""
    dist = distances.tolist() if isinstance(distances, np.ndarray) else distances
    if weights is not None and isinstance(weights, np.ndarray):
        weights = weights.tolist()
    nbrs = [sorted(v) for v in neighbors]
    return [greedy_route(nbrs, dist, s, t, weights) for s, t in pairs]


def ordered_nonadjacent_pairs(adjacency):
    adj = np.asarray(adjacency, dtype=bool)
    mask = ~adj
    np.fill_diagonal(mask, False)
    return [tuple(p) for p in np.argwhere(mask).tolist()]


def _navigability(results, reference, denominator, variant, ref_name):
    if denominator <= 0:
        raise DomainError("GRE undefined: no node pairs to evaluate")
    ref = np.asarray(reference, dtype=float)
    total = 0.0
    delivered = 0
    capped = 0
    for res in results:
        if res.delivered:
            delivered += 1
            total += ref[res.source, res.target] / res.pgrp
        elif res.outcome == "hop_cap":
            capped += 1
    if capped:
        log.info("%d greedy routes dropped by the hop cap", capped)
    return NavigabilityReport(float(total / denominator), Reference(ref_name),
                              delivered / denominator, denominator, variant, capped)


def gre(results, reference, n_nodes: int, n_edges: int, ref_name: Reference | str = Reference.GEO) -> NavigabilityReport:
    """GRE over ordered nonadjacent pairs; dropped routes contribute 0.

    ``results`` must hold exactly one route per ordered nonadjacent pair,
    i.e. ``n (n - 1) - 2 e`` of them.
    """
    results = list(results)
    expected = n_nodes * (n_nodes - 1) - 2 * n_edges
    if expected <= 0:
        raise DomainError("GRE undefined: the network has no nonadjacent pairs")
    if len(results) != expected:
        raise ValueError(f"expected {expected} ordered nonadjacent routes, got {len(results)}")
    return _navigability(results, reference, expected, "nonadjacent", ref_name)


def gre_all_pairs(results, reference, n_nodes: int, ref_name: Reference | str = Reference.GEO) -> NavigabilityReport:
    """Original GRE normalisation over all n (n - 1) ordered pairs."""
    if n_nodes < 2:
        raise DomainError("GRE undefined for fewer than two nodes")
    results = list(results)
    expected = n_nodes * (n_nodes - 1)
    if len(results) != expected:
        raise ValueError(f"expected {expected} ordered routes, got {len(results)}")
    return _navigability(results, reference, expected, "all-pairs", ref_name)
