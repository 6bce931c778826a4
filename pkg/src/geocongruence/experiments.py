"""Seeded experiment protocols: parameter grids, GEO vs mean-pTSP distributions,
and connectome group comparisons.

Every network gets its own seed derived from the experiment's base seed and
the cell coordinates, so results do not depend on how work is scheduled.
"""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import CapExceeded, DomainError, ParameterError
from .generator import NpsoParams, generate
from .metrics import Reference, gc, gre, ordered_nonadjacent_pairs, route_pairs
from .paths import DEFAULT_PATH_CAP, geodesic_weighted, giant_component, gsp_lengths, pair_records
from .stats import kde, mann_whitney

log = logging.getLogger(__name__)

METRICS = ("gc_geo", "gre_geo", "gc_gsp", "gre_gsp")
THREADS_ENV = "GEOCONGRUENCE_THREADS"


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def m_from_dbar(dbar: float) -> int:
    """Half the target mean degree, rounded half up."""
    return int(math.floor(dbar / 2.0 + 0.5))


def derive_seed(base_seed: int, dbar, gamma, T, C, realization) -> int:
    """Stable 64-bit seed for one network of a sweep."""
    key = [int(base_seed), int(round(dbar)), int(round(gamma * 100)), int(round(T * 100)),
           int(C), int(realization)]
    return int(np.random.SeedSequence(key).generate_state(1, dtype=np.uint64)[0])


def parallel_map(func, items, threads: int | None = None):
    """Ordered map over ``items``; runs inline when one worker suffices."""
    items = list(items)
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ProcessPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(func, items))


# ---------------------------------------------------------------------------
# single network


@dataclass
class NetworkEvaluation:
    gc_geo: float
    gre_geo: float
    gc_gsp: float
    gre_gsp: float
    success_rate: float
    n_nodes: int
    n_edges: int
    n_pairs: int
    disconnected: bool = False
    hop_cap_drops: int = 0
    mean_tsp_len: float = float("nan")
    axiom_violations: int = 0

    def metrics(self) -> dict:
        return {k: getattr(self, k) for k in METRICS}


def evaluate_network(network, cap: int | None = DEFAULT_PATH_CAP, check_axioms: bool = False) -> NetworkEvaluation:
    """All four congruence/navigability measures of a generated network.

    A disconnected network is reduced to its giant component first.  With
    ``check_axioms`` breaches of the metric axioms are counted into
    ``axiom_violations``.
    """
    adj = network.adjacency
    geo = network.geodesics.d
    nodes = giant_component(adj)
    disconnected = len(nodes) < adj.shape[0]
    if disconnected:
        log.warning("network is disconnected; evaluating the giant component (%d of %d nodes)",
                    len(nodes), adj.shape[0])
        adj = adj[np.ix_(nodes, nodes)]
        geo = geo[np.ix_(nodes, nodes)]
    n = adj.shape[0]
    graph = geodesic_weighted(adj, geo)
    sweep = pair_records(graph, geodesics=geo, cap=cap)
    gc_geo = gc(sweep, Reference.GEO)
    gc_gsp = gc(sweep, Reference.GSP)

    gsp = gsp_lengths(graph)
    neighbors = graph.neighbors()
    routes = route_pairs(neighbors, geo, ordered_nonadjacent_pairs(adj))
    gre_geo = gre(routes, geo, n, graph.n_edges, Reference.GEO)
    gre_gsp = gre(routes, gsp, n, graph.n_edges, Reference.GSP)

    violations = count_axiom_violations(sweep, (gc_geo, gc_gsp), (gre_geo, gre_gsp)) if check_axioms else 0

    return NetworkEvaluation(
        gc_geo=gc_geo.gc, gre_geo=gre_geo.gre, gc_gsp=gc_gsp.gc, gre_gsp=gre_gsp.gre,
        success_rate=gre_geo.success_rate, n_nodes=n, n_edges=graph.n_edges,
        n_pairs=gc_geo.n_pairs, disconnected=disconnected, hop_cap_drops=gre_geo.hop_cap_drops,
        mean_tsp_len=float(np.mean([rec.tsp_len for rec in sweep.records])),
        axiom_violations=violations,
    )


def count_axiom_violations(sweep, congruence_reports, navigability_reports, tol: float = 1e-9) -> int:
    """Count breaches of geo <= gsp <= mean pTSP <= max pTSP, GC/GRE in [0, 1]
    and GRE <= success rate."""
    bad = 0
    for rec in sweep.records:
        bad += not (rec.geo is None or rec.geo <= rec.gsp + tol)
        bad += not (rec.gsp <= rec.mean_ptsp + tol)
        bad += not (rec.min_ptsp - tol <= rec.mean_ptsp <= rec.max_ptsp + tol)
    for rep in congruence_reports:
        bad += not (0.0 <= rep.gc <= 1.0 + tol)
        if rep.reference is Reference.GEO and rep.per_pair_ratios is not None:
            bad += int(np.count_nonzero(rep.per_pair_ratios > 1.0 + tol))
    for rep in navigability_reports:
        bad += not (0.0 <= rep.gre <= 1.0 + tol)
        bad += not (rep.gre <= rep.success_rate + tol)
    return bad



# ---------------------------------------------------------------------------
# parameter grid


@dataclass
class GridConfig:
    """Axes of a (dbar x gamma x T) sweep at fixed N and C."""

    N: int = 100
    dbar_values: tuple = (4, 8, 12, 16, 20)
    gamma_values: tuple = (2.0, 2.25, 2.5, 2.75, 3.0)
    T_values: tuple = (0.1,)
    C: int = 4
    realizations: int = 10
    base_seed: int = 0
    cap: int | None = DEFAULT_PATH_CAP
    check_axioms: bool = False

    def __post_init__(self):
        for name in ("dbar_values", "gamma_values", "T_values"):
            values = tuple(getattr(self, name))
            if not values:
                raise ParameterError(f"{name} must be nonempty")
            setattr(self, name, values)
        if self.realizations < 1:
            raise ParameterError("realizations must be >= 1")

    def cells(self):
        """Cell coordinates (T, dbar, gamma) in output order."""
        return [(T, d, g) for T in self.T_values for d in self.dbar_values for g in self.gamma_values]

    def as_dict(self) -> dict:
        out = asdict(self)
        for k in ("dbar_values", "gamma_values", "T_values"):
            out[k] = list(out[k])
        return out


@dataclass
class HeatmapCell:
    N: int
    C: int
    T: float
    dbar: float
    gamma: float
    m: int
    values: dict = field(default_factory=dict)
    seeds: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    disconnected: int = 0
    axiom_violations: int = 0

    @property
    def failed(self) -> bool:
        return not any(self.values.get(k) for k in METRICS)

    def mean(self, metric: str) -> float:
        vals = self.values.get(metric) or []
        return float(np.mean(vals)) if vals else float("nan")

    def std(self, metric: str) -> float:
        vals = self.values.get(metric) or []
        return float(np.std(vals)) if vals else float("nan")


def _grid_task(task):
    N, C, T, dbar, gamma, r, seed, cap, check = task
    try:
        params = NpsoParams(N=N, m=m_from_dbar(dbar), T=T, gamma=gamma, C=C, seed=seed)
        ev = evaluate_network(generate(params), cap=cap, check_axioms=check)
    except (DomainError, CapExceeded, ParameterError) as exc:
        return {"error": str(exc)}
    return {"metrics": ev.metrics(), "disconnected": ev.disconnected,
            "mean_tsp_len": ev.mean_tsp_len, "axiom_violations": ev.axiom_violations}


def run_grid(config: GridConfig, threads: int | None = None) -> list[HeatmapCell]:
    """Generate and evaluate ``realizations`` networks per grid cell."""
    tasks = []
    for T, dbar, gamma in config.cells():
        for r in range(config.realizations):
            seed = derive_seed(config.base_seed, dbar, gamma, T, config.C, r)
            tasks.append((config.N, config.C, T, dbar, gamma, r, seed, config.cap, config.check_axioms))
    results = parallel_map(_grid_task, tasks, threads)

    cells = []
    it = iter(zip(tasks, results))
    for T, dbar, gamma in config.cells():
        cell = HeatmapCell(N=config.N, C=config.C, T=T, dbar=dbar, gamma=gamma, m=m_from_dbar(dbar),
                           values={k: [] for k in METRICS + ("mean_tsp_len",)})
        for _ in range(config.realizations):
            task, res = next(it)
            cell.seeds.append(task[6])
            if "error" in res:
                cell.errors.append(res["error"])
                continue
            for k, v in res["metrics"].items():
                cell.values[k].append(v)
            cell.values["mean_tsp_len"].append(res["mean_tsp_len"])
            cell.disconnected += int(res["disconnected"])
            cell.axiom_violations += res["axiom_violations"]
        cells.append(cell)
    return cells


# ---------------------------------------------------------------------------
# GEO vs mean-pTSP distributions


@dataclass
class DistributionComparison:
    params: list
    geo: np.ndarray
    ptsp: np.ndarray
    tsp_len: np.ndarray
    kde_geo: object
    kde_ptsp: object
    mwu: object
    hop_groups: dict

    def dominant_hop(self) -> int:
        return max(self.hop_groups, key=lambda L: self.hop_groups[L]["count"])


def run_distribution_compare(N: int, dbar: float, T: float, gamma: float, C: int,
                             base_seed: int = 0, realizations: int = 1,
                             cap: int | None = DEFAULT_PATH_CAP, grid_size: int = 512) -> DistributionComparison:
    """Pool GEO and mean-pTSP over nonadjacent pairs and compare the two distributions."""
    geo, ptsp, lens, used = [], [], [], []
    for r in range(realizations):
        params = NpsoParams(N=N, m=m_from_dbar(dbar), T=T, gamma=gamma, C=C,
                            seed=derive_seed(base_seed, dbar, gamma, T, C, r))
        net = generate(params)
        nodes = giant_component(net.adjacency)
        adj = net.adjacency[np.ix_(nodes, nodes)]
        d = net.geodesics.d[np.ix_(nodes, nodes)]
        sweep = pair_records(geodesic_weighted(adj, d), geodesics=d, cap=cap)
        geo += [rec.geo for rec in sweep.records]
        ptsp += [rec.mean_ptsp for rec in sweep.records]
        lens += [rec.tsp_len for rec in sweep.records]
        used.append(params.as_dict())
    geo, ptsp, lens = np.array(geo), np.array(ptsp), np.array(lens)
    if geo.size < 2:
        raise DomainError("too few nonadjacent pairs for a distribution comparison")
    kde_ptsp = kde(ptsp, grid_size)
    peaks = kde_ptsp.peaks()
    groups = {}
    for L in np.unique(lens):
        vals = ptsp[lens == L]
        median = float(np.median(vals))
        # the density peak closest to this hop class's median projection
        peak = float(peaks[np.argmin(np.abs(peaks - median))]) if peaks.size else median
        groups[int(L)] = {"count": int(vals.size), "fraction": float(vals.size / lens.size),
                          "median_ptsp": median, "peak": peak}
    return DistributionComparison(used, geo, ptsp, lens, kde(geo, grid_size), kde_ptsp,
                                  mann_whitney(geo, ptsp), groups)


FIG2_PANELS = (
    [("a", {"dbar": d, "T": 0.5, "gamma": 2.5}) for d in (4, 12, 20)]
    + [("b", {"dbar": 12, "T": 0.5, "gamma": g}) for g in (2.0, 2.5, 3.0)]
    + [("c", {"dbar": 12, "T": t, "gamma": 2.5}) for t in (0.1, 0.5, 0.9)]
)


# ---------------------------------------------------------------------------
# connectome cohort


def _subject_task(args):
    from .connectome import analyze_subject
    subject, cap = args
    try:
        return analyze_subject(subject, cap)
    except (DomainError, CapExceeded) as exc:
        return str(exc)


def run_connectome(manifest, label_key: str, label_a: str, label_b: str,
                   cap: int | None = DEFAULT_PATH_CAP, threads: int | None = None):
    """Load a cohort, compute every subject's GC(GSP) and compare two groups.

    Returns ``(comparison, subject_results, failures)``.
    """
    from .connectome import group_compare, load_manifest, select_group

    subjects = load_manifest(manifest)
    selected = {s.id: s for s in select_group(subjects, label_key, label_a)}
    selected.update({s.id: s for s in select_group(subjects, label_key, label_b)})
    chosen = [s for s in subjects if s.id in selected]
    outcomes = parallel_map(_subject_task, [(s, cap) for s in chosen], threads)
    results, failures = {}, {}
    for s, out in zip(chosen, outcomes):
        if isinstance(out, str):
            log.warning("subject %s failed: %s", s.id, out)
            failures[s.id] = out
        else:
            results[s.id] = out
    ok = [s for s in chosen if s.id in results]
    comparison = group_compare(ok, label_key, label_a, label_b,
                               gc_values={k: v.gc for k, v in results.items()})
    return comparison, results, failures


# ---------------------------------------------------------------------------
# report writers (stable formatting so reruns are byte-identical)


def _num(x) -> str:
    return repr(float(x))


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serialisable: {type(obj)}")


def dump_json(data, path) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, default=_json_default, allow_nan=True)
        fh.write("\n")


def write_grid_csv(cells, path, config: dict) -> None:
    """Long-form table, one row per cell and metric."""
    with open(path, "w") as fh:
        fh.write("# config: " + json.dumps(config, sort_keys=True, default=_json_default) + "\n")
        fh.write("N,C,T,dbar,m,gamma,metric,mean,std,n_ok,n_failed,n_disconnected,error\n")
        for c in cells:
            err = c.errors[0].replace(",", ";") if c.errors else ""
            for k in METRICS:
                vals = c.values.get(k) or []
                fh.write(f"{c.N},{c.C},{_num(c.T)},{_num(c.dbar)},{c.m},{_num(c.gamma)},{k},"
                         f"{_num(c.mean(k))},{_num(c.std(k))},{len(vals)},{len(c.errors)},"
                         f"{c.disconnected},{err}\n")


def grid_json(cells, config: dict) -> dict:
    return {
        "config": config,
        "cells": [
            {"N": c.N, "C": c.C, "T": c.T, "dbar": c.dbar, "m": c.m, "gamma": c.gamma,
             "seeds": c.seeds, "errors": c.errors, "n_disconnected": c.disconnected,
             "mean": {k: c.mean(k) for k in METRICS}, "std": {k: c.std(k) for k in METRICS},
             "realizations": c.values}
            for c in cells
        ],
    }


def distribution_summary(result: DistributionComparison) -> dict:
    return {
        "networks": result.params,
        "n_pairs": int(result.geo.size),
        "mann_whitney": asdict(result.mwu),
        "congruence_rejected": bool(result.mwu.p_value < 0.05),
        "geo_mean": float(result.geo.mean()),
        "ptsp_mean": float(result.ptsp.mean()),
        "ptsp_peaks": result.kde_ptsp.peaks().tolist(),
        "hop_groups": {str(k): v for k, v in result.hop_groups.items()},
        "dominant_hop": result.dominant_hop(),
        "bandwidth": {"geo": result.kde_geo.bandwidth, "ptsp": result.kde_ptsp.bandwidth},
    }


def write_kde_csv(rows, path, config: dict) -> None:
    """``rows`` are (panel label, C, series name, KdeCurve)."""
    with open(path, "w") as fh:
        fh.write("# config: " + json.dumps(config, sort_keys=True, default=_json_default) + "\n")
        fh.write("panel,C,series,x,density\n")
        for panel, C, series, curve in rows:
            for x, y in zip(curve.grid, curve.density):
                fh.write(f"{panel},{C},{series},{_num(x)},{_num(y)}\n")


GRID_PRESETS = {
    "fig3": dict(N=100, T_values=(0.1,), C=4),
    "suppl1": dict(N=100, T_values=(0.1, 0.3, 0.5), C=0),
    "suppl2": dict(N=100, T_values=(0.1, 0.3, 0.5), C=4),
    "suppl3": dict(N=1000, T_values=(0.1, 0.3, 0.5), C=0),
    "suppl4": dict(N=1000, T_values=(0.1, 0.3, 0.5), C=4),
}
