"""Weighted connectomes: strength-to-distance reversal and GSP-referenced GC
group comparisons.

Input layout: one square CSV strength matrix per subject (no header) and a
manifest CSV with at least the columns ``subject_id`` and ``file``; every
other column (e.g. ``gender``, ``age``) is a grouping label.  Relative file
paths resolve against the manifest's directory.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, DomainError
from .metrics import Reference, gc
from .paths import DEFAULT_PATH_CAP, WeightedGraph, giant_component, pair_records
from .stats import KdeCurve, MwuResult, kde, mann_whitney

log = logging.getLogger(__name__)

SYMMETRY_RTOL = 1e-9


@dataclass
class SubjectNetwork:
    id: str
    matrix: np.ndarray
    group_labels: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = validate_strengths(self.matrix, self.id)


@dataclass
class SubjectResult:
    id: str
    gc: float
    n_nodes: int
    n_used: int
    excluded_pairs: int


@dataclass
class GroupComparison:
    label_key: str
    label_a: str
    label_b: str
    gc_a: list
    gc_b: list
    ids_a: list
    ids_b: list
    mwu: MwuResult
    kde_a: KdeCurve | None
    kde_b: KdeCurve | None


def validate_strengths(matrix, name="matrix") -> np.ndarray:
    w = np.array(matrix, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DataError(f"{name}: strength matrix must be square, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise DataError(f"{name}: strength matrix has non-finite entries")
    if np.any(w < 0):
        raise DataError(f"{name}: negative connection strength")
    scale = max(float(np.abs(w).max()), 1.0)
    if np.abs(w - w.T).max() > SYMMETRY_RTOL * scale:
        raise DataError(f"{name}: strength matrix is not symmetric")
    w = np.triu(w, 1)
    w = w + w.T
    return w


def reverse_weights(matrix, presence=None) -> WeightedGraph:
    """Turn strengths into distances, ``w* = 1 / (1 + w)``, edge by edge.

    Edges are the nonzero strengths unless an explicit boolean ``presence``
    mask is given, in which case a zero strength on a present edge maps to 1.
    """
    w = np.asarray(matrix, dtype=float)
    if np.any(w < 0):
        raise DataError("negative connection strength")
    adj = (w != 0) if presence is None else np.asarray(presence, dtype=bool).copy()
    np.fill_diagonal(adj, False)
    return WeightedGraph(adj, np.where(adj, 1.0 / (1.0 + w), 0.0))


def analyze_subject(subject: SubjectNetwork, cap: int | None = DEFAULT_PATH_CAP) -> SubjectResult:
    """GC with GSP reference on the reversed-weight graph (giant component if split)."""
    graph = reverse_weights(subject.matrix)
    n = graph.n
    nodes = giant_component(graph.adjacency)
    excluded = 0
    if len(nodes) < n:
        sub_n = len(nodes)
        excluded = n * (n - 1) // 2 - sub_n * (sub_n - 1) // 2
        log.warning("subject %s is disconnected; using the giant component (%d of %d nodes, "
                    "%d pairs excluded)", subject.id, sub_n, n, excluded)
        graph = graph.subgraph(nodes)
    report = gc(pair_records(graph, cap=cap), Reference.GSP)
    return SubjectResult(subject.id, report.gc, n, len(nodes), excluded)


def subject_gc(subject: SubjectNetwork, cap: int | None = DEFAULT_PATH_CAP) -> float:
    return analyze_subject(subject, cap).gc


def _matches(value, wanted: str) -> bool:
    # "lo-hi" selects a closed numeric range, anything else is an exact label
    if value is None:
        return False
    value = str(value).strip()
    if value == wanted:
        return True
    lo, sep, hi = wanted.partition("-")
    if sep and lo and hi:
        try:
            return float(lo) <= float(value) <= float(hi)
        except ValueError:
            return False
    return False


def select_group(subjects, label_key, label):
    if not any(label_key in s.group_labels for s in subjects):
        raise DomainError(f"unknown grouping label {label_key!r}")
    group = [s for s in subjects if _matches(s.group_labels.get(label_key), label)]
    if not group:
        raise DomainError(f"no subjects with {label_key} = {label!r}")
    return group


def group_compare(subjects, label_key: str, label_a: str, label_b: str,
                  gc_values: dict | None = None, grid_size: int = 512) -> GroupComparison:
    """Per-group GC lists, their density curves and a two-sided Mann-Whitney test.

    ``gc_values`` maps subject id to a precomputed GC; missing ones are computed.
    """
    gc_values = dict(gc_values or {})
    group_a = select_group(subjects, label_key, label_a)
    group_b = select_group(subjects, label_key, label_b)
    for s in group_a + group_b:
        if s.id not in gc_values:
            gc_values[s.id] = subject_gc(s)
    a = [gc_values[s.id] for s in group_a]
    b = [gc_values[s.id] for s in group_b]
    return GroupComparison(label_key, label_a, label_b, a, b,
                           [s.id for s in group_a], [s.id for s in group_b],
                           mann_whitney(a, b), _safe_kde(a, grid_size), _safe_kde(b, grid_size))


def _safe_kde(values, grid_size):
    try:
        return kde(values, grid_size)
    except DomainError:
        return None


def read_matrix(path) -> np.ndarray:
    try:
        w = np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read matrix {path}: {exc}") from exc
    return w


def load_manifest(path, skip_missing: bool = True) -> list[SubjectNetwork]:
    """Read a manifest CSV and every subject matrix it lists."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise DataError(f"cannot read manifest {path}: {exc}") from exc
    if not rows or "subject_id" not in rows[0] or "file" not in rows[0]:
        raise DataError(f"{path}: manifest needs subject_id and file columns")
    subjects = []
    for row in rows:
        file = Path(row["file"])
        if not file.is_absolute():
            file = path.parent / file
        if not file.exists():
            if skip_missing:
                log.warning("skipping subject %s: missing file %s", row["subject_id"], file)
                continue
            raise DataError(f"missing matrix file {file}")
        labels = {k: v for k, v in row.items() if k not in ("subject_id", "file")}
        subjects.append(SubjectNetwork(row["subject_id"], read_matrix(file), labels))
    return subjects


def strengths_from_geodesics(adjacency, geodesics) -> np.ndarray:
    """Streamline-like strengths whose reversal is proportional to the geodesics.

    With ``w = d_max / d - 1`` the reversal gives ``w* = d / d_max``; GC is
    scale free, so a synthetic subject keeps the congruence of its source
    network.
    """
    adj = np.asarray(adjacency, dtype=bool)
    d = np.asarray(getattr(geodesics, "d", geodesics), dtype=float)
    dmax = d[adj].max()
    w = np.where(adj, dmax / np.where(adj, d, 1.0) - 1.0, 0.0)
    # the longest edge would get strength 0, i.e. vanish; keep it as a weak edge
    return np.where(adj, np.maximum(w, 1e-6), 0.0)


def write_synthetic_cohort(out_dir, groups=None, N: int = 100, m: int = 6, T: float = 0.1,
                           C: int = 4, per_group: int = 10, base_seed: int = 0) -> Path:
    """Write a cohort of nPSO-derived strength matrices plus a manifest.

    ``groups`` maps a label (stored in the ``group`` column) to a gamma value;
    the default is ``{"gamma2": 2.0, "gamma3": 3.0}``.  Returns the manifest path.
    """
    from .experiments import derive_seed
    from .generator import NpsoParams, generate

    groups = groups or {"gamma2": 2.0, "gamma3": 3.0}
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for label, gamma in groups.items():
        for r in range(per_group):
            seed = derive_seed(base_seed, 2 * m, gamma, T, C, r)
            net = generate(NpsoParams(N=N, m=m, T=T, gamma=gamma, C=C, seed=seed))
            sid = f"{label}_{r:03d}"
            np.savetxt(out / f"{sid}.csv", strengths_from_geodesics(net.adjacency, net.geodesics),
                       delimiter=",", fmt="%.10g")
            rows.append({"subject_id": sid, "file": f"{sid}.csv", "group": label, "gamma": gamma})
    manifest = out / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["subject_id", "file", "group", "gamma"])
        writer.writeheader()
        writer.writerows(rows)
    return manifest
