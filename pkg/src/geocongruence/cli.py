"""Command-line front end.

Exit codes: 0 success, 1 data/measurement errors, 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .connectome import write_synthetic_cohort
from .errors import CapExceeded, DataError, DomainError, ParameterError
from .experiments import (
    FIG2_PANELS, GRID_PRESETS, METRICS, GridConfig, default_threads, distribution_summary,
    dump_json, grid_json, run_connectome, run_distribution_compare, run_grid, write_grid_csv,
    write_kde_csv,
)
from .generator import NpsoParams, generate
from .metrics import Reference, gc, gre, gre_all_pairs, ordered_nonadjacent_pairs, route_pairs
from .paths import DEFAULT_PATH_CAP, geodesic_weighted, gsp_lengths, pair_records
from .storage import load_network, save_network

log = logging.getLogger("geocongruence")


def _floats(text):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _cap(text):
    value = int(text)
    return None if value <= 0 else value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geocongruence",
                                     description="Geometrical congruence and greedy navigability of hyperbolic networks")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes (default: $GEOCONGRUENCE_THREADS or CPU count)")
    common.add_argument("--cap", type=_cap, default=DEFAULT_PATH_CAP,
                        help="max topological shortest paths per pair (<= 0 disables)")

    p = sub.add_parser("generate", parents=[common], help="grow one (n)PSO network")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--c", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-geodesics", action="store_true", help="skip the dense geodesics.csv")

    for name, helptext in (("gc", "geometrical congruence of a saved network"),
                           ("gre", "greedy routing efficiency of a saved network")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--network", required=True, help="network directory")
        p.add_argument("--reference", choices=[r.value for r in Reference], default="geo")
        p.add_argument("--out", help="JSON report path (default: stdout)")
        if name == "gc":
            p.add_argument("--pairs-out", help="optional per-pair CSV")
        else:
            p.add_argument("--variant", choices=["nonadjacent", "all-pairs"], default="nonadjacent")

    p = sub.add_parser("grid", parents=[common], help="GC/GRE heatmap sweep")
    p.add_argument("--preset", choices=sorted(GRID_PRESETS))
    p.add_argument("--n", type=int)
    p.add_argument("--dbar", type=_floats)
    p.add_argument("--gamma", type=_floats)
    p.add_argument("--t", type=_floats)
    p.add_argument("--c", type=int)
    p.add_argument("--realizations", type=int)
    p.add_argument("--out", required=True, help="long-form CSV path")
    p.add_argument("--json", help="realization-level JSON path")

    p = sub.add_parser("distributions", parents=[common], help="GEO vs mean-pTSP distributions")
    p.add_argument("--preset", choices=["fig2"])
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--dbar", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--c", type=_floats, default=(0.0, 4.0), help="community counts, comma-separated")
    p.add_argument("--realizations", type=int, default=1)
    p.add_argument("--out", required=True, help="output prefix (writes PREFIX.json and PREFIX_kde.csv)")

    p = sub.add_parser("connectome", parents=[common], help="GC(GSP) group comparison of weighted connectomes")
    p.add_argument("--manifest", help="manifest CSV (subject_id, file, labels...)")
    p.add_argument("--label-key", default="gender")
    p.add_argument("--group-a", help="label value or lo-hi numeric range")
    p.add_argument("--group-b")
    p.add_argument("--out", help="output prefix (writes PREFIX.json and PREFIX.csv)")
    p.add_argument("--make-synthetic", metavar="DIR",
                   help="write the synthetic gamma=2 vs gamma=3 cohort to DIR and exit")
    return parser


def _emit(report: dict, out):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args):
    params = NpsoParams(N=args.n, m=args.m, T=args.t, gamma=args.gamma, C=args.c, seed=args.seed)
    net = generate(params)
    save_network(net, args.out, geodesics=not args.no_geodesics)
    print(f"generated N={net.n_nodes} e={net.n_edges} mean degree={net.degrees().mean():.3f} -> {args.out}")


def cmd_gc(args):
    net = load_network(args.network)
    sweep = pair_records(net, cap=args.cap)
    report = gc(sweep, args.reference)
    _emit({"command": "gc", "network": str(args.network), "reference": report.reference.value,
           "gc": report.gc, "n_pairs": report.n_pairs, "n_nodes": sweep.n_nodes,
           "n_edges": sweep.n_edges, "disconnected_pairs": sweep.disconnected_pairs,
           "cap": args.cap, "params": net.params.as_dict() if net.params else None}, args.out)
    if args.pairs_out:
        with open(args.pairs_out, "w") as fh:
            fh.write("i,j,tsp_len,n_tsp,mean_ptsp,min_ptsp,max_ptsp,gsp,geo\n")
            for r in sweep.records:
                fh.write(f"{r.i},{r.j},{r.tsp_len},{r.n_tsp},{r.mean_ptsp!r},{r.min_ptsp!r},"
                         f"{r.max_ptsp!r},{r.gsp!r},{r.geo!r}\n")


def cmd_gre(args):
    net = load_network(args.network)
    geo = net.geodesics.d
    ref = geo if args.reference == "geo" else gsp_lengths(geodesic_weighted(net.adjacency, geo))
    n = net.n_nodes
    if args.variant == "nonadjacent":
        routes = route_pairs(net.neighbors, geo, ordered_nonadjacent_pairs(net.adjacency))
        report = gre(routes, ref, n, net.n_edges, args.reference)
    else:
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
        report = gre_all_pairs(route_pairs(net.neighbors, geo, pairs), ref, n, args.reference)
    out = asdict(report)
    out["reference"] = report.reference.value
    _emit({"command": "gre", "network": str(args.network),
           "params": net.params.as_dict() if net.params else None, **out}, args.out)


def cmd_grid(args):
    fields = dict(GRID_PRESETS[args.preset]) if args.preset else {}
    for flag, key in (("n", "N"), ("dbar", "dbar_values"), ("gamma", "gamma_values"),
                      ("t", "T_values"), ("c", "C"), ("realizations", "realizations")):
        if getattr(args, flag) is not None:
            fields[key] = getattr(args, flag)
    config = GridConfig(base_seed=args.seed, cap=args.cap, **fields)
    cells = run_grid(config, threads=args.threads)
    header = {"command": "grid", "preset": args.preset, **config.as_dict()}
    write_grid_csv(cells, args.out, header)
    if args.json:
        dump_json(grid_json(cells, header), args.json)
    failed = sum(c.failed for c in cells)
    print(f"{len(cells)} cells ({failed} failed) -> {args.out}")
    for c in cells:
        line = " ".join(f"{k}={c.mean(k):.3f}" for k in METRICS)
        print(f"T={c.T:g} dbar={c.dbar:g} gamma={c.gamma:g}: {line}" + (" FAILED" if c.failed else ""))


def cmd_distributions(args):
    if args.preset == "fig2":
        panels = FIG2_PANELS
    else:
        if None in (args.dbar, args.t, args.gamma):
            raise ParameterError("distributions needs --preset fig2 or all of --dbar, --t, --gamma")
        panels = [("custom", {"dbar": args.dbar, "T": args.t, "gamma": args.gamma})]
    header = {"command": "distributions", "preset": args.preset, "N": args.n, "seed": args.seed,
              "realizations": args.realizations, "C": [int(c) for c in args.c], "cap": args.cap,
              "panels": [[label, cfg] for label, cfg in panels]}
    summaries, curves = [], []
    for label, cfg in panels:
        for C in args.c:
            C = int(C)
            res = run_distribution_compare(args.n, cfg["dbar"], cfg["T"], cfg["gamma"], C,
                                           base_seed=args.seed, realizations=args.realizations,
                                           cap=args.cap)
            tag = f"{label}:dbar={cfg['dbar']:g},T={cfg['T']:g},gamma={cfg['gamma']:g}"
            summaries.append({"panel": tag, "C": C, **distribution_summary(res)})
            curves += [(tag, C, "geo", res.kde_geo), (tag, C, "ptsp", res.kde_ptsp)]
            print(f"{tag} C={C}: Mann-Whitney p={res.mwu.p_value:.3g} "
                  f"dominant TSP length={res.dominant_hop()}")
    dump_json({"config": header, "panels": summaries}, f"{args.out}.json")
    write_kde_csv(curves, f"{args.out}_kde.csv", header)


def cmd_connectome(args):
    if args.make_synthetic:
        manifest = write_synthetic_cohort(args.make_synthetic, base_seed=args.seed)
        print(f"synthetic cohort -> {manifest}")
        return
    if not (args.manifest and args.group_a and args.group_b and args.out):
        raise ParameterError("connectome needs --manifest, --group-a, --group-b and --out")
    comp, results, failures = run_connectome(args.manifest, args.label_key, args.group_a,
                                             args.group_b, cap=args.cap, threads=args.threads)
    header = {"command": "connectome", "manifest": str(args.manifest), "label_key": args.label_key,
              "group_a": args.group_a, "group_b": args.group_b, "cap": args.cap, "seed": args.seed}
    report = {
        "config": header,
        "mann_whitney": asdict(comp.mwu),
        "groups": {
            args.group_a: {"subjects": comp.ids_a, "gc": comp.gc_a, "mean_gc": float(np.mean(comp.gc_a))},
            args.group_b: {"subjects": comp.ids_b, "gc": comp.gc_b, "mean_gc": float(np.mean(comp.gc_b))},
        },
        "kde": {lab: None if k is None else {"x": k.grid, "density": k.density, "bandwidth": k.bandwidth}
                for lab, k in ((args.group_a, comp.kde_a), (args.group_b, comp.kde_b))},
        "subjects": {sid: asdict(r) for sid, r in sorted(results.items())},
        "failures": failures,
    }
    dump_json(report, f"{args.out}.json")
    with open(f"{args.out}.csv", "w") as fh:
        fh.write("# config: " + json.dumps(header, sort_keys=True) + "\n")
        fh.write("subject_id,group,gc,n_nodes,n_used,excluded_pairs\n")
        for label, ids in ((args.group_a, comp.ids_a), (args.group_b, comp.ids_b)):
            for sid in ids:
                r = results[sid]
                fh.write(f"{sid},{label},{r.gc!r},{r.n_nodes},{r.n_used},{r.excluded_pairs}\n")
    print(f"{args.group_a}: mean GC={np.mean(comp.gc_a):.4f} (n={len(comp.gc_a)}); "
          f"{args.group_b}: mean GC={np.mean(comp.gc_b):.4f} (n={len(comp.gc_b)}); "
          f"Mann-Whitney p={comp.mwu.p_value:.3g}")


COMMANDS = {"generate": cmd_generate, "gc": cmd_gc, "gre": cmd_gre, "grid": cmd_grid,
            "distributions": cmd_distributions, "connectome": cmd_connectome}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", None) is None and hasattr(args, "threads"):
        args.threads = default_threads()
    try:
        COMMANDS[args.command](args)
    except ParameterError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (DataError, DomainError, CapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
