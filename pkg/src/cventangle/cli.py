"""Command-line interface: ``cventangle {analyze,sweep,summary,reconstruct,circuit}``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .criteria import CRITERIA, SearchConfig, evaluate
from .errors import CVEntanglementError
from .network import RECIPES, load_circuit, recipe, run_circuit
from .partitions import enumerate_partitions, parse_partition
from .reconstruction import aggregate, read_manifest, read_record_csv, reconstruct
from .states import FAMILIES, FAMILY_ALIASES, R_PAPER, StateSpec, db_to_r, reduce
from .symplectic import check_physical, covariance_to_dict, load_covariance, n_modes_of, save_covariance
from .sweep import (
    FORMAT_VERSION,
    build_summary,
    collect_summary,
    fmt,
    load_sweep_spec,
    modes_label,
    parse_modes,
    run_sweep,
    summary_table,
    write_table,
)


def _floats(text: str) -> list:
    return [float(x) for x in text.split(",") if x.strip()]


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _state_args(p):
    p.add_argument("--state", choices=sorted(set(FAMILIES) | set(FAMILY_ALIASES)), help="analytic state family")
    p.add_argument("--cov", help="covariance JSON file instead of --state")
    p.add_argument("--r", type=float, help="squeezing parameter")
    p.add_argument("--db", type=float, help="squeezing level in dB (e.g. -3)")
    p.add_argument("--eta", help="transmission of mode A, or comma-separated per-mode list")
    p.add_argument("--p", type=float, default=1.0, help="vacuum-mixing weight")


def _build_state(args) -> np.ndarray:
    if args.cov:
        return load_covariance(args.cov)
    if not args.state:
        raise CVEntanglementError("give --state or --cov")
    if args.r is not None and args.db is not None:
        raise CVEntanglementError("give either --r or --db")
    data = {"family": args.state, "p": args.p}
    if args.r is not None:
        data["r"] = args.r
    if args.db is not None:
        data["db"] = args.db
    if args.eta:
        etas = _floats(args.eta)
        data["eta"] = etas[0] if len(etas) == 1 else etas
    return StateSpec.from_dict(data).covariance()


def cmd_analyze(args) -> int:
    gamma = _build_state(args)
    n = n_modes_of(gamma)
    modes = parse_modes(args.reduce, n) if args.reduce else tuple(range(n))
    sub = reduce(gamma, modes)
    if args.partitions in (None, "all"):
        parts = [p.relabel(modes) for p in enumerate_partitions(len(modes))]
    else:
        parts = [parse_partition(s) for s in args.partitions.split(",")]
    criteria = args.criteria.split(",") if args.criteria else list(CRITERIA)
    search = SearchConfig(seed=args.seed)
    rows = []
    for p in parts:
        local = p.localize(modes)
        for c in criteria:
            if c == "ppt" and p.n_blocks != 2:
                continue
            res = evaluate(sub, local, c, search)
            d = res.optimal_direction
            rows.append(
                {
                    "reduction": modes_label(modes),
                    "partition": str(p),
                    "criterion": c,
                    "value": res.value,
                    "entangled": bool(res.entangled),
                    "direction": None if d is None else [float(x) for x in d],
                }
            )
    if args.format == "json":
        text = json.dumps({"format": FORMAT_VERSION, "physical_margin": check_physical(gamma).margin, "rows": rows}, indent=1) + "\n"
    else:
        lines = ["reduction,partition,criterion,value,entangled,direction"]
        for r in rows:
            d = "" if r["direction"] is None else " ".join(fmt(x) for x in r["direction"])
            lines.append(f"{r['reduction']},{r['partition']},{r['criterion']},{fmt(r['value'])},{fmt(r['entangled'])},{d}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def cmd_sweep(args) -> int:
    spec = load_sweep_spec(args.spec)
    if args.seed is not None:
        spec = replace(spec, search=replace(spec.search, seed=args.seed))
    if args.workers is not None:
        spec = replace(spec, workers=args.workers)
    fmt_name = args.format or spec.format
    out = args.out or spec.output
    rows = run_sweep(spec)
    text = write_table(rows, None, fmt_name, variable=spec.variable)
    _emit(text, out)
    return 0


def cmd_summary(args) -> int:
    r = db_to_r(args.db) if args.db is not None else (args.r if args.r is not None else R_PAPER)
    etas = np.linspace(0.0, 1.0, args.points)
    data = collect_summary(r=r, etas=etas, search=SearchConfig(seed=args.seed), workers=args.workers)
    rows = build_summary(data)
    _emit(summary_table(rows, args.format), args.out)
    return 0


def cmd_reconstruct(args) -> int:
    paths = list(args.csv)
    if args.manifest:
        paths += read_manifest(args.manifest)
    if not paths:
        raise CVEntanglementError("give measurement CSV files or --manifest")
    recs = [reconstruct(read_record_csv(p, args.n_modes)) for p in paths]
    agg = aggregate(recs)
    report = check_physical(agg.mean)
    payload = covariance_to_dict(agg.mean)
    payload.update({"std": agg.std.tolist(), "n_records": len(recs), "physical": report.physical, "margin": report.margin})
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_circuit(args) -> int:
    params = {"r": args.r} if args.r is not None else {}
    if args.recipe:
        circ = recipe(args.recipe, **params)
    elif args.file:
        circ = load_circuit(args.file, **params)
    else:
        raise CVEntanglementError("give a circuit JSON file or --recipe")
    gamma = run_circuit(circ)
    if args.out:
        save_covariance(args.out, gamma)
    else:
        sys.stdout.write(json.dumps(covariance_to_dict(gamma), indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cventangle", description="Entanglement criteria for Gaussian multi-mode states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="all criteria for one state")
    _state_args(p)
    p.add_argument("--partitions", help="comma-separated partitions like A|BC, or 'all'")
    p.add_argument("--reduce", help="kept modes, e.g. ACD")
    p.add_argument("--criteria", help=f"comma-separated subset of {','.join(CRITERIA)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="run a sweep spec (JSON or TOML)")
    p.add_argument("spec")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("summary", help="verdict table over all partitions and reduced states")
    p.add_argument("--r", type=float)
    p.add_argument("--db", type=float)
    p.add_argument("--points", type=int, default=101, help="loss grid points on [0, 1]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("reconstruct", help="measurement CSVs to covariance JSON")
    p.add_argument("csv", nargs="*")
    p.add_argument("--manifest")
    p.add_argument("--n-modes", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("circuit", help="circuit JSON to covariance JSON")
    p.add_argument("file", nargs="?")
    p.add_argument("--recipe", choices=RECIPES)
    p.add_argument("--r", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_circuit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CVEntanglementError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
