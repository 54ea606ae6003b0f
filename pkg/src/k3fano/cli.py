"""Command line: ``k3fano <subcommand> …``.

Exit codes: 0 when every pinned expectation is met, 2 on a mismatch, 3 when
unsettled graphs remain, 1 on malformed input.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from fractions import Fraction

import yaml

from .graph import ColoredGraph, read_records
from .lattice import IntLattice, LatticeError, PolarizedLattice

EXIT_OK, EXIT_INPUT, EXIT_MISMATCH, EXIT_UNSETTLED = 0, 1, 2, 3

log = logging.getLogger("k3fano")


class InputError(ValueError):
    pass


# ------------------------------------------------------------------ input

def load_config(path: str) -> dict:
    """YAML or JSON (JSON is read by the YAML loader as well)."""
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a mapping at top level")
    return data


def file_hash(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def parse_gram(rows) -> list:
    if not isinstance(rows, list) or not rows:
        raise InputError("gram: expected a non-empty list of rows")
    n = len(rows)
    gram = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise InputError(f"gram row {i}: expected {n} entries")
        try:
            gram.append([int(x) for x in row])
        except (TypeError, ValueError):
            raise InputError(f"gram row {i}: non-integer entry") from None
        if gram[i][i] % 2:
            raise InputError(f"gram row {i}: odd diagonal entry {gram[i][i]} (lattice must be even)")
    for i in range(n):
        for j in range(i):
            if gram[i][j] != gram[j][i]:
                raise InputError(f"gram row {i}: not symmetric at column {j}")
    return gram


def parse_graph(spec) -> ColoredGraph:
    if isinstance(spec, str):
        if os.path.exists(spec):
            recs = read_records(spec)
            if not recs:
                raise InputError(f"{spec}: no graph records")
            return recs[0]
        return ColoredGraph.from_record(spec)
    if isinstance(spec, dict):
        return ColoredGraph.from_record(json.dumps(spec))
    raise InputError("graph: expected a record, a record string or a file name")


def parse_kernel(spec, graph: ColoredGraph | None = None) -> list:
    if spec is None:
        return []
    if isinstance(spec, dict) and "golay" in spec:
        from .golay import build_golay
        ctx = build_golay()
        variant = spec["golay"]
        if variant == "K_fo":
            return ctx.kernel_fo()
        if variant == "K_64":
            return ctx.kernel_64(ctx.S[6][0])
        if variant == "K_256":
            return ctx.kernel_256(ctx.S[8][0])
        if variant == "K_star":
            return ctx.kernel_star(1 << 15)
        raise InputError(f"unknown Golay kernel {variant!r}")
    try:
        return [tuple(Fraction(str(x)) for x in row) for row in spec]
    except (TypeError, ValueError) as exc:
        raise InputError(f"kernel: {exc}") from None


def lattice_input(cfg: dict):
    """Either an explicit polarized lattice (gram, h) or a graph with degree
    and kernel."""
    if "gram" in cfg:
        gram = parse_gram(cfg["gram"])
        h = cfg.get("h")
        if h is None or len(h) != len(gram):
            raise InputError("h: expected one coordinate per gram row")
        return PolarizedLattice(IntLattice(gram), tuple(int(x) for x in h))
    if "graph" in cfg:
        from .fanolattice import build
        g = parse_graph(cfg["graph"])
        kernel = parse_kernel(cfg.get("kernel"), g)
        return build(g, int(cfg.get("degree", 8)), kernel, cfg.get("m_imposed"))
    raise InputError("expected either 'gram' and 'h' or 'graph'")


# ------------------------------------------------------------------ manifests

WORKER_KEYS = {"workers"}


def manifest(subcommand: str, config: dict | None, inputs: list, **fields) -> dict:
    echo = {k: v for k, v in (config or {}).items() if k not in WORKER_KEYS}
    hashes = {p: file_hash(p) for p in inputs if p and os.path.exists(p)}
    digest = hashlib.sha256(json.dumps([subcommand, echo, hashes], sort_keys=True, default=str)
                            .encode()).hexdigest()
    out = {"subcommand": subcommand, "config": echo, "inputs": hashes, "run_hash": digest}
    out.update(fields)
    return out


def write_outputs(out_dir: str | None, man: dict, graphs) -> None:
    graphs = list(graphs)
    man["outputs"] = len(graphs)
    if not out_dir:
        print(json.dumps(man, indent=2, default=str))
        for g in graphs:
            print(g.to_record())
        return
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "outputs.jsonl"), "w") as fh:
        for g in graphs:
            fh.write(g.to_record() + "\n")
    tmp = os.path.join(out_dir, "manifest.json.tmp")
    with open(tmp, "w") as fh:
        json.dump(man, fh, indent=2, default=str)
    os.replace(tmp, os.path.join(out_dir, "manifest.json"))
    print(f"wrote {len(graphs)} records and manifest to {out_dir}")


def _with_aut(g: ColoredGraph) -> ColoredGraph:
    from .canon import canonicalize
    object.__setattr__(g, "aut_order", canonicalize(g).order)
    return g


def _config(args) -> dict:
    if not args.config:
        raise InputError("--config is required for this subcommand")
    return load_config(args.config)


# ------------------------------------------------------------------ subcommands

def cmd_fano(args) -> int:
    from .vinberg import RootSet, compatible_chamber, fano_graph, SeparatingRoot
    cfg = load_config(args.input or args.config)
    lat = lattice_input(cfg)
    extended = bool(cfg.get("extended", args.extended))
    if isinstance(lat, PolarizedLattice):
        roots = RootSet(lat)
        ch = compatible_chamber(lat, [], roots)
        if isinstance(ch, SeparatingRoot):
            raise LatticeError(f"separating root {list(ch.root)}")
        g = fano_graph(lat, ch, extended, roots)
    else:
        res = lat.master(int(cfg.get("m", 3)))
        if not res.ok:
            raise LatticeError(res.report.describe())
        g = res.extended if extended else res.graph
    man = manifest("fano", cfg, [args.input or args.config], vertices=g.n, lines=len(g.lines()))
    write_outputs(args.out, man, [g])
    return EXIT_OK


def cmd_saturate(args) -> int:
    from .fanolattice import saturation_list
    cfg = _config(args)
    g = parse_graph(cfg["graph"])
    degree, m = int(cfg.get("degree", 8)), int(cfg.get("m", 3))
    sats = saturation_list(g, degree, m, parse_kernel(cfg.get("kernel")), m_imposed=cfg.get("m_imposed"))
    rows = [{"lines": s.line_count, "exceptional": s.exceptional_count, "det": s.lattice.lattice.det}
            for s in sats]
    man = manifest("saturate", cfg, [args.config], saturations=rows)
    write_outputs(args.out, man, [_with_aut(s.extended) for s in sats])
    return EXIT_OK


def cmd_kernels(args) -> int:
    from .canon import canonicalize
    from .fanolattice import geometric_kernels
    cfg = _config(args)
    g = parse_graph(cfg["graph"])
    sym = canonicalize(g).generators if cfg.get("symmetry", True) else ()
    ks = geometric_kernels(g, int(cfg.get("degree", 8)), int(cfg.get("m", 3)),
                           parse_kernel(cfg.get("kernel")), sym, cfg.get("m_imposed"))
    rows = [{"order": len(k.group), "det": k.det,
             "kernel": [[str(x) for x in v] for v in k.kernel]} for k in ks]
    man = manifest("kernels", cfg, [args.config], kernels=rows)
    write_outputs(args.out, man, [])
    return EXIT_OK


def _search_fields(cfg: dict) -> dict:
    from .taxonomy import SearchConfig
    known = set(SearchConfig.__dataclass_fields__)
    return {k: v for k, v in cfg.items() if k in known}


def _initial(cfg: dict, base) -> list:
    from .search import PseudoVertex
    spec = cfg.get("initial", {})
    if "supports" in spec:
        kind = spec.get("kind", "line")
        make = PseudoVertex.line if kind == "line" else PseudoVertex.exceptional
        return [make(s) for s in spec["supports"]]
    from .golay import subsets_upto, STAR_LIMIT
    out = []
    for kind in spec.get("kinds", ["line"]):
        limit = int(spec.get("max_support", STAR_LIMIT[kind]))
        make = PseudoVertex.line if kind == "line" else PseudoVertex.exceptional
        for s in subsets_upto(base.graph.n, limit):
            v = make(s)
            if base.admits(v, strict=cfg.get("mode") == "progressive"):
                out.append(v)
    return out


def cmd_extend(args) -> int:
    from .search import BaseData, Extender, Symmetry, symmetry_graph
    from .taxonomy import SearchConfig
    cfg = _config(args)
    sc = SearchConfig.from_dict(_search_fields(cfg))
    g = parse_graph(cfg["graph"]) if "graph" in cfg else ColoredGraph.empty()
    base = BaseData(g, sc.degree, parse_kernel(cfg.get("kernel")), cfg.get("m_imposed"))
    sym = Symmetry(symmetry_graph(g), g) if cfg.get("symmetry", "auto") == "auto" else None
    r_max = sc.r_max if args.level_cap is None else min(sc.r_max or args.level_cap, args.level_cap)
    ext = Extender(base, sym, _initial(cfg, base), m=sc.m,
                   fiber=sc.fiber_type if cfg.get("fiber") else None, mode=sc.mode, r_max=r_max,
                   max_graphs=sc.max_graphs, workers=args.workers,
                   checkpoint=os.path.join(args.out, "checkpoint") if (args.out and args.resume is not False) else None)
    t0 = time.time()
    res = ext.run()
    man = manifest("extend", cfg, [args.config], survivor_counts=res.survivor_counts(),
                   maxlist=len(res.maxlist), plain=len(res.plain), seconds=time.time() - t0,
                   budget_exceeded=res.budget_exceeded)
    graphs = [s.extended for s in res.saturated] if res.saturated else [c.graph for c in res.plain]
    write_outputs(args.out, man, graphs)
    return EXIT_OK


def cmd_sections(args) -> int:
    from .drivers import sections_at_fiber
    from .taxonomy import SearchConfig
    cfg = _config(args)
    sc = SearchConfig.from_dict(_search_fields(cfg))
    t0 = time.time()
    res = sections_at_fiber(sc, workers=args.workers, level_cap=args.level_cap,
                            level0=cfg.get("level0", True))
    man = manifest("sections", cfg, [args.config], survivor_counts=res.survivor_counts(),
                   unsettled=len(res.unsettled), seconds=time.time() - t0,
                   budget_exceeded=[b for _, b in res.budget_exceeded])
    graphs = [s.extended for s in res.saturated] if res.saturated else res.graphs
    write_outputs(args.out, man, graphs)
    return EXIT_UNSETTLED if res.unsettled else EXIT_OK


def cmd_pencils(args) -> int:
    from .drivers import large_pencils
    from .taxonomy import SearchConfig, find_fiber
    cfg = _config(args)
    sc = SearchConfig.from_dict(_search_fields(cfg))
    pencil = parse_graph(cfg["pencil"])
    fiber = cfg.get("fiber_vertices") or find_fiber(pencil, sc.fiber_type)
    if fiber is None:
        raise InputError(f"no {sc.fiber} fiber in the pencil")
    t0 = time.time()
    res = large_pencils(sc, pencil, fiber, workers=args.workers, level_cap=args.level_cap)
    man = manifest("pencils", cfg, [args.config], survivor_counts=res.survivor_counts(),
                   seconds=time.time() - t0, budget_exceeded=[b for _, b in res.budget_exceeded])
    write_outputs(args.out, man, [s.extended for s in res.saturated])
    return EXIT_OK


def _report_run(run, args, config=None) -> int:
    for c in run.checks:
        print(c.line())
    man = manifest(f"reproduce {run.target}", config, [args.config] if args.config else [],
                   checks=[{"name": c.name, "expected": repr(c.expected), "actual": repr(c.actual), "ok": c.ok}
                           for c in run.checks],
                   survivor_counts=run.survivor_counts, seconds=run.seconds,
                   unsettled=len(run.unsettled), verdict="match" if run.ok else "mismatch")
    if args.out:
        write_outputs(args.out, man, run.outputs)
    print(f"{run.target}: {'all expectations met' if run.ok else 'MISMATCH'} ({run.seconds:.1f}s)")
    if not run.ok:
        return EXIT_MISMATCH
    return EXIT_UNSETTLED if run.unsettled else EXIT_OK


def cmd_golay(args) -> int:
    from .targets import run_target
    return _report_run(run_target("golay"), args)


KUMMER_TARGETS = {"K_64": "kummer64", "K_256": "kummer256", "K_star": "almost_kummer", "K_fo": "kummer64"}


def cmd_kummer(args) -> int:
    from .targets import run_target
    kw = {"workers": args.workers}
    if args.variant == "K_star" and args.out:
        kw["checkpoint"] = os.path.join(args.out, "checkpoint")
    return _report_run(run_target(KUMMER_TARGETS[args.variant], **kw), args)


def cmd_reproduce(args) -> int:
    from .targets import run_target
    kw = {"workers": args.workers, "level_cap": args.level_cap}
    if args.out:
        kw["checkpoint"] = os.path.join(args.out, "checkpoint")
    return _report_run(run_target(args.target, **kw), args)


def cmd_report(args) -> int:
    path = args.manifest
    if os.path.isdir(path):
        path = os.path.join(path, "manifest.json")
    with open(path) as fh:
        man = json.load(fh)
    print(f"{man['subcommand']}  run {man['run_hash'][:12]}")
    for key in ("verdict", "seconds", "survivor_counts", "outputs", "unsettled", "budget_exceeded"):
        if key in man:
            print(f"  {key}: {man[key]}")
    for c in man.get("checks", []):
        print(f"  {'PASS' if c['ok'] else 'FAIL'} {c['name']}")
    return EXIT_OK if man.get("verdict", "match") == "match" else EXIT_MISMATCH


# ------------------------------------------------------------------ entry point

def build_parser() -> argparse.ArgumentParser:
    from .targets import TARGETS
    p = argparse.ArgumentParser(prog="k3fano", description="Line configurations on K3 octics.")
    p.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML or JSON configuration")
    common.add_argument("--out", help="output directory (manifest.json, outputs.jsonl)")
    common.add_argument("--resume", action=argparse.BooleanOptionalAction, default=None,
                        help="resume from checkpoints in --out (default: on when --out is given)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--level-cap", type=int, default=None, help="stop after this many levels/steps")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("fano", parents=[common], help="Fano graph of a lattice or graph+kernel")
    s.add_argument("input", nargs="?")
    s.add_argument("--extended", action="store_true")
    s.set_defaults(func=cmd_fano)
    for name, fn, text in (("saturate", cmd_saturate, "saturations over geometric kernels"),
                           ("kernels", cmd_kernels, "geometric kernels of a graph"),
                           ("extend", cmd_extend, "extension algorithm"),
                           ("sections", cmd_sections, "sections at a single fiber"),
                           ("pencils", cmd_pencils, "large pencils"),
                           ("golay", cmd_golay, "Golay code counts")):
        sub.add_parser(name, parents=[common], help=text).set_defaults(func=fn)
    s = sub.add_parser("kummer", parents=[common], help="Kummer pipelines")
    s.add_argument("variant", choices=sorted(KUMMER_TARGETS))
    s.set_defaults(func=cmd_kummer)
    s = sub.add_parser("reproduce", parents=[common], help="pinned reproduction targets")
    s.add_argument("target", choices=sorted(TARGETS))
    s.set_defaults(func=cmd_reproduce)
    s = sub.add_parser("report", help="summarize a run manifest")
    s.add_argument("manifest")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(message)s")
    try:
        return args.func(args)
    except (InputError, LatticeError, yaml.YAMLError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
