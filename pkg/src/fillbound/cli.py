"""Batch command-line surface: check, fill, hf1, gen, bounds.

Exit codes: 0 success, 1 validation failure, 2 infeasible input,
3 resource cap hit (best-effort output still written).  All randomness
sits behind one 64-bit seed that is printed in every report.
FILLBOUND_THREADS caps parallelism of corpus builds.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .bounds import BoundParams, bound_calculator, log2_add, log2_value
from .complexes import is_cycle, mass
from .corpus import ACCEPTANCE_SUITE, GENERATORS, build_instance
from .homology import DEFAULT_NODE_BUDGET, ResourceCapError, hf1_estimate
from .pipeline import (PipelineError, full_fill, neck_thickness_and_diameter)
from .serialize import (ParseError, chain_from_dict, load_instance,
                        save_instance, write_json_atomic, _load)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INFEASIBLE = 2
EXIT_RESOURCE = 3


@dataclass
class RunConfig:
    command: str
    inputs: List[str]
    seed: int = 0
    budget: int = DEFAULT_NODE_BUDGET
    out: Optional[str] = None
    fmt: str = "json"
    extra: Dict = field(default_factory=dict)

    def validate(self):
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        for p in self.inputs:
            if not os.path.exists(p):
                raise ValueError(f"input path does not exist: {p}")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("FILLBOUND_THREADS", "1")))
    except ValueError:
        return 1


# -- check --------------------------------------------------------------------


def cmd_check(cfg: RunConfig) -> int:
    try:
        inst = load_instance(cfg.inputs[0])
    except ParseError as exc:
        print(f"parse error: {exc}")
        return EXIT_VALIDATION
    items = []
    try:
        inst.complex.validate()
        items.append(("complex-valid", True, ""))
    except Exception as exc:
        items.append(("complex-valid", False, str(exc)))
    for it in inst.tree.validate():
        items.append((it.name, it.ok, it.detail))
    for neck in inst.tree.necks:
        try:
            thick, diam = neck_thickness_and_diameter(neck, inst.tree)
            items.append((f"neck-geometry:{neck}", True,
                          f"thick={thick:.4g} diam={diam:.4g}"))
        except Exception as exc:
            items.append((f"neck-geometry:{neck}", False, str(exc)))
    width = max(len(n) for n, _, _ in items)
    ok_all = True
    for name, ok, detail in items:
        status = "ok" if ok else "FAIL"
        print(f"{name:<{width}}  {status:<4}  {detail}")
        ok_all &= ok
    if cfg.out:
        write_json_atomic(os.path.join(cfg.out, "check.json"),
                          {"instance": inst.name, "seed": cfg.seed,
                           "items": [{"name": n, "ok": o, "detail": d}
                                     for n, o, d in items]})
    return EXIT_OK if ok_all else EXIT_VALIDATION


# -- fill ----------------------------------------------------------------------


def cmd_fill(cfg: RunConfig) -> int:
    try:
        inst = load_instance(cfg.inputs[0])
        cycle_d = _load(cfg.inputs[1])
        z = chain_from_dict(cycle_d, inst.complex, cfg.inputs[1])
    except ParseError as exc:
        print(f"parse error: {exc}")
        return EXIT_VALIDATION
    if z.degree != 1 or not is_cycle(z):
        print("input chain is not a 1-cycle")
        return EXIT_INFEASIBLE
    outdir = cfg.out or "."
    try:
        report = full_fill(z, inst.tree)
    except ValueError as exc:
        print(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    except ResourceCapError as exc:
        print(f"resource cap: {exc}")
        return EXIT_RESOURCE
    except PipelineError as exc:
        print(f"pipeline error: {exc}")
        for t in exc.trace:
            print(" trace:", json.dumps(t)[:200])
        return EXIT_VALIDATION
    payload = report.to_json_dict()
    payload["seed"] = cfg.seed
    payload["instance"] = inst.name
    write_json_atomic(os.path.join(outdir, "report.json"), payload)
    rhs = log2_add(report.f1_log2 + log2_value(report.input_mass)
                   if report.input_mass > 0 else -math.inf,
                   report.f2_log2)
    print(f"instance       {inst.name}")
    print(f"seed           {cfg.seed}")
    print(f"input 1-mass   {report.input_mass:.6g}")
    print(f"filling 2-mass {report.mass:.6g}")
    print(f"bound check    log2(mass)={log2_value(report.mass):.4g} <= "
          f"log2(f1*m+f2)={rhs:.4g}  [{'ok' if report.bound_ok else 'FAIL'}]")
    print(f"{'body':<8}{'branch':<12}{'piece mass':<14}{'fill mass':<14}")
    for t in report.branch_trace:
        print(f"{t['body']:<8}{t['branch']:<12}"
              f"{t['piece_mass']:<14.6g}{t.get('fill_mass', 0.0):<14.6g}")
    return EXIT_OK if report.bound_ok else EXIT_VALIDATION


# -- hf1 -------------------------------------------------------------------


def _svg_curve(points, bound_line, path: str):
    """Tiny hand-rolled SVG: estimate curve plus a log2-scale inset for the
    astronomically large bound line."""
    W, H, pad = 640, 400, 48
    xs = [p[0] for p in points] or [1.0]
    ys = [p[1] for p in points] or [1.0]
    xmax = max(xs) * 1.05 or 1.0
    ymax = max(ys) * 1.15 or 1.0

    def X(x):
        return pad + (W - 2 * pad) * x / xmax

    def Y(y):
        return H - pad - (H - 2 * pad) * y / ymax

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" '
             f'height="{H}" viewBox="0 0 {W} {H}">',
             f'<rect width="{W}" height="{H}" fill="white"/>',
             f'<line x1="{pad}" y1="{H-pad}" x2="{W-pad}" y2="{H-pad}" '
             f'stroke="black"/>',
             f'<line x1="{pad}" y1="{H-pad}" x2="{pad}" y2="{pad}" '
             f'stroke="black"/>',
             f'<text x="{W//2}" y="{H-10}" font-size="12" '
             f'text-anchor="middle">cycle 1-mass budget l</text>',
             f'<text x="14" y="{H//2}" font-size="12" '
             f'transform="rotate(-90 14 {H//2})" text-anchor="middle">'
             f'HF1 estimate</text>']
    if points:
        pts = " ".join(f"{X(x):.1f},{Y(y):.1f}" for x, y in points)
        parts.append(f'<polyline points="{pts}" fill="none" '
                     f'stroke="#1f77b4" stroke-width="2"/>')
        for x, y in points:
            parts.append(f'<circle cx="{X(x):.1f}" cy="{Y(y):.1f}" r="2.5" '
                         f'fill="#1f77b4"/>')
    # log2-scale inset: the f1*l+f2 line dwarfs any estimate
    ix, iy, iw, ih = W - 250, 56, 200, 120
    parts.append(f'<rect x="{ix}" y="{iy}" width="{iw}" height="{ih}" '
                 f'fill="#f8f8f8" stroke="#999"/>')
    parts.append(f'<text x="{ix+6}" y="{iy+16}" font-size="11">log2 scale: '
                 f'bound vs estimate</text>')
    if points and bound_line:
        bl_max = max(b for _, b in bound_line)
        est_log = [log2_value(y) if y > 0 else 0.0 for _, y in points]
        top = max(bl_max, max(est_log, default=1.0), 1.0)

        def IY(v):
            return iy + ih - 12 - (ih - 34) * max(v, 0.0) / top

        def IX(x):
            return ix + 8 + (iw - 16) * x / xmax

        bpts = " ".join(f"{IX(x):.1f},{IY(b):.1f}" for x, b in bound_line)
        parts.append(f'<polyline points="{bpts}" fill="none" '
                     f'stroke="#d62728" stroke-width="1.5"/>')
        epts = " ".join(f"{IX(x):.1f},{IY(v):.1f}"
                        for (x, _), v in zip(points, est_log))
        parts.append(f'<polyline points="{epts}" fill="none" '
                     f'stroke="#1f77b4" stroke-width="1.5"/>')
        parts.append(f'<text x="{ix+6}" y="{iy+ih-2}" font-size="10" '
                     f'fill="#d62728">f1*l+f2 (log2 = {bl_max:.3g})</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))


def cmd_hf1(cfg: RunConfig) -> int:
    try:
        inst = load_instance(cfg.inputs[0])
    except ParseError as exc:
        print(f"parse error: {exc}")
        return EXIT_VALIDATION
    l_max = cfg.extra["l_max"]
    steps = cfg.extra["steps"]
    samples = cfg.extra["samples"]
    try:
        pairs = hf1_estimate(inst.complex, l_max, samples, cfg.seed,
                             node_budget=cfg.budget)
    except ValueError as exc:
        print(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    table = bound_calculator(inst.params)
    grid = [l_max * (i + 1) / steps for i in range(steps)]
    points = []
    bound_line = []
    for l in grid:
        est = max((fm for m1, fm in pairs if m1 <= l), default=0.0)
        points.append((l, est))
        bound_line.append((l, log2_add(table.f1_log2 + log2_value(l),
                                       table.f2_log2)))
    outdir = cfg.out or "."
    os.makedirs(outdir, exist_ok=True)
    csv_path = os.path.join(outdir, "hf1.csv")
    with open(csv_path, "w") as fh:
        fh.write("l,estimate\n")
        for l, est in points:
            fh.write(f"{l!r},{est!r}\n")
    _svg_curve(points, bound_line, os.path.join(outdir, "hf1.svg"))
    print(f"instance {inst.name}  seed {cfg.seed}  samples {len(pairs)}")
    for l, est in points:
        print(f"l={l:<12.6g} estimate={est:.6g}")
    print(f"wrote {csv_path} and hf1.svg")
    return EXIT_OK


# -- gen and bounds ----------------------------------------------------------


def _parse_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def cmd_gen(cfg: RunConfig) -> int:
    name = cfg.extra["generator"]
    outdir = cfg.out or name.replace(":", "_")
    if name == "suite":
        jobs = []
        for gname, kwargs in ACCEPTANCE_SUITE:
            tag = "_".join(f"{k}{v}" for k, v in sorted(kwargs.items()))
            jobs.append((gname, kwargs, os.path.join(outdir,
                                                     f"{gname}_{tag}")))

        def build(job):
            gname, kwargs, path = job
            inst = build_instance(gname, seed=cfg.seed, **kwargs)
            save_instance(inst, path)
            return inst.name, path

        with ThreadPoolExecutor(max_workers=_threads()) as pool:
            for iname, path in pool.map(build, jobs):
                print(f"generated {iname} -> {path}")
        return EXIT_OK
    if name not in GENERATORS:
        print(f"unknown generator {name!r}; choose from "
              f"{sorted(GENERATORS)} or 'suite'")
        return EXIT_VALIDATION
    params = {k: _parse_value(v) for k, v in
              (kv.split("=", 1) for kv in cfg.extra.get("params", []))}
    inst = build_instance(name, seed=cfg.seed, **params)
    save_instance(inst, outdir)
    print(f"generated {inst.name} -> {outdir}  (seed {cfg.seed})")
    return EXIT_OK


def cmd_bounds(cfg: RunConfig) -> int:
    try:
        params = BoundParams.from_json_dict(_load(cfg.inputs[0]))
    except (ParseError, ValueError, KeyError) as exc:
        print(f"parse error: {exc}")
        return EXIT_VALIDATION
    table = bound_calculator(params)
    rows = [("g1", table.g1_log2), ("g2", table.g2_log2),
            ("f1", table.f1_log2), ("f2", table.f2_log2),
            ("F", table.F_log2), ("area", table.area_log2)]
    if cfg.fmt == "csv":
        print("quantity,log2,exact")
        for name, lg in rows:
            exact = table.exact[name] if table.exact else ""
            print(f"{name},{lg!r},{exact}")
    else:
        payload = table.to_json_dict()
        payload["params"] = params.to_json_dict()
        if cfg.out:
            write_json_atomic(os.path.join(cfg.out, "bounds.json"), payload)
        print(f"{'quantity':<10}{'log2':<24}exact (N <= 3 only)")
        for name, lg in rows:
            exact = str(table.exact[name]) if table.exact else "-"
            if len(exact) > 40:
                exact = exact[:37] + "..."
            print(f"{name:<10}{lg:<24.10g}{exact}")
    return EXIT_OK


# -- entry -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fillbound",
        description="homological fillings of 1-cycles in weighted "
                    "simplicial complexes")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
        p.add_argument("--out", default=None)
        p.add_argument("--format", dest="fmt", choices=["json", "csv"],
                       default="json")

    p = sub.add_parser("check", help="validate an instance directory")
    p.add_argument("instance")
    common(p)

    p = sub.add_parser("fill", help="fill a 1-cycle through the pipeline")
    p.add_argument("instance")
    p.add_argument("cycle")
    common(p)

    p = sub.add_parser("hf1", help="sampled HF_1 estimate with CSV + SVG")
    p.add_argument("instance")
    p.add_argument("--l-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--samples", type=int, default=30)
    common(p)

    p = sub.add_parser("gen", help="emit a corpus instance directory")
    p.add_argument("generator",
                   help="generator name or 'suite' for the full corpus")
    p.add_argument("--param", action="append", default=[],
                   metavar="KEY=VALUE")
    common(p)

    p = sub.add_parser("bounds", help="constant table from a params file")
    p.add_argument("params")
    common(p)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    inputs = []
    extra: Dict = {}
    if args.command == "check":
        inputs = [args.instance]
    elif args.command == "fill":
        inputs = [args.instance, args.cycle]
    elif args.command == "hf1":
        inputs = [args.instance]
        extra = {"l_max": args.l_max, "steps": args.steps,
                 "samples": args.samples}
    elif args.command == "gen":
        extra = {"generator": args.generator, "params": args.param}
    elif args.command == "bounds":
        inputs = [args.params]
    cfg = RunConfig(args.command, inputs, seed=args.seed, budget=args.budget,
                    out=args.out, fmt=args.fmt, extra=extra)
    try:
        cfg.validate()
    except ValueError as exc:
        print(f"bad invocation: {exc}")
        return EXIT_VALIDATION
    handler = {"check": cmd_check, "fill": cmd_fill, "hf1": cmd_hf1,
               "gen": cmd_gen, "bounds": cmd_bounds}[args.command]
    return handler(cfg)


if __name__ == "__main__":
    sys.exit(main())
