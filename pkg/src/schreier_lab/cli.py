"""Command-line front end: ``schreier-lab generate|verify|render|experiment``.

Exit codes: 0 ok, 1 verification failed, 2 precondition violated or malformed
input, 3 retries exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .decorators.common import Decoration
from .errors import RetriesExhausted, SchreierLabError, UnsupportedDims
from .lattice import build_archimedean, build_grid_d
from .rng import LabelField

PIPELINES = ("square", "triangular", "kagome", "t3464", "grid_d", "planar", "product", "square_diag")
DEFAULT_KIND = {"square": "square", "triangular": "triangular", "kagome": "kagome", "t3464": "t3464",
                "grid_d": "grid_d", "planar": "square", "product": "C4", "square_diag": "square_diag"}


@dataclass
class RunConfig:
    pipeline: str
    kind: str
    dims: tuple
    topology: str
    k: int | None
    d: int | None
    seed: int
    max_retries: int
    out: Path
    render: Path | None = None
    slice: str | None = None
    dump_hierarchy: Path | None = None


def parse_dims(text: str) -> tuple:
    try:
        dims = tuple(int(x) for x in text.lower().split("x"))
    except ValueError:
        raise UnsupportedDims(f"cannot parse dims {text!r}; expected e.g. 16x16") from None
    if not dims or min(dims) < 1:
        raise UnsupportedDims(f"bad dims {text!r}")
    return dims


def _product_base(kind: str):
    import networkx as nx
    table = {"C4": lambda: nx.cycle_graph(4), "K44": lambda: nx.complete_bipartite_graph(4, 4),
             "octahedron": nx.octahedral_graph}
    if kind not in table:
        raise UnsupportedDims(f"product base must be one of {sorted(table)}")
    return table[kind]()


def run_pipeline(cfg: RunConfig):
    """Build the graph and decorate it; returns ``(graph, decoration)``."""
    field = LabelField(cfg.seed)
    p, kw = cfg.pipeline, {}
    if cfg.k is not None:
        kw["k"] = cfg.k
    if p == "product":
        from .decorators.product import schreier_product
        if len(cfg.dims) != 1:
            raise UnsupportedDims("product takes a single cycle length, e.g. --dims 12")
        return schreier_product(_product_base(cfg.kind), cfg.dims[0], field)
    if p == "grid_d":
        d = cfg.d or len(cfg.dims)
        dims = cfg.dims * d if len(cfg.dims) == 1 else cfg.dims
        g = build_grid_d(d, list(dims), cfg.topology)
    else:
        if len(cfg.dims) != 2:
            raise UnsupportedDims(f"{p} needs two dims, e.g. 16x16")
        g = build_archimedean(cfg.kind, cfg.dims[0], cfg.dims[1], cfg.topology)
    if p == "t3464":
        from .decorators.t3464 import schreier_t3464
        return g, schreier_t3464(g, field, cfg.max_retries)
    if p == "square_diag":
        from .derived import square_diag_decorate
        return g, square_diag_decorate(g, field, max_retries=cfg.max_retries, **kw)
    if p == "planar":
        from .decorators.planar import balanced_orientation_planar
        o = balanced_orientation_planar(g, field, max_retries=cfg.max_retries, **kw)
        dec = Decoration(np.zeros(g.m, dtype=np.int64), o.forward, 1, pipeline="planar",
                         seed=cfg.seed, params=kw, retries=o.retries, rejected=o.rejected,
                         meta=o.meta)
        return g, dec
    from .decorators import grid, kagome, square, triangular
    fn = {"square": square.schreier_square, "triangular": triangular.schreier_triangular,
          "kagome": kagome.schreier_kagome, "grid_d": grid.schreier_grid_d}[p]
    return g, fn(g, field, max_retries=cfg.max_retries, **kw)


def cmd_generate(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    g, dec = run_pipeline(cfg)
    elapsed = time.perf_counter() - t0
    io.save_decoration(cfg.out, g, dec)
    if cfg.dump_hierarchy:
        tree = dec.meta.get("tree")
        if tree is None:
            print("pipeline has no hierarchy to dump", file=sys.stderr)
        else:
            io.write_atomic(cfg.dump_hierarchy, tree.dumps(dec.meta.get("boundary")) + "\n")
    if cfg.render:
        from .render import render_svg
        io.write_atomic(cfg.render, render_svg(g, dec, slice_text=cfg.slice))
    print(f"seed={cfg.seed} retries={dec.retries} time={elapsed:.2f}s out={cfg.out}")
    return 0


def cmd_verify(path) -> int:
    g, dec = io.load_decoration(path)
    rep = io.check(g, dec)
    print(json.dumps(rep.to_dict(), sort_keys=True))
    return 0 if rep.passed else 1


def cmd_render(path, out, slice_text=None) -> int:
    from .render import render_svg
    g, dec = io.load_decoration(path)
    io.write_atomic(out, render_svg(g, dec, slice_text=slice_text))
    print(f"wrote {out}")
    return 0


def cmd_experiment(suite: str) -> int:
    from .experiments import SUITES, run_suite
    if suite not in SUITES and suite != "all":
        print(f"unknown suite {suite!r}; choose from {', '.join(SUITES)} or all", file=sys.stderr)
        return 2
    outcomes = run_suite(suite)
    for o in outcomes:
        print(o.line())
        if o.stats:
            print(f"    {json.dumps(o.stats, sort_keys=True)}")
    return 0 if all(o.passed for o in outcomes) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schreier-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    gen = sub.add_parser("generate", help="decorate a lattice and write JSON")
    gen.add_argument("--pipeline", choices=PIPELINES, required=True)
    gen.add_argument("--kind", help="lattice kind (product: base graph C4, K44 or octahedron)")
    gen.add_argument("--dims", default="16x16", help="side lengths, e.g. 16x16 or 48x48x48")
    gen.add_argument("--topology", choices=("torus", "box"), default="torus")
    gen.add_argument("--k", type=int, help="hierarchy spacing parameter")
    gen.add_argument("--d", type=int, help="dimension for grid_d")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--max-retries", type=int, default=16)
    gen.add_argument("--out", type=Path, default=Path("decoration.json"))
    gen.add_argument("--render", type=Path, help="also write an SVG here")
    gen.add_argument("--slice", help="2D slice for grid_d renders, e.g. z=0")
    gen.add_argument("--dump-hierarchy", type=Path, help="write the cluster hierarchy JSON here")
    ver = sub.add_parser("verify", help="check a decoration file")
    ver.add_argument("file", type=Path)
    ren = sub.add_parser("render", help="draw a decoration file as SVG")
    ren.add_argument("file", type=Path)
    ren.add_argument("--out", type=Path, default=Path("decoration.svg"))
    ren.add_argument("--slice")
    exp = sub.add_parser("experiment", help="run an acceptance suite")
    exp.add_argument("--suite", required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            cfg = RunConfig(args.pipeline, args.kind or DEFAULT_KIND[args.pipeline], parse_dims(args.dims),
                            args.topology, args.k, args.d, args.seed, args.max_retries, args.out,
                            args.render, args.slice, args.dump_hierarchy)
            return cmd_generate(cfg)
        if args.command == "verify":
            return cmd_verify(args.file)
        if args.command == "render":
            return cmd_render(args.file, args.out, args.slice)
        return cmd_experiment(args.suite)
    except RetriesExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SchreierLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _entry():
    sys.exit(main())


if __name__ == "__main__":
    _entry()
