"""Command-line entry point: ``cubetti {compute,gen,lut,bench}``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from dataclasses import dataclass

import numpy as np

from ._lut import LUT
from .codes import VertexClass
from .grid import SHAPE_KINDS, GridParseError, ShapeSpec, generate, load_grid, save_grid
from .morse import ForbiddenVertexError, MorseResult, PassMismatchError, analyze, betti, dual_sweep, sweep
from .preprocess import preprocess
from .oracle import (
    OracleSizeError,
    betti_bruteforce,
    format_table,
    generate_classification_table,
    reference_discrepancies,
)

log = logging.getLogger("cubetti")


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str | None = None
    oracle: bool = False
    dump_critical: str | None = None
    no_preprocess: bool = False
    kind: str | None = None
    size: tuple[int, ...] = ()
    seed: int = 0
    density: float = 0.5
    sizes: tuple[int, ...] = (32, 64, 128)
    repeat: int = 3


def format_report(result: MorseResult) -> str:
    r = result.report
    return (f"{r.b0} {r.b1} {r.b2} {r.chi}\n"
            f"critical: c0={r.dim_c0} c1={r.dim_c1} c2={r.dim_c2} monkey={r.n_monkey}\n")


def critical_rows(result: MorseResult):
    """Rows ``(x, y, z, class, is_double, pass)`` for both sweeps, all in the
    preprocessed frame. h-pass classes are the classes seen by that sweep."""
    sw, du = result.sweep, result.dual
    pts0, pts1 = sw.critical_points()
    for p in pts0 + pts1:
        yield (*p.vertex, p.cls.label, int(p.is_double), "f")
    yield (*du.p0, VertexClass.INDEX0.label, 0, "h")
    for v in du.c2.tolist():
        yield (*v, VertexClass.INDEX0.label, 0, "h")
    monkey = set(map(tuple, du.c1[du.c1_double].tolist()))
    for v, d in zip(du.c1.tolist(), du.c1_double.tolist()):
        cls = VertexClass.MONKEY if tuple(v) in monkey else VertexClass.INDEX1
        yield (*v, cls.label, int(d), "h")


def write_critical_csv(result: MorseResult, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["x", "y", "z", "class", "is_double", "pass"])
    w.writerows(critical_rows(result))


def cmd_compute(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    if cfg.input in (None, "-"):
        grid = load_grid(sys.stdin)
    else:
        with open(cfg.input, encoding="utf-8") as fh:
            grid = load_grid(fh)
    result = analyze(grid, unstack=not cfg.no_preprocess)
    out.write(format_report(result))
    status = 0
    if cfg.oracle:
        o = betti_bruteforce(result.body)
        ok = (o.b0, o.b1, o.b2) == result.report.betti
        out.write(f"oracle: {'match' if ok else 'MISMATCH'}\n")
        if not ok:
            log.error("oracle gives %s", (o.b0, o.b1, o.b2))
            status = 1
    if cfg.dump_critical:
        with open(cfg.dump_critical, "w", encoding="utf-8", newline="") as fh:
            write_critical_csv(result, fh)
    return status


def cmd_gen(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    spec = ShapeSpec(cfg.kind, cfg.size, cfg.density, cfg.seed)
    out.write(save_grid(generate(spec)))
    return 0


def cmd_lut(out=None, embedded: bytes = LUT) -> int:
    """Regenerate the table, print it, and diff it against ``embedded`` and the
    orbit of the published critical-point list."""
    out = out or sys.stdout
    fresh = generate_classification_table(check=False)
    out.write(format_table(fresh))
    status = 0
    for code in range(256):
        if fresh[code] != embedded[code]:
            shipped = VertexClass(embedded[code]).label if embedded[code] in VertexClass._value2member_map_ \
                else str(embedded[code])
            print(f"lut: 0x{code:02X} embedded={shipped} regenerated={VertexClass(fresh[code]).label}",
                  file=sys.stderr)
            status = 1
    for code in reference_discrepancies(fresh):
        print(f"lut: 0x{code:02X} disagrees with the reference critical-point list", file=sys.stderr)
        status = 1
    return status


def fit_slope(n, t) -> float:
    return float(np.polyfit(np.log(n), np.log(t), 1)[0])


def bench_rows(sizes, density=0.5, seed=0, repeat=3):
    """Yield ``(n, n_c, t_construct, t_rank)`` per requested side length.

    ``n`` counts the cubes of the preprocessed grid; the input is a random body of
    side ``round(side / 3)``. Construction covers preprocessing, both sweeps and
    packing the two boundary matrices (best of ``repeat``); rank is timed once.
    """
    warm = generate(ShapeSpec("random", (4, 4, 4), density, seed))
    analyze(warm)  # compile / load cached kernels outside the timed region
    for side in sizes:
        m = max(1, round(side / 3))
        grid = generate(ShapeSpec("random", (m, m, m), density, seed))
        t_construct = float("inf")
        for _ in range(repeat):
            t = time.perf_counter()
            body, _ = preprocess(grid)
            sw = sweep(body)
            du = dual_sweep(body)
            d1, d2 = sw.d1, du.d2
            t_construct = min(t_construct, time.perf_counter() - t)
        t = time.perf_counter()
        betti(sw, du)
        t_rank = time.perf_counter() - t
        n_c = len(sw.c0) + len(sw.c1) + du.c2_dim + 1
        yield int(np.prod(body.dims)), n_c, t_construct, t_rank


def cmd_bench(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "n_c", "t_construct", "t_rank"])
    ns, ts = [], []
    for n, n_c, tc, tr in bench_rows(cfg.sizes, cfg.density, cfg.seed, cfg.repeat):
        w.writerow([n, n_c, f"{tc:.6f}", f"{tr:.6f}"])
        out.flush()
        ns.append(n)
        ts.append(tc)
    if len(ns) >= 2:
        out.write(f"slope: {fit_slope(ns, ts):.3f}\n")
    return 0


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubetti", description="Betti numbers of voxel bodies by a Morse sweep.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="Betti numbers of a voxel file")
    c.add_argument("input", help="voxel file, or - for stdin")
    c.add_argument("--oracle", action="store_true", help="cross-check with full cubical homology")
    c.add_argument("--dump-critical", metavar="PATH", help="write critical points as CSV")
    c.add_argument("--no-preprocess", action="store_true",
                   help="skip unstacking; the input must already have only face contacts")

    g = sub.add_parser("gen", help="write a generated shape to stdout")
    g.add_argument("kind", choices=SHAPE_KINDS)
    g.add_argument("--size", type=_int_list, default=(), help="kind-specific sizes, e.g. 8,8,8")
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--seed", type=int, default=0)

    sub.add_parser("lut", help="regenerate and verify the vertex classification table")

    b = sub.add_parser("bench", help="time the pipeline on random bodies")
    b.add_argument("--sizes", type=_int_list, default=(32, 64, 128),
                   help="side lengths of the preprocessed grid (default 32,64,128)")
    b.add_argument("--density", type=float, default=0.5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeat", type=int, default=3, help="construction timings keep the best of N runs")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = RunConfig(
        command=args.command,
        input=getattr(args, "input", None),
        oracle=getattr(args, "oracle", False),
        dump_critical=getattr(args, "dump_critical", None),
        no_preprocess=getattr(args, "no_preprocess", False),
        kind=getattr(args, "kind", None),
        size=getattr(args, "size", ()),
        seed=getattr(args, "seed", 0),
        density=getattr(args, "density", 0.5),
        sizes=getattr(args, "sizes", (32, 64, 128)),
        repeat=getattr(args, "repeat", 3),
    )
    try:
        if cfg.command == "compute":
            return cmd_compute(cfg)
        if cfg.command == "gen":
            return cmd_gen(cfg)
        if cfg.command == "lut":
            return cmd_lut()
        return cmd_bench(cfg)
    except (GridParseError, ForbiddenVertexError, PassMismatchError, OracleSizeError,
            ValueError, OSError) as exc:
        print(f"cubetti: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
