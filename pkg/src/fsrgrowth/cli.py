"""Command-line front end.

Exit codes: 0 success, 1 domain error (invalid rule, parse error, budget),
2 usage error. Domain errors also print one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import complex as cc
from .errors import FSRError
from .expansion import ExpansionTower, annulus, find_seed, primary_seed
from .growth import (
    check_functional_equation, closed_form_bn, degree_estimate, growth_table, rpq_degree,
    sphere_series_rpq,
)
from .modulus import hyperbolicity_indicator, layer_weights, modulus, modulus_csv, optimize_modulus
from .render import RenderSpec, render_svg
from .rules import make_rpq, validate_rule
from .ruleio import load_rule, serialize_rule
from .subdivision import DEFAULT_MAX_TILES, iterate


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _rpq_params(rule) -> tuple[int, int] | None:
    fam = rule.family
    if fam and fam[0] == "rpq" and len(fam) == 3 and fam[1] >= 2 and fam[2] >= 2:
        p, q = fam[1], fam[2]
        if make_rpq(p, q) == rule:
            return p, q
    return None


def _tower(rule, args) -> ExpansionTower:
    return ExpansionTower(rule, primary_seed(rule, max_tiles=args.max_tiles),
                          max_tiles=args.max_tiles)


def cmd_validate(args) -> int:
    rule = load_rule(args.rule)
    rep = validate_rule(rule)
    if rep.ok:
        print(f"ok: rule {rule.name} with {len(rule.tile_types)} tile types")
        return 0
    for v in rep.violations:
        print(f"violation: {v}")
    return 1


def cmd_subdivide(args) -> int:
    rule = load_rule(args.rule)
    tile = args.tile or rule.type_names[0]
    chain = iterate(rule, rule.single_tile(tile), args.levels, max_tiles=args.max_tiles)
    if args.format == "svg":
        _emit(render_svg(RenderSpec(chain[-1].complex, size=args.size)), args.output)
        return 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = rule.type_names
    w.writerow(["level", "tiles", "vertices", "edges", "euler", "boundary_edges", *names])
    for level, step in enumerate(chain):
        c = step.complex
        counts = c.label_counts()
        w.writerow([level, len(c.tiles), c.n_vertices, len(c.edges), c.euler_characteristic,
                    len(c.boundary_edges), *(counts.get(n, 0) for n in names)])
    _emit(buf.getvalue(), args.output)
    return 0


def cmd_grow(args) -> int:
    rule = load_rule(args.rule)
    tower = _tower(rule, args)
    table = growth_table(rule, tower.seed, args.radius, args.norm, tower=tower)
    _emit(table.to_csv(), args.output)
    return 0


def cmd_series(args) -> int:
    rule = load_rule(args.rule)
    tower = _tower(rule, args)
    table = growth_table(rule, tower.seed, args.n, args.norm, tower=tower)
    text = table.to_csv()
    pq = _rpq_params(rule)
    if pq:
        p, q = pq
        g = sphere_series_rpq(p, q, args.n)
        agree = tuple(g.coefficients) == table.spheres
        closed = all(closed_form_bn(p, q, n) == b for n, b in enumerate(table.balls))
        text += f"# block formula agrees: {'yes' if agree else 'no'}\n"
        text += f"# closed-form b_n agrees: {'yes' if closed else 'no'}\n"
        if args.n >= p:
            chk = check_functional_equation(p, q, g)
            status = "pass" if chk.ok else f"fail at degree {chk.first_failure}"
            text += f"# functional equation: {status} (through degree {chk.checked_degree})\n"
    _emit(text, args.output)
    return 0


def cmd_degree(args) -> int:
    rule = load_rule(args.rule)
    tower = _tower(rule, args)
    table = growth_table(rule, tower.seed, args.n, args.norm, tower=tower)
    est = degree_estimate(table, tuple(args.window) if args.window else None)
    lines = [
        f"slope {est.slope:.6f}",
        f"sup_ratio {est.sup_ratio:.6f}",
        f"window {est.window[0]} {est.window[1]}",
        f"increasing {'yes' if est.increasing else 'no'}",
    ]
    pq = _rpq_params(rule)
    if pq:
        lines.append(f"expected {rpq_degree(*pq):.6f}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _default_base(rule) -> int:
    fam = rule.family
    if fam and fam[0] == "rpq" and len(fam) == 3:
        return fam[2]
    return 2


def cmd_modulus(args) -> int:
    rule = load_rule(args.rule)
    tower = _tower(rule, args)
    base = args.base or _default_base(rule)
    rows = []
    for n in range(1, args.annuli + 1):
        a = annulus(tower, n)
        rep = modulus(a, layer_weights(a, base))
        ms = optimize_modulus(a, tol=args.tol).modulus if args.solver == "on" else None
        rows.append((n, rep.height, rep.area, rep.modulus, ms))
    _emit(modulus_csv(rows), args.output)
    return 0


def cmd_hyperbolicity(args) -> int:
    rule = load_rule(args.rule)
    tower = _tower(rule, args)
    base = args.base or _default_base(rule)
    rep = hyperbolicity_indicator(tower, args.annuli, base)
    lines = [f"base {base}"]
    lines += [f"M_{n} {m} {float(m):.9f}" for n, m in enumerate(rep.sequence, 1)]
    lines.append(f"limit {rep.limit:.9f}")
    lines.append(f"verdict {rep.verdict}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_seed(args) -> int:
    rule = load_rule(args.rule)
    seeds = find_seed(rule, args.max_level, max_tiles=args.max_tiles)
    out = ["type,level,path,interior"]
    for s in seeds:
        out.append(f"{s.tile_type},{s.level},{'.'.join(map(str, s.path))},"
                   f"{'yes' if s.interior else 'no'}")
    _emit("\n".join(out) + "\n", args.output)
    return 0


def cmd_render(args) -> int:
    rule = load_rule(args.rule)
    if args.stages is not None:
        tower = _tower(rule, args)
        c = tower.stage(args.stages)
        spec = RenderSpec(c, size=args.size, highlight=set(tower.seed_tiles(args.stages)))
    else:
        tile = args.tile or rule.type_names[0]
        c = iterate(rule, rule.single_tile(tile), args.levels, max_tiles=args.max_tiles)[-1].complex
        spec = RenderSpec(c, size=args.size)
    _emit(render_svg(spec), args.output)
    return 0


def cmd_rpq(args) -> int:
    _emit(serialize_rule(make_rpq(args.p, args.q)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fsrgrowth", description=__doc__.splitlines()[0])
    ap.add_argument("--max-tiles", type=int, default=DEFAULT_MAX_TILES,
                    help="tile budget for any single complex (default 10^7)")
    sub = ap.add_subparsers(dest="command", required=True)

    def rule_cmd(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("rule", help="rule file, or builtin:pentagonal|R1|R2")
        p.add_argument("-o", "--output", help="write to this file instead of stdout")
        p.set_defaults(fn=fn)
        return p

    rule_cmd("validate", cmd_validate, "check a rule document")

    p = rule_cmd("subdivide", cmd_subdivide, "subdivide one tile repeatedly")
    p.add_argument("--tile", help="tile type (default: first declared)")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--out", dest="format", choices=("csv", "svg"), default="csv")
    p.add_argument("--size", type=int, default=600)

    p = rule_cmd("grow", cmd_grow, "growth table up to a radius")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--norm", choices=cc.MODES, default=cc.FAT)

    p = rule_cmd("series", cmd_series, "sphere/ball series with R_{p,q} checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--norm", choices=cc.MODES, default=cc.FAT)

    p = rule_cmd("degree", cmd_degree, "estimate the polynomial growth degree")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--norm", choices=cc.MODES, default=cc.FAT)
    p.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"))

    p = rule_cmd("modulus", cmd_modulus, "fat-flow moduli of the annuli R_1..R_N")
    p.add_argument("--annuli", type=int, required=True)
    p.add_argument("--base", type=int)
    p.add_argument("--solver", choices=("on", "off"), default="off")
    p.add_argument("--tol", type=float, default=1e-9)

    p = rule_cmd("hyperbolicity", cmd_hyperbolicity, "modulus sequence and boundedness verdict")
    p.add_argument("--annuli", type=int, required=True)
    p.add_argument("--base", type=int)

    p = rule_cmd("seed", cmd_seed, "list single-tile seeds")
    p.add_argument("--max-level", type=int, default=2)

    p = rule_cmd("render", cmd_render, "draw a subdivided tile or tower stage as SVG")
    p.add_argument("--tile")
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--stages", type=int, help="draw this tower stage instead")
    p.add_argument("--size", type=int, default=600)

    p = sub.add_parser("rpq", help="write the rule document for R_{p,q}")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(fn=cmd_rpq)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except FSRError as exc:
        sys.stderr.write(json.dumps({"error": exc.kind, "message": str(exc)}) + "\n")
        return 1
    except ValueError as exc:
        sys.stderr.write(json.dumps({"error": "usage", "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
