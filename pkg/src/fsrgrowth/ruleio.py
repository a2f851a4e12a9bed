"""Plain-text rule documents.

Example (the t1 template of R_{2,2})::

    rule R_2_2
    family rpq 2 2
    type t1 4 : 2 2 2 2
    type t2 4 : 2 2 2 2
    type t3 5 : 2 2 2 2 2
    template t1
      vertices 12
      boundary : 0 4 | 1 5 | 2 6 | 3 7
      sub t1 0 : 8 9 10 11
      sub t3 0 : 0 4 1 9 8
      ...
    end

``type NAME EDGES [: VECTOR]`` declares a tile type; the optional vector
gives the sub-edge count of each edge and defaults to the template's arc
lengths. ``boundary`` lists the template boundary counter-clockwise, with
``|`` before each parent corner after the first; parent edge ``j`` runs from
corner ``j`` through the vertices that follow it up to corner ``j + 1``.
``sub TYPE K : V...`` is a subtile as a counter-clockwise vertex cycle whose
distinguished corner is the ``K``-th listed vertex (0-based). ``#`` starts a
comment.
"""

from __future__ import annotations

from pathlib import Path

from .errors import RuleError, RuleSyntaxError
from .rules import (
    BUILTIN_NAMES, SubdivisionRule, SubdivisionTemplate, TileType, builtin, validate_rule,
)


class _Line:
    def __init__(self, lineno: int, raw: str):
        self.lineno = lineno
        body = raw.split("#", 1)[0]
        # (token, 1-based column)
        self.tokens: list[tuple[str, int]] = []
        i = 0
        while i < len(body):
            ch = body[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "|:":
                self.tokens.append((ch, i + 1))
                i += 1
                continue
            j = i
            while j < len(body) and not body[j].isspace() and body[j] not in "|:":
                j += 1
            self.tokens.append((body[i:j], i + 1))
            i = j

    def error(self, msg: str, tok: int | None = None) -> RuleSyntaxError:
        col = None
        if tok is not None and tok < len(self.tokens):
            col = self.tokens[tok][1]
        elif self.tokens:
            col = self.tokens[-1][1]
        return RuleSyntaxError(msg, self.lineno, col)

    def int_at(self, tok: int, what: str) -> int:
        if tok >= len(self.tokens):
            raise self.error(f"missing {what}")
        text = self.tokens[tok][0]
        try:
            return int(text)
        except ValueError:
            raise self.error(f"expected integer {what}, got {text!r}", tok) from None

    def ints_from(self, tok: int, what: str) -> list[int]:
        return [self.int_at(i, what) for i in range(tok, len(self.tokens))]


def parse_rule(text: str, validate: bool = True) -> SubdivisionRule:
    """Parse a rule document; raises RuleSyntaxError with line/column."""
    lines = [_Line(i + 1, raw) for i, raw in enumerate(text.splitlines())]
    name = "rule"
    family = None
    types: list[tuple[str, int, list[int] | None, _Line]] = []
    templates: list[SubdivisionTemplate] = []
    current = None  # (name, vertices, boundary, subs, line)

    for ln in lines:
        if not ln.tokens:
            continue
        key = ln.tokens[0][0]
        if current is not None:
            if key == "end":
                templates.append(_finish_template(current))
                current = None
            elif key == "vertices":
                current["vertices"] = ln.int_at(1, "vertex count")
            elif key == "boundary":
                current["boundary"] = _parse_boundary(ln)
            elif key == "sub":
                current["subs"].append(_parse_sub(ln))
            else:
                raise ln.error(f"unexpected {key!r} inside template", 0)
            continue
        if key == "rule":
            if len(ln.tokens) != 2:
                raise ln.error("expected: rule NAME")
            name = ln.tokens[1][0]
        elif key == "family":
            if len(ln.tokens) < 2:
                raise ln.error("expected: family KIND [ARGS]")
            family = (ln.tokens[1][0], *ln.ints_from(2, "family parameter"))
        elif key == "type":
            types.append(_parse_type(ln))
        elif key == "template":
            if len(ln.tokens) != 2:
                raise ln.error("expected: template TYPE")
            current = {"name": ln.tokens[1][0], "vertices": None, "boundary": None,
                       "subs": [], "line": ln}
        else:
            raise ln.error(f"unknown keyword {key!r}", 0)
    if current is not None:
        raise current["line"].error(f"template {current['name']!r} is missing 'end'")
    if not types:
        raise RuleSyntaxError("document declares no tile types", 1, None)

    arc_lengths = {t.tile_type: t.arc_lengths for t in templates}
    tile_types = []
    for tname, count, vec, ln in types:
        if vec is None:
            if tname not in arc_lengths:
                raise ln.error(f"type {tname!r} has no vector and no template to derive one")
            vec = list(arc_lengths[tname])
        tile_types.append(TileType(tname, count, tuple(vec)))
    rule = SubdivisionRule(tuple(tile_types), tuple(templates), name=name, family=family)
    if validate:
        rep = validate_rule(rule)
        if not rep.ok:
            raise RuleError("invalid rule: " + "; ".join(map(str, rep.violations)))
    return rule


def _parse_type(ln: _Line):
    toks = [t for t, _ in ln.tokens]
    if len(toks) < 3:
        raise ln.error("expected: type NAME EDGES [: VECTOR]")
    tname = toks[1]
    count = ln.int_at(2, "edge count")
    vec = None
    if len(toks) > 3:
        if toks[3] != ":":
            raise ln.error("expected ':' before the subdivision vector", 3)
        vec = ln.ints_from(4, "subdivision entry")
    return tname, count, vec, ln


def _parse_boundary(ln: _Line) -> list[list[int]]:
    toks = ln.tokens
    if len(toks) < 3 or toks[1][0] != ":":
        raise ln.error("expected: boundary : V ... | V ...")
    segments: list[list[int]] = [[]]
    for i in range(2, len(toks)):
        if toks[i][0] == "|":
            segments.append([])
        else:
            segments[-1].append(ln.int_at(i, "boundary vertex"))
    if any(not s for s in segments):
        raise ln.error("empty boundary segment")
    return segments


def _parse_sub(ln: _Line) -> tuple[str, tuple[int, ...]]:
    toks = ln.tokens
    if len(toks) < 5 or toks[3][0] != ":":
        raise ln.error("expected: sub TYPE CORNER : V ...")
    label = toks[1][0]
    start = ln.int_at(2, "starting corner")
    cyc = ln.ints_from(4, "subtile vertex")
    if not 0 <= start < len(cyc):
        raise ln.error(f"starting corner {start} outside the cycle", 2)
    return label, tuple(cyc[start:] + cyc[:start])


def _finish_template(cur) -> SubdivisionTemplate:
    ln = cur["line"]
    if cur["boundary"] is None:
        raise ln.error(f"template {cur['name']!r} has no boundary line")
    segs = cur["boundary"]
    arcs = tuple(
        tuple(segs[j] + [segs[(j + 1) % len(segs)][0]]) for j in range(len(segs))
    )
    subs = tuple(cur["subs"])
    nv = cur["vertices"]
    if nv is None:
        nv = 1 + max([v for a in arcs for v in a] + [v for _, c in subs for v in c])
    return SubdivisionTemplate(cur["name"], nv, arcs, subs)


def serialize_rule(r: SubdivisionRule) -> str:
    """Normal form of a rule document; parse(serialize(r)) == r."""
    out = ["# finite subdivision rule document", f"rule {r.name}"]
    if r.family:
        out.append("family " + " ".join(str(x) for x in r.family))
    for t in r.tile_types:
        out.append(f"type {t.name} {t.edge_count} : " + " ".join(map(str, t.subdivision)))
    for tpl in r.templates:
        out.append("")
        out.append(f"template {tpl.tile_type}")
        out.append(f"  vertices {tpl.n_vertices}")
        segs = [" ".join(map(str, arc[:-1])) for arc in tpl.arcs]
        out.append("  boundary : " + " | ".join(segs))
        for lab, cyc in tpl.subtiles:
            out.append(f"  sub {lab} 0 : " + " ".join(map(str, cyc)))
        out.append("end")
    return "\n".join(out) + "\n"


def load_rule(source: str) -> SubdivisionRule:
    """Read a rule from a file path or ``builtin:NAME``."""
    if source.startswith("builtin:"):
        return builtin(source.split(":", 1)[1])
    path = Path(source)
    if not path.exists():
        if source in BUILTIN_NAMES:
            return builtin(source)
        raise RuleError(f"no such rule file: {source}")
    return parse_rule(path.read_text(encoding="utf-8"))


def fixture_path(name: str) -> Path:
    """Shipped encoding of a built-in rule (pentagonal, R1, R2)."""
    return Path(__file__).parent / "data" / f"{name}.rule"
