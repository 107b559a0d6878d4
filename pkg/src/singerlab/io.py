"""Module description files and the text formats written by the command line.

A description is a JSON object::

    {
      "prime": 2,
      "generators": [{"name": "a", "degree": 0}, {"name": "b", "degree": 2}],
      "actions": [{"op": "Sq^2", "src": "a", "dst": {"b": 1}}],
      "window": [0, 2]
    }

``generators`` lists the F_p basis of the module.  ``dst`` is an F_p
combination, given either as an object of name/coefficient pairs or as a
string such as ``"b + 2 c"``.  ``op`` is ``Sq^k`` at p = 2 and ``P^k`` or
``beta`` at odd p.  Operations not listed act by zero.  ``window`` is
optional; with ``"truncated": true`` the module is taken as unknown above the
window.
"""

from __future__ import annotations

import json
import json.scanner
import re

from . import steenrod
from .amodule import AModule, module_from_table, validate_action
from .errors import DescriptionError, ValidationError
from .fp import check_prime, is_prime

CHART_HEADER = "#singerlab-chart v1"
PAGE_HEADER = "#singerlab-page v1"
RPLUS_HEADER = "#singerlab-rplus v1"


class _Node(dict):
    """A JSON object remembering the offset where it starts."""

    pos = 0


class _PosDecoder(json.JSONDecoder):
    def __init__(self):
        super().__init__()
        plain = self.parse_object

        def parse_object(s_and_end, *args, **kw):
            obj, end = plain(s_and_end, *args, **kw)
            node = _Node(obj)
            node.pos = s_and_end[1] - 1
            return node, end

        self.parse_object = parse_object
        self.scan_once = json.scanner.py_make_scanner(self)


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Ctx:
    def __init__(self, text: str):
        self.text = text

    def fail(self, msg: str, node=None):
        if isinstance(node, _Node):
            line, col = _line_col(self.text, node.pos)
            raise DescriptionError(msg, line, col)
        raise DescriptionError(msg, 1, 1)


_TERM = re.compile(r"^\s*(?:(\d+)\s*\*?\s*)?([A-Za-z_][\w.']*)\s*$")


def _parse_combination(ctx: _Ctx, dst, node, p: int, names) -> dict:
    out: dict = {}
    if isinstance(dst, str):
        text = dst.replace("-", "+-")
        for part in text.split("+"):
            part = part.strip()
            if not part:
                continue
            neg = part.startswith("-")
            m = _TERM.match(part.lstrip("-"))
            if not m:
                ctx.fail(f"cannot read term {part!r} in {dst!r}", node)
            c = int(m.group(1) or 1) * (-1 if neg else 1)
            out[m.group(2)] = (out.get(m.group(2), 0) + c) % p
    elif isinstance(dst, dict):
        for k, c in dst.items():
            if not isinstance(c, int) or isinstance(c, bool):
                ctx.fail(f"coefficient of {k!r} must be an integer", node)
            out[k] = (out.get(k, 0) + c) % p
    else:
        ctx.fail("dst must be an object or a string", node)
    for k in out:
        if k not in names:
            ctx.fail(f"unknown basis element {k!r}", node)
    return {k: c for k, c in out.items() if c}


def _parse_op(ctx: _Ctx, op, node, p: int) -> int:
    if not isinstance(op, str):
        ctx.fail("op must be a string", node)
    m = re.fullmatch(r"\s*(Sq|P)\^?\{?(\d+)\}?\s*|\s*(beta|β)\s*", op)
    if not m:
        ctx.fail(f"unknown operation {op!r}", node)
    if m.group(3):
        if p == 2:
            ctx.fail("beta is not an operation at p = 2 (use Sq^1)", node)
        return steenrod.BOCKSTEIN
    kind, k = m.group(1), int(m.group(2))
    if kind == "Sq" and p != 2:
        ctx.fail(f"Sq^{k} is not an operation at p = {p} (use P^k and beta)", node)
    if kind == "P" and p == 2:
        ctx.fail(f"P^{k} is not an operation at p = 2 (use Sq^k)", node)
    if k == 0:
        ctx.fail(f"{op} is the identity and cannot be assigned", node)
    return k


def parse_description(text: str, validate: bool = True) -> AModule:
    """Parse a description; raises DescriptionError (with line and column) or ValidationError."""
    ctx = _Ctx(text)
    try:
        doc = _PosDecoder().decode(text)
    except json.JSONDecodeError as exc:
        raise DescriptionError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        ctx.fail("top level must be an object")
    p = doc.get("prime")
    if not isinstance(p, int) or isinstance(p, bool) or not is_prime(p):
        ctx.fail(f"prime must be a prime integer, got {p!r}", doc)
    check_prime(p)
    gens = doc.get("generators")
    if not isinstance(gens, list) or not gens:
        ctx.fail("generators must be a non-empty list", doc)
    degrees = {}
    for g in gens:
        if not isinstance(g, dict) or set(g) - {"name", "degree"} or "name" not in g or "degree" not in g:
            ctx.fail("each generator is {\"name\": ..., \"degree\": ...}", g if isinstance(g, dict) else doc)
        name, deg = g["name"], g["degree"]
        if not isinstance(name, str) or not name:
            ctx.fail("generator name must be a non-empty string", g)
        if not isinstance(deg, int) or isinstance(deg, bool):
            ctx.fail(f"degree of {name!r} must be an integer", g)
        if name in degrees:
            ctx.fail(f"duplicate generator {name!r}", g)
        degrees[name] = deg
    action: dict = {}
    for act in doc.get("actions", []) or []:
        if not isinstance(act, dict) or {"op", "src", "dst"} - set(act):
            ctx.fail("each action is {\"op\": ..., \"src\": ..., \"dst\": ...}", act if isinstance(act, dict) else doc)
        tok = _parse_op(ctx, act["op"], act, p)
        src = act["src"]
        if src not in degrees:
            ctx.fail(f"unknown basis element {src!r}", act)
        img = _parse_combination(ctx, act["dst"], act, p, degrees)
        want = degrees[src] + steenrod.generator_degree(tok, p)
        for k in img:
            if degrees[k] != want:
                ctx.fail(f"{act['op']} {src} must land in degree {want}, {k!r} has degree {degrees[k]}", act)
        if (tok, src) in action:
            ctx.fail(f"{act['op']} on {src!r} given twice", act)
        if img:
            action[(tok, src)] = img
    window = doc.get("window")
    if window is None:
        window = (min(degrees.values()), max(degrees.values()))
    elif (not isinstance(window, list) or len(window) != 2
          or not all(isinstance(x, int) and not isinstance(x, bool) for x in window) or window[0] > window[1]):
        ctx.fail("window must be [lo, hi] with lo <= hi", doc)
    truncated = doc.get("truncated", False)
    if not isinstance(truncated, bool):
        ctx.fail("truncated must be true or false", doc)
    for n, d in degrees.items():
        if not window[0] <= d <= window[1]:
            ctx.fail(f"generator {n!r} of degree {d} is outside the window {list(window)}", doc)
    label = doc.get("label", "M")
    M = module_from_table(p, degrees, action, tuple(window), truncated, label=str(label))
    if validate:
        report = validate_action(M)
        if report:
            raise ValidationError(f"{len(report)} Adem relation(s) fail", report, p)
    return M


def read_description(path: str, validate: bool = True) -> AModule:
    with open(path, encoding="utf-8") as fh:
        return parse_description(fh.read(), validate)


def description_text(M: AModule) -> str:
    """Serialize a finite module back to the description format (names become strings)."""
    p = M.prime
    names = {n: str(n) for n in M.names()}
    doc = {
        "prime": p,
        "generators": [{"name": names[n], "degree": M.degree(n)} for n in M.names()],
        "actions": [],
        "window": list(M.window),
    }
    for (tok, src), img in sorted(M.action.items(), key=lambda kv: (kv[0][0], names[kv[0][1]])):
        if img:
            doc["actions"].append(
                {"op": steenrod.generator_name(tok, p).replace("β", "beta"), "src": names[src],
                 "dst": {names[k]: c for k, c in sorted(img.items(), key=lambda kv: names[kv[0]])}}
            )
    if M.truncated:
        doc["truncated"] = True
    return json.dumps(doc, indent=2) + "\n"


# --- writers -------------------------------------------------------------------

def chart_rows(chart) -> list[str]:
    return [f"{s}\t{t}\t{d}\t{','.join(labels)}" for s, t, d, labels in chart.rows()]


def chart_text(chart, comments=()) -> str:
    lines = [CHART_HEADER] + chart_rows(chart) + [f"# {c}" for c in comments]
    return "\n".join(lines) + "\n"


def tower_chart_text(limit, stages, charts, report_lines) -> str:
    """Limit chart first, then one commented block per stage, then the stabilization report."""
    lines = [CHART_HEADER, "#limit"] + chart_rows(limit)
    for n, ch in zip(stages, charts):
        lines.append(f"#stage n={n}")
        lines += ["#" + row for row in chart_rows(ch)]
    lines += [f"# {x}" for x in report_lines]
    return "\n".join(lines) + "\n"


def read_chart(text: str) -> dict:
    """{(s, t): (dim, labels)} from the data rows of a chart file."""
    lines = text.splitlines()
    if not lines or lines[0] != CHART_HEADER:
        raise DescriptionError("missing chart header", 1, 1)
    out = {}
    for k, line in enumerate(lines[1:], start=2):
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise DescriptionError("chart rows have four tab-separated fields", k, 1)
        s, t, d = (int(x) for x in parts[:3])
        out[(s, t)] = (d, tuple(x for x in parts[3].split(",") if x))
    return out


def page_text(page, collapse, reps, p: int) -> str:
    """Page rows, then the collapse certificate and the representative table as comments."""
    lines = [PAGE_HEADER]
    for s, t, d, labels in page.rows():
        lines.append(f"{s}\t{t}\t{d}\t{','.join(labels)}")
    lines += [f"#collapse {x}" for x in collapse.lines()]
    for rep in reps:
        e = rep.element
        lines.append(
            f"#rep\t{e.i}\t{e.r}\t{e.a}\t{rep.filtration}\t{rep.t}\t{rep.coefficient}\t{rep.label(p)}"
        )
    return "\n".join(lines) + "\n"


def rplus_text(T, p: int) -> str:
    """Basis (label, degree, filtration) and the action table of a Singer truncation."""
    from . import singer

    M = T.module
    lines = [RPLUS_HEADER, f"#source {T.source.label} n={T.n} window={T.window[0]}:{T.window[1]}", "#basis"]
    for e in M.names():
        lines.append(f"{singer.label(e, p)}\t{M.degree(e)}\t{T.fil(e)}")
    lines.append("#action")
    for (tok, e), img in sorted(M.action.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        dst = " + ".join(
            (singer.label(f, p) if c == 1 else f"{c} {singer.label(f, p)}") for f, c in sorted(img.items())
        )
        lines.append(f"{steenrod.generator_name(tok, p)}\t{singer.label(e, p)}\t{dst}")
    return "\n".join(lines) + "\n"
