"""Line-oriented experiment files.

    ring p=101 vars=[x,y] order=grevlex
    ci f=[x^2, y^2]
    ideal I=[x, y]
    module M gens=[0] rels=[[x],[y]]
    cmd depth-grid M=M N=N I=I t=0 n=1..8 i=1..8 margin=3 out=depth.csv report=depth.json

``#`` starts a comment. The modules ``k`` (residue field) and ``A`` (the
ring itself) are predeclared unless a block redefines them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .ci_ring import CIRing
from .errors import CiExtError, NotHomogeneous, NotRegularSequence
from .modules import FAMILY_KINDS, QUOT, IdealSpec, PresentedModule
from .polyring import MonomialOrder, PolySyntaxError


class SpecError(CiExtError):
    """Spec-level problem located at a line and column (both 1-based)."""

    label = "error"

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class SpecSyntaxError(SpecError):
    label = "syntax error"


class UnknownReference(SpecError):
    label = "unknown reference"


class InhomogeneousInput(SpecError):
    label = "inhomogeneous input"


class RegularSequenceError(SpecError):
    label = "not a regular sequence"


SUBCOMMANDS = ("depth-grid", "grade-grid", "bass-grid", "series-check", "fit", "ext", "resolve", "gb")

# argument name -> kind of reference
_MODULE_KEYS = ("M", "N", "D")
_IDEAL_KEYS = ("I", "J")

_REQUIRED = {
    "depth-grid": ("M", "N", "I", "t", "n", "i"),
    "grade-grid": ("M", "N", "I", "J", "t", "n", "i"),
    "bass-grid": ("M", "N", "I", "t", "j", "n", "i"),
    "series-check": ("M",),
    "fit": ("M", "N", "I", "t", "n", "i"),
    "ext": ("M", "D", "i"),
    "resolve": ("M",),
    "gb": ("gens",),
}

_ALLOWED = {
    "depth-grid": {"margin", "out", "report"},
    "grade-grid": {"kind", "margin", "out", "report"},
    "bass-grid": {"margin", "out", "report", "tail", "fit_n", "fit_i"},
    "series-check": {"N", "I", "t", "j", "n", "i", "tail", "upto", "onset_max", "out", "report"},
    "fit": {"j", "fit_n", "fit_i", "out", "report"},
    "ext": {"out", "report"},
    "resolve": {"upto", "out", "report"},
    "gb": {"out", "report"},
}


@dataclass
class Value:
    text: str
    column: int


@dataclass
class Command:
    name: str
    args: dict
    line: int

    def int(self, key: str, default=None) -> int:
        v = self.args.get(key)
        if v is None:
            if default is None:
                raise SpecSyntaxError(f"missing argument {key}=", self.line, 1)
            return default
        try:
            return int(v.text)
        except ValueError:
            raise SpecSyntaxError(f"{key} must be an integer", self.line, v.column) from None

    def range(self, key: str, default=None) -> tuple[int, int]:
        v = self.args.get(key)
        if v is None:
            if default is None:
                raise SpecSyntaxError(f"missing argument {key}=", self.line, 1)
            return default
        m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", v.text)
        if not m or int(m.group(1)) > int(m.group(2)):
            raise SpecSyntaxError(f"{key} must be a range a..b with a <= b", self.line, v.column)
        return int(m.group(1)), int(m.group(2))

    def pair(self, key: str, default=None) -> tuple[int, int]:
        v = self.args.get(key)
        if v is None:
            return default
        m = re.fullmatch(r"(-?\d+),(-?\d+)", v.text)
        if not m:
            raise SpecSyntaxError(f"{key} must be a pair a,b", self.line, v.column)
        return int(m.group(1)), int(m.group(2))

    def str(self, key: str, default=None):
        v = self.args.get(key)
        return default if v is None else v.text


@dataclass
class ExperimentSpec:
    ring: CIRing
    ideals: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)
    commands: list = field(default_factory=list)


# -- tokenizing -------------------------------------------------------------------

def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def _split_fields(text: str, lineno: int) -> list[tuple[str, int]]:
    """Whitespace-separated fields, keeping bracketed groups whole; (field, column)."""
    out = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        start = i
        depth = 0
        while i < n and (depth > 0 or not text[i].isspace()):
            if text[i] == "[":
                depth += 1
            elif text[i] == "]":
                depth -= 1
                if depth < 0:
                    raise SpecSyntaxError("unbalanced ']'", lineno, i + 1)
            i += 1
        if depth:
            raise SpecSyntaxError("unbalanced '['", lineno, start + 1)
        out.append((text[start:i], start + 1))
    return out


def _key_values(fields, lineno: int) -> dict[str, Value]:
    out = {}
    for f, col in fields:
        if "=" not in f:
            raise SpecSyntaxError(f"expected key=value, got {f!r}", lineno, col)
        k, v = f.split("=", 1)
        if not re.fullmatch(r"[A-Za-z_]\w*", k):
            raise SpecSyntaxError(f"bad key {k!r}", lineno, col)
        if k in out:
            raise SpecSyntaxError(f"duplicate key {k!r}", lineno, col)
        out[k] = Value(v, col + len(k) + 1)
    return out


def parse_list(v: Value, lineno: int) -> list[Value]:
    """Items of ``[a, b, ...]`` (one nesting level), with their columns."""
    t = v.text
    if not (t.startswith("[") and t.endswith("]")):
        raise SpecSyntaxError("expected a bracketed list", lineno, v.column)
    body = t[1:-1]
    items = []
    depth = 0
    start = 0
    for pos, ch in enumerate(body + ","):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == "," and depth == 0:
            raw = body[start:pos]
            stripped = raw.strip()
            if stripped:
                lead = len(raw) - len(raw.lstrip())
                items.append(Value(stripped, v.column + 1 + start + lead))
            elif pos < len(body) or items:
                raise SpecSyntaxError("empty list item", lineno, v.column + 1 + start)
            start = pos + 1
    return items


def parse_poly_value(ring: CIRing, v: Value, lineno: int):
    try:
        return ring.Q.parse(v.text)
    except PolySyntaxError as e:
        raise SpecSyntaxError(str(e).rsplit(" (column", 1)[0], lineno, v.column + e.column - 1) from None
    except ValueError as e:
        raise SpecSyntaxError(str(e), lineno, v.column) from None


# -- parsing ------------------------------------------------------------------------

def parse_spec(text: str) -> ExperimentSpec:
    """Parse and validate an experiment file; raises a SpecError subclass on the first problem."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        fields = _split_fields(body, lineno)
        if fields:
            lines.append((lineno, fields))
    if not lines or lines[0][1][0][0] != "ring":
        where = lines[0][0] if lines else 1
        raise SpecSyntaxError("the first block must be 'ring'", where, 1)

    lineno, fields = lines[0]
    kv = _key_values(fields[1:], lineno)
    for k in kv:
        if k not in ("p", "vars", "order"):
            raise SpecSyntaxError(f"unknown ring option {k!r}", lineno, kv[k].column)
    if "vars" not in kv:
        raise SpecSyntaxError("ring needs vars=[...]", lineno, 1)
    names = [x.text for x in parse_list(kv["vars"], lineno)]
    for x in parse_list(kv["vars"], lineno):
        if not re.fullmatch(r"[A-Za-z_]\w*", x.text):
            raise SpecSyntaxError(f"bad variable name {x.text!r}", lineno, x.column)
    if len(set(names)) != len(names) or not names:
        raise SpecSyntaxError("variables must be distinct and non-empty", lineno, kv["vars"].column)
    p = 101
    if "p" in kv:
        try:
            p = int(kv["p"].text)
        except ValueError:
            raise SpecSyntaxError("p must be an integer", lineno, kv["p"].column) from None
    order = kv["order"].text if "order" in kv else "grevlex"
    if order not in [o.value for o in MonomialOrder]:
        raise SpecSyntaxError(f"unknown monomial order {order!r}", lineno, kv["order"].column)

    rest = lines[1:]
    f_vals: list[Value] = []
    ci_line = lineno
    if rest and rest[0][1][0][0] == "ci":
        ci_line, cfields = rest[0]
        ckv = _key_values(cfields[1:], ci_line)
        if set(ckv) != {"f"}:
            raise SpecSyntaxError("ci takes exactly f=[...]", ci_line, 1)
        f_vals = parse_list(ckv["f"], ci_line)
        rest = rest[1:]
    try:
        base = CIRing(names, (), p, order)
    except ValueError as e:
        raise SpecSyntaxError(str(e), lineno, kv["p"].column if "p" in kv else 1) from None
    f_polys = [parse_poly_value(base, v, ci_line) for v in f_vals]
    try:
        ring = CIRing(names, f_polys, p, order)
    except NotRegularSequence as e:
        v = f_vals[e.index - 1]
        err = RegularSequenceError(f"f_{e.index} is a zero divisor modulo its predecessors "
                                   f"(witness {e.witness})", ci_line, v.column)
        err.index, err.witness = e.index, e.witness
        raise err from None
    except NotHomogeneous as e:
        raise InhomogeneousInput(str(e), ci_line, f_vals[0].column if f_vals else 1) from None
    except ValueError as e:
        raise SpecSyntaxError(str(e), ci_line, 1) from None

    spec = ExperimentSpec(ring)
    spec.modules["k"] = PresentedModule.residue_field(ring)
    spec.modules["A"] = PresentedModule.free(ring, [0])
    for lineno, fields in rest:
        head, col = fields[0]
        if head == "ideal":
            kv = _key_values(fields[1:], lineno)
            if len(kv) != 1:
                raise SpecSyntaxError("ideal takes one NAME=[...]", lineno, col)
            (name, v), = kv.items()
            polys = [parse_poly_value(ring, x, lineno) for x in parse_list(v, lineno)]
            try:
                spec.ideals[name] = IdealSpec(ring, polys)
            except NotHomogeneous as e:
                raise InhomogeneousInput(str(e), lineno, v.column) from None
        elif head == "module":
            if len(fields) < 2 or "=" in fields[1][0]:
                raise SpecSyntaxError("module needs a name", lineno, col)
            name = fields[1][0]
            kv = _key_values(fields[2:], lineno)
            for k in kv:
                if k not in ("gens", "rels"):
                    raise SpecSyntaxError(f"unknown module option {k!r}", lineno, kv[k].column)
            if "gens" not in kv:
                raise SpecSyntaxError("module needs gens=[...]", lineno, col)
            degs = []
            for x in parse_list(kv["gens"], lineno):
                try:
                    degs.append(int(x.text))
                except ValueError:
                    raise SpecSyntaxError("generator degrees must be integers", lineno, x.column) from None
            cols = []
            for c in (parse_list(kv["rels"], lineno) if "rels" in kv else []):
                entries = parse_list(c, lineno)
                if len(entries) != len(degs):
                    raise SpecSyntaxError(f"relation has {len(entries)} entries, expected {len(degs)}",
                                          lineno, c.column)
                cols.append((c, [parse_poly_value(ring, e, lineno) for e in entries]))
            try:
                spec.modules[name] = PresentedModule.from_lists(ring, degs, [c for _, c in cols])
            except NotHomogeneous:
                where = kv["rels"].column
                for c, entries in cols:
                    try:
                        PresentedModule.from_lists(ring, degs, [entries])
                    except NotHomogeneous:
                        where = c.column
                        break
                raise InhomogeneousInput("relation column is not homogeneous", lineno, where) from None
        elif head == "cmd":
            if len(fields) < 2:
                raise SpecSyntaxError("cmd needs a subcommand", lineno, col)
            sub, scol = fields[1]
            if sub not in SUBCOMMANDS:
                raise SpecSyntaxError(f"unknown subcommand {sub!r}", lineno, scol)
            kv = _key_values(fields[2:], lineno)
            for k in _REQUIRED[sub]:
                if k not in kv:
                    raise SpecSyntaxError(f"{sub} needs {k}=", lineno, scol)
            for k, v in kv.items():
                if k not in _REQUIRED[sub] and k not in _ALLOWED[sub]:
                    raise SpecSyntaxError(f"{sub} does not take {k}=", lineno, v.column)
                if k in _MODULE_KEYS and v.text not in spec.modules:
                    raise UnknownReference(f"module {v.text!r} is not declared", lineno, v.column)
                if k in _IDEAL_KEYS and v.text not in spec.ideals:
                    raise UnknownReference(f"ideal {v.text!r} is not declared", lineno, v.column)
            cmd = Command(sub, kv, lineno)
            _check_command(cmd)
            spec.commands.append(cmd)
        elif head in ("ring", "ci"):
            raise SpecSyntaxError(f"only one {head} block is allowed, right at the top", lineno, col)
        else:
            raise SpecSyntaxError(f"unknown block {head!r}", lineno, col)
    return spec


def _check_command(cmd: Command) -> None:
    a = cmd.args
    if "t" in a and cmd.int("t") not in (0, 1):
        raise SpecSyntaxError("t must be 0 or 1", cmd.line, a["t"].column)
    for k in ("n", "i", "fit_n", "fit_i"):
        if k in a and not (k == "i" and cmd.name == "ext"):
            lo, _ = cmd.range(k)
            if lo < 0:
                raise SpecSyntaxError(f"{k} must be non-negative", cmd.line, a[k].column)
    for k in ("j", "margin", "upto", "onset_max"):
        if k in a and cmd.int(k) < 0:
            raise SpecSyntaxError(f"{k} must be non-negative", cmd.line, a[k].column)
    if "i" in a and cmd.name == "ext":
        if cmd.int("i") < 0:
            raise SpecSyntaxError("i must be non-negative", cmd.line, a["i"].column)
    if "tail" in a:
        cmd.pair("tail")
    if "kind" in a and a["kind"].text not in FAMILY_KINDS:
        raise SpecSyntaxError(f"kind must be one of {', '.join(FAMILY_KINDS)}", cmd.line, a["kind"].column)
    if cmd.name == "series-check" and "upto" not in a and not all(k in a for k in ("N", "I", "t", "n", "i")):
        raise SpecSyntaxError("series-check needs either upto= or N=, I=, t=, n=, i=", cmd.line, 1)


def family_kind(cmd: Command) -> str:
    return cmd.str("kind", QUOT)
