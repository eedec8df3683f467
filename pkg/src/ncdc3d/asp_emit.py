"""Answer-set encoding of networks, and decoding of answer sets back to solutions.

Objects are numbered ``1..|V|`` in declaration order. The emitted program is
plain answer-set input text: choice rules generate bounding boxes and cell
occupancy, one rule per tile detects each violated direction condition, and
weak constraints rank dropped defaults (level 1) below violated constraints
(level 2).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .model import (
    TILES,
    Basic,
    Default,
    Disjunctive,
    GridSpec,
    Network,
    Pair,
    Solution,
    SpatialObject,
    Tile,
)


class Mode(Enum):
    CHECK = "check"
    EXPLAIN = "explain"
    INFER = "infer"


@dataclass(frozen=True)
class ObjectNumbering:
    names: tuple[str, ...]

    @classmethod
    def of(cls, net: Network) -> "ObjectNumbering":
        return cls(net.objects)

    def id_of(self, name: str) -> int:
        return self.names.index(name) + 1

    def name_of(self, ident: int) -> str:
        if not 1 <= ident <= len(self.names):
            raise KeyError(ident)
        return self.names[ident - 1]

    def comments(self) -> list[str]:
        return [f"% {i} = {name}" for i, name in enumerate(self.names, start=1)]


# ---------------------------------------------------------------------------
# facts


def emit_facts(net: Network, comments: bool = True) -> str:
    num = ObjectNumbering.of(net)
    ids = num.id_of
    lines = num.comments() if comments else []
    lines += [f"object(1..{len(net.objects)}).", ""]
    row = []
    for t in TILES:
        row.append(f"alltiles({t.emit_token}).")
        if len(row) == 4:
            lines.append("  ".join(row))
            row = []
    if row:
        lines.append("  ".join(row))
    body = []
    for c in net.hard_constraints:
        u, v = ids(c.target), ids(c.reference)
        rel = c.relation
        if isinstance(rel, Basic):
            body.append("  ".join(f"relation({u},{v},{t.emit_token})." for t in rel.relation.ordered()))
        else:
            for k, d in enumerate(rel.disjuncts, start=1):
                body.append("  ".join(f"disjrelation({u},{v},{k},{t.emit_token})." for t in d.ordered()))
    defaults = [
        "  ".join(f"defaultrelation({ids(c.target)},{ids(c.reference)},{t.emit_token})."
                  for t in c.relation.relation.ordered())
        for c in net.defaults
    ]
    extra = [f"mandatory({ids(c.target)},{ids(c.reference)})." for c in net.hard_constraints if c.mandatory]
    extra += [f"ab({ids(o)})." for o in net.objects if o in net.ab_marks]
    extra += [f"toinfer({ids(u)},{ids(v)})." for u, v in net.infer_requests]
    for block in (body, defaults, extra):
        if block:
            lines += [""] + block
    return "\n".join(lines) + "\n"


def fact_set(text: str) -> set[str]:
    """Normalized atoms of a fact listing (comments and layout ignored)."""
    text = re.sub(r"%[^\n]*", "", text)
    return {re.sub(r"\s+", "", f) for f in re.findall(r"\S.*?\.(?=\s|$)", text, re.S)}


# ---------------------------------------------------------------------------
# rules

_AXES = (("x", "X"), ("y", "Y"), ("z", "Z"))


_CLASS = {-1: "lo", 0: "mid", 1: "hi"}


def _tile_region(tile: Tile) -> list[str]:
    """Per-axis class atoms selecting the cells of ``tile`` relative to ``V``."""
    return [f"{axis}cls(V,{var},{_CLASS[cls]})" for (axis, var), cls in zip(_AXES, tile.value)]


def tile_rules(head: str, relpred: str, existpred: str) -> list[str]:
    """The 27 rules for missing tiles and the 27 for forbidden tiles of one relation predicate."""
    out = []
    for t in TILES:
        count = "#count{ X,Y,Z : occ(U,X,Y,Z), " + ", ".join(_tile_region(t)) + " }"
        out.append(f"{head}(U,V) :- {relpred}(U,V,{t.emit_token}), {count} <= 0.")
    for t in TILES:
        count = "#count{ X,Y,Z : occ(U,X,Y,Z), " + ", ".join(_tile_region(t)) + " }"
        out.append(f"{head}(U,V) :- {existpred}(U,V), not {relpred}(U,V,{t.emit_token}), {count} >= 1.")
    return out


def _section(title: str, rules: list[str]) -> list[str]:
    return ["", f"% {title}"] + rules


def emit_program(net: Network, grid: GridSpec, mode: Mode | str = Mode.CHECK, facts: bool = True) -> str:
    """A self-contained program (facts included unless ``facts`` is false)."""
    mode = Mode(mode)
    has_disj = any(isinstance(c.relation, Disjunctive) for c in net.constraints)
    has_default = any(isinstance(c.relation, Default) for c in net.constraints)
    out = [f"% mode: {mode.value}, grid {grid.m}x{grid.n}x{grid.p}"]
    if facts:
        out += [emit_facts(net).rstrip("\n")]
    out += [
        "",
        "#defined relation/3. #defined disjrelation/4. #defined defaultrelation/3.",
        "#defined mandatory/2. #defined toinfer/2. #defined ab/1.",
        f"#const m={grid.m}. #const n={grid.n}. #const p={grid.p}.",
        "xr(1..m). yr(1..n). zr(1..p).",
        "rel(U,V,R) :- relation(U,V,R).",
    ]
    gen = []
    for axis, rng in (("x", "xr"), ("y", "yr"), ("z", "zr")):
        up = axis.upper()
        gen += [
            f"1 {{ inf{axis}(U,{up}) : {rng}({up}) }} 1 :- object(U).",
            f"1 {{ sup{axis}(U,{up}) : {rng}({up}) }} 1 :- object(U).",
            f":- inf{axis}(U,{up}1), sup{axis}(U,{up}2), {up}1 > {up}2.",
        ]
    out += _section("bounding boxes", gen)
    occ = ["1 { occ(U,X,Y,Z) : xr(X), yr(Y), zr(Z) } :- object(U).",
           "xocc(U,X) :- occ(U,X,Y,Z).", "yocc(U,Y) :- occ(U,X,Y,Z).", "zocc(U,Z) :- occ(U,X,Y,Z)."]
    for axis in "xyz":
        up = axis.upper()
        occ += [
            f":- inf{axis}(U,{up}), {axis}occ(U,{up}1), {up}1 < {up}.",
            f":- sup{axis}(U,{up}), {axis}occ(U,{up}1), {up}1 > {up}.",
            f":- inf{axis}(U,{up}), not {axis}occ(U,{up}).",
            f":- sup{axis}(U,{up}), not {axis}occ(U,{up}).",
        ]
    out += _section("occupied cells", occ)
    cls = []
    for axis, rng in (("x", "xr"), ("y", "yr"), ("z", "zr")):
        up = axis.upper()
        cls += [
            f"{axis}cls(V,{up},lo) :- inf{axis}(V,L), {rng}({up}), {up} < L.",
            f"{axis}cls(V,{up},mid) :- inf{axis}(V,L), sup{axis}(V,H), {rng}({up}), L <= {up}, {up} <= H.",
            f"{axis}cls(V,{up},hi) :- sup{axis}(V,H), {rng}({up}), {up} > H.",
        ]
    out += _section("cell classes relative to each bounding box", cls)
    if has_disj:
        out += _section("disjunctive constraints", [
            "disjrel(U,V,I,R) :- disjrelation(U,V,I,R).",
            "existdisj(U,V) :- disjrel(U,V,I,R).",
            "1 { chosen(U,V,I) : disjrel(U,V,I,R) } 1 :- existdisj(U,V).",
            "rel(U,V,R) :- chosen(U,V,I), disjrel(U,V,I,R).",
        ])
    out += _section("direction conditions", ["existrel(U,V) :- rel(U,V,R)."]
                    + tile_rules("violated", "rel", "existrel"))
    if mode is Mode.EXPLAIN:
        out += _section("explanations", [
            ":- violated(U,V), mandatory(U,V), existrel(U,V).",
            ":~ violated(U,V), not mandatory(U,V), existrel(U,V). [1@2,U,V]",
        ])
    else:
        out += _section("hard constraints", [":- violated(U,V), existrel(U,V)."])
    if has_default:
        out += _section("defaults", [
            "defaultrel(U,V,R) :- defaultrelation(U,V,R).",
            "existDefRel(U,V) :- defaultrel(U,V,R).",
            "drel(U,V) :- not -drel(U,V), defaultrel(U,V,R).",
        ] + tile_rules("violatedDef", "defaultrel", "existDefRel") + [
            "-drel(U,V) :- violatedDef(U,V), existDefRel(U,V).",
            ":~ -drel(U,V), existDefRel(U,V). [1@1,U,V]",
            "-drel(U,V) :- ab(V), existDefRel(U,V).",
            "-drel(U,V) :- ab(U), existDefRel(U,V).",
        ])
    if net.connected:
        out += _section("connectedness of target objects", [
            "target(U) :- relation(U,V,R).",
            "target(U) :- disjrelation(U,V,I,R).",
            "target(U) :- defaultrelation(U,V,R).",
            "left_side(U,Y,Z) :- target(U), infx(U,X), occ(U,X,Y,Z).",
            "left_border(U,Y) :- target(U), infx(U,X), occ(U,X,Y,Z).",
            "ymin(U,YM) :- target(U), YM = #min{ Y : left_border(U,Y) }.",
            "zborder(U,Z) :- left_side(U,YM,Z), ymin(U,YM).",
            "zmin(U,ZM) :- target(U), ZM = #min{ Z : zborder(U,Z) }.",
            "stem(U,X,YM,ZM) :- target(U), infx(U,X), ymin(U,YM), zmin(U,ZM).",
            "connset(U,X,Y,Z) :- stem(U,X,Y,Z).",
            "connset(U,X2,Y2,Z2) :- connset(U,X1,Y1,Z1), occ(U,X2,Y2,Z2), "
            "|X2-X1| + |Y2-Y1| + |Z2-Z1| = 1.",
            ":- target(U), occ(U,X,Y,Z), not connset(U,X,Y,Z).",
        ])
    if mode is Mode.INFER:
        out += _section("inferred relations", [
            "#defined drel/2.",
            "known(U,V) :- existrel(U,V).",
            "known(U,V) :- drel(U,V).",
            "1 { infer(U,V,R) : alltiles(R) } :- not known(U,V), toinfer(U,V).",
            "existInfer(U,V) :- infer(U,V,R).",
        ] + tile_rules("inferViolated", "infer", "existInfer") + [
            ":- inferViolated(U,V), existInfer(U,V).",
        ])
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# grammar check

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<directive>\#[a-z]+)
  | (?P<ident>-?[a-z_][A-Za-z0-9_']*)
  | (?P<var>[A-Z][A-Za-z0-9_']*)
  | (?P<num>\d+)
  | (?P<op>:-|:~|\.\.|<=|>=|!=|==|[=<>+\-*/|,;:@(){}\[\].])
""", re.VERBOSE)

_PAIRS = {")": "(", "}": "{", "]": "["}


def syntax_errors(text: str) -> list[str]:
    """Problems found by a lightweight grammar check; an empty list means well-formed."""
    errors = []
    stack: list[str] = []
    pos = 0
    statement: list[tuple[str, str]] = []
    line = 1
    weight: list[str] | None = None
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            errors.append(f"line {line}: unexpected character {text[pos]!r}")
            pos += 1
            continue
        kind, tok = m.lastgroup, m.group()
        line += tok.count("\n")
        pos = m.end()
        if kind in ("ws", "comment"):
            continue
        if weight is not None:
            if not weight and tok != "[":
                errors.append(f"line {line}: weak constraint without a weight")
                weight = None
            else:
                weight.append(tok)
                if tok == "]":
                    if "@" not in weight:
                        errors.append(f"line {line}: weak constraint without a priority level")
                    weight = None
                continue
        if tok in "({[":
            stack.append(tok)
        elif tok in _PAIRS:
            if not stack or stack.pop() != _PAIRS[tok]:
                errors.append(f"line {line}: unbalanced {tok!r}")
        if tok == "." and not stack:
            if not statement:
                errors.append(f"line {line}: empty statement")
            elif statement[0][1] == ":~":
                weight = []
            statement = []
            continue
        statement.append((kind, tok))
    if stack:
        errors.append("unclosed bracket at end of input")
    if statement:
        errors.append("last statement does not end with '.'")
    if weight is not None:
        errors.append("weak constraint without a weight")
    return errors


# ---------------------------------------------------------------------------
# decoding


class DecodeError(ValueError):
    pass


class MalformedAtom(DecodeError):
    def __init__(self, atom: str):
        super().__init__(f"malformed atom {atom!r}")
        self.atom = atom


class MissingObject(DecodeError):
    def __init__(self, ident: int):
        super().__init__(f"no occ atoms for object {ident}")
        self.ident = ident


class OutOfGrid(DecodeError):
    def __init__(self, atom: str):
        super().__init__(f"cell outside the grid in {atom!r}")
        self.atom = atom


_ATOM = re.compile(r"(-?[a-z][A-Za-z0-9_]*)(?:\(([^()]*)\))?")
_DECODED = {"occ": 4, "violated": 2, "drel": 2, "-drel": 2}


def _ints(atom: str, args: str | None, arity: int) -> list[int]:
    parts = [] if args is None else args.split(",")
    if len(parts) != arity or not all(re.fullmatch(r"-?\d+", p.strip()) for p in parts):
        raise MalformedAtom(atom)
    return [int(p) for p in parts]


def decode_answer_set(text: str, net: Network, grid: GridSpec) -> Solution:
    """Rebuild a :class:`Solution` from the atoms of one answer set."""
    num = ObjectNumbering.of(net)
    k = len(net.objects)
    cells: dict[int, set[tuple[int, int, int]]] = {i: set() for i in range(1, k + 1)}
    violated: set[Pair] = set()
    negated: set[Pair] = set()
    for tok in text.split():
        tok = tok.removesuffix(".")
        head = re.match(r"-?[a-z][A-Za-z0-9_]*", tok)
        if head is None or head.group() not in _DECODED:
            continue
        m = _ATOM.fullmatch(tok)
        if m is None:
            raise MalformedAtom(tok)
        name, args = m.group(1), m.group(2)
        values = _ints(tok, args, _DECODED[name])
        if any(not 1 <= i <= k for i in values[:1 if name == "occ" else 2]):
            raise MalformedAtom(tok)
        if name == "occ":
            cell = tuple(values[1:])
            if not grid.contains(cell):
                raise OutOfGrid(tok)
            cells[values[0]].add(cell)
        elif name == "violated":
            violated.add((num.name_of(values[0]), num.name_of(values[1])))
        elif name == "-drel":
            negated.add((num.name_of(values[0]), num.name_of(values[1])))
    for i in range(1, k + 1):
        if not cells[i]:
            raise MissingObject(i)
    hard = {c.pair for c in net.hard_constraints}
    violated &= hard
    default_pairs = {c.pair for c in net.defaults}
    dropped = frozenset(negated & default_pairs)
    ab = {p for p in dropped if p[0] in net.ab_marks or p[1] in net.ab_marks}
    assignment = {num.name_of(i): SpatialObject(frozenset(cs)) for i, cs in cells.items()}
    return Solution(grid, assignment, dropped, frozenset(violated), (len(violated), len(dropped - ab)))


# ---------------------------------------------------------------------------
# optional external solving


def solve_external(program: str, timeout: float | None = None) -> tuple[str, list[int]] | None:
    """Solve with the ``clingo`` Python module; the last (optimal) model's atoms and cost, or ``None``."""
    try:
        import clingo
    except ImportError as err:  # pragma: no cover - depends on the environment
        raise RuntimeError("external solving needs the 'clingo' package") from err
    ctl = clingo.Control(["--opt-mode=opt", "--warn=none"])
    ctl.add("base", [], program)
    ctl.ground([("base", [])])
    best: list = []

    def on_model(model) -> None:
        best[:] = [" ".join(str(s) for s in model.symbols(atoms=True)), list(model.cost)]

    with ctl.solve(on_model=on_model, async_=True) as handle:
        finished = handle.wait(timeout if timeout is not None else -1)
        if not finished:
            handle.cancel()
            raise TimeoutError("external solver timed out")
        handle.get()
    if not best:
        return None
    return best[0], best[1]


__all__ = [
    "DecodeError", "MalformedAtom", "MissingObject", "Mode", "ObjectNumbering", "OutOfGrid",
    "decode_answer_set", "emit_facts", "emit_program", "fact_set", "solve_external", "syntax_errors",
    "tile_rules",
]
