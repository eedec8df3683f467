"""Reader and writer for the line-oriented ``.ncdc`` network format.

::

    # marine exploration
    objects SedRock Marsh
    rel Marsh SedRock SWB:SEB
    disj Panel Entrance NM | NB
    default Heating Entrance SWB
    mandatory Panel Entrance
    infer Fungi SedRock
    ab Entrance
    connected
    grid 9 9 9

Tile tokens are case-insensitive on input and written in upper case.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    Basic,
    BasicRelation,
    Constraint,
    Default,
    Disjunctive,
    GridSpec,
    Network,
    NetworkError,
    Tile,
    validate_network,
)

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_TOKEN_RE = re.compile(r"\||[^\s|]+")
KEYWORDS = ("objects", "rel", "disj", "default", "mandatory", "infer", "ab", "connected", "grid")


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan, expected: tuple[str, ...] = ()):
        self.message = message
        self.span = span
        self.expected = expected
        detail = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{span}: {message}{detail}")


@dataclass(frozen=True)
class _Tok:
    text: str
    span: SourceSpan


def _tokens(line: str, lineno: int) -> list[_Tok]:
    return [_Tok(m.group(), SourceSpan(lineno, m.start() + 1)) for m in _TOKEN_RE.finditer(line)]


def _name(tok: _Tok) -> str:
    if tok.text == "|" or not NAME_RE.match(tok.text):
        raise ParseError(f"invalid object name {tok.text!r}", tok.span, ("identifier",))
    return tok.text


def _relation(tok: _Tok) -> BasicRelation:
    parts = tok.text.split(":")
    tiles = []
    col = tok.span.column
    for part in parts:
        try:
            tiles.append(Tile.parse(part))
        except ValueError:
            raise ParseError(f"unknown tile token {part!r}", SourceSpan(tok.span.line, col),
                             ("tile token such as NM or SWB",)) from None
        col += len(part) + 1
    if len(set(tiles)) != len(tiles):
        raise ParseError(f"repeated tile in {tok.text!r}", tok.span)
    return BasicRelation(frozenset(tiles))


def _arity(toks: list[_Tok], n: int, what: str, lineno: int, line: str) -> None:
    if len(toks) - 1 < n:
        end = SourceSpan(lineno, len(line.rstrip()) + 1)
        raise ParseError(f"'{toks[0].text}' needs {what}", end, (what,))
    if len(toks) - 1 > n:
        raise ParseError(f"unexpected token {toks[n + 1].text!r}", toks[n + 1].span, ("end of line",))


def parse_network(text: str) -> Network:
    """Parse ``.ncdc`` text into a validated :class:`Network`."""
    declared: list[str] = []
    seen_names: list[str] = []
    constraints: list[Constraint] = []
    mandatory: list[tuple[tuple[str, str], SourceSpan]] = []
    ab: set[str] = set()
    infer: list[tuple[str, str]] = []
    connected = False
    grid: GridSpec | None = None
    spans: dict[tuple[str, str], SourceSpan] = {}

    def mention(name: str) -> None:
        if name not in seen_names:
            seen_names.append(name)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip("\r")
        toks = _tokens(line, lineno)
        if not toks:
            continue
        head = toks[0]
        kw = head.text
        if kw not in KEYWORDS:
            raise ParseError(f"unknown statement {kw!r}", head.span, KEYWORDS)
        if kw == "objects":
            if len(toks) < 2:
                raise ParseError("'objects' needs at least one name",
                                 SourceSpan(lineno, len(line) + 1), ("identifier",))
            for tok in toks[1:]:
                name = _name(tok)
                if name in declared:
                    raise ParseError(f"object {name!r} declared twice", tok.span)
                declared.append(name)
        elif kw in ("rel", "default"):
            _arity(toks, 3, "target, reference and tiles", lineno, line)
            t, r = _name(toks[1]), _name(toks[2])
            rel = _relation(toks[3])
            mention(t)
            mention(r)
            wrapped = Basic(rel) if kw == "rel" else Default(rel)
            constraints.append(Constraint(t, r, wrapped))
            spans[(t, r)] = head.span
        elif kw == "disj":
            if len(toks) < 4:
                raise ParseError("'disj' needs target, reference and disjuncts",
                                 SourceSpan(lineno, len(line) + 1), ("tiles",))
            t, r = _name(toks[1]), _name(toks[2])
            rest = toks[3:]
            disjuncts = []
            expect_rel = True
            for tok in rest:
                if expect_rel:
                    if tok.text == "|":
                        raise ParseError("empty disjunct", tok.span, ("tiles",))
                    disjuncts.append(_relation(tok))
                elif tok.text != "|":
                    raise ParseError(f"unexpected token {tok.text!r}", tok.span, ("|",))
                expect_rel = not expect_rel
            if expect_rel:
                raise ParseError("trailing '|'", rest[-1].span, ("tiles",))
            if len(disjuncts) < 2:
                raise ParseError("a disjunctive relation needs at least two disjuncts",
                                 SourceSpan(lineno, len(line) + 1), ("|",))
            mention(t)
            mention(r)
            constraints.append(Constraint(t, r, Disjunctive(tuple(disjuncts))))
            spans[(t, r)] = head.span
        elif kw in ("mandatory", "infer"):
            _arity(toks, 2, "target and reference", lineno, line)
            pair = (_name(toks[1]), _name(toks[2]))
            mention(pair[0])
            mention(pair[1])
            if kw == "mandatory":
                mandatory.append((pair, head.span))
            elif pair not in infer:
                infer.append(pair)
        elif kw == "ab":
            _arity(toks, 1, "an object name", lineno, line)
            name = _name(toks[1])
            mention(name)
            ab.add(name)
        elif kw == "connected":
            _arity(toks, 0, "nothing", lineno, line)
            connected = True
        elif kw == "grid":
            _arity(toks, 3, "three dimensions", lineno, line)
            dims = []
            for tok in toks[1:]:
                if not re.fullmatch(r"[+-]?\d+", tok.text) or int(tok.text) < 1:
                    raise ParseError(f"grid dimension must be a positive integer, got {tok.text!r}",
                                     tok.span, ("positive integer",))
                dims.append(int(tok.text))
            if grid is not None:
                raise ParseError("grid given twice", head.span)
            grid = GridSpec(*dims)

    for pair, span in mandatory:
        for i, c in enumerate(constraints):
            if c.pair == pair and not c.is_default:
                constraints[i] = Constraint(c.target, c.reference, c.relation, True)
                break
        else:
            raise ParseError(f"'mandatory {pair[0]} {pair[1]}' has no rel/disj constraint", span)

    objects = list(declared) + [n for n in seen_names if n not in declared]
    net = Network(tuple(objects), tuple(constraints), frozenset(ab), tuple(infer), connected, grid)
    try:
        return validate_network(net)
    except NetworkError as err:
        first = err.issues[0]
        span = spans.get(tuple(first.subject[:2]), SourceSpan(1, 1)) if len(first.subject) == 2 \
            else SourceSpan(1, 1)
        raise ParseError(f"invalid network: {err}", span) from err


def serialize_network(net: Network) -> str:
    """Canonical text; ``parse_network(serialize_network(n)) == n``."""
    lines = ["objects " + " ".join(net.objects)]
    for c in net.constraints:
        rel = c.relation
        if isinstance(rel, Basic):
            lines.append(f"rel {c.target} {c.reference} {rel.relation.token}")
        elif isinstance(rel, Default):
            lines.append(f"default {c.target} {c.reference} {rel.relation.token}")
        else:
            alts = " | ".join(d.token for d in rel.disjuncts)
            lines.append(f"disj {c.target} {c.reference} {alts}")
    lines += [f"mandatory {c.target} {c.reference}" for c in net.constraints if c.mandatory]
    lines += [f"ab {name}" for name in net.objects if name in net.ab_marks]
    lines += [f"infer {u} {v}" for u, v in net.infer_requests]
    if net.connected:
        lines.append("connected")
    if net.grid is not None:
        lines.append(f"grid {net.grid.m} {net.grid.n} {net.grid.p}")
    return "\n".join(lines) + "\n"


def load_network(path) -> Network:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_network(fh.read())

