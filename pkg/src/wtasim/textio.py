"""Reading and writing automata, trees and matrices as text.

Automaton files::

    wta {
      semiring int            # bool | nat | int | rat
      symbol sigma 2
      symbol alpha 0
      state q0
      state q1
      final q0 : 1            # omitted finals are 0
      trans alpha () -> q1 : 1
      trans sigma (q1, q1) -> q0 : 2
    }

Matrix files list one row per line, values in the column state order::

    matrix {
      cols p0 p1              # optional; must match the column order
      row q0 : 1 0
      row q1 : 0 1            # omitted rows are 0
    }

Trees are written ``sigma(alpha, sigma(alpha, alpha))``; a nullary symbol
may be written ``alpha`` or ``alpha()``.
"""

from __future__ import annotations

import re
from typing import Hashable, Optional

from .errors import CarrierError, ParseError, WtaError
from .linalg import IndexSet, Matrix
from .semiring import Semiring, get_semiring
from .wta import RankedAlphabet, Tree, Wta

NAME_RE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.'!]*\Z")
_TOKEN_RE = re.compile(r"->|[(){},:]|(?:(?!->)[^\s(){},:#])+")


def _tokens(line: str, lineno: int) -> list[tuple[str, int, int]]:
    """``(token, line, column)`` triples; everything after ``#`` is dropped."""
    body = line.split("#", 1)[0]
    out = []
    pos = 0
    while True:
        while pos < len(body) and body[pos].isspace():
            pos += 1
        if pos >= len(body):
            return out
        m = _TOKEN_RE.match(body, pos)
        if m is None:
            raise ParseError(f"unexpected character {body[pos]!r}", lineno, pos + 1)
        out.append((m.group(), lineno, pos + 1))
        pos = m.end()


class _Cursor:
    def __init__(self, toks: list, lineno: int, line_len: int):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.end_col = line_len + 1

    def peek(self) -> Optional[str]:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def where(self) -> tuple[int, int]:
        if self.i < len(self.toks):
            return self.toks[self.i][1], self.toks[self.i][2]
        return self.lineno, self.end_col

    def fail(self, message: str):
        raise ParseError(message, *self.where())

    def take(self, expected: Optional[str] = None) -> tuple[str, int, int]:
        if self.i >= len(self.toks):
            self.fail(f"expected {expected!r}" if expected else "unexpected end of line")
        tok = self.toks[self.i]
        if expected is not None and tok[0] != expected:
            self.fail(f"expected {expected!r}, found {tok[0]!r}")
        self.i += 1
        return tok

    def name(self, what: str) -> tuple[str, int, int]:
        tok = self.take()
        if not NAME_RE.match(tok[0]):
            raise ParseError(f"invalid {what} name {tok[0]!r}", tok[1], tok[2])
        return tok

    def done(self):
        if self.i < len(self.toks):
            self.fail(f"unexpected {self.toks[self.i][0]!r}")


def _value(sr: Semiring, tok: tuple[str, int, int]):
    try:
        return sr.parse_value(tok[0])
    except CarrierError as exc:
        raise CarrierError(f"line {tok[1]}, column {tok[2]}: {exc}") from None


def _lines(text: str, kind: str):
    """Yield a cursor per non-empty statement line of a ``kind { ... }`` block."""
    opened = closed = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line, lineno)
        if not toks:
            continue
        if closed:
            raise ParseError(f"content after the closing brace of {kind}", toks[0][1], toks[0][2])
        if not opened:
            cur = _Cursor(toks, lineno, len(line))
            cur.take(kind)
            cur.take("{")
            opened = True
            if cur.peek() is None:
                continue
            toks = toks[cur.i:]
        if toks[-1][0] == "}":
            closed = True
            toks = toks[:-1]
            if not toks:
                continue
        yield _Cursor(toks, lineno, len(line))
    if not opened:
        raise ParseError(f"expected '{kind} {{'", 1, 1)
    if not closed:
        raise ParseError(f"missing closing brace of {kind}", lineno if text else 1, 1)


def parse_wta(text: str) -> Wta:
    sr: Optional[Semiring] = None
    symbols: dict[str, int] = {}
    states: list[str] = []
    finals: dict[str, object] = {}
    trans: dict[tuple, object] = {}

    def need_semiring(cur: _Cursor):
        if sr is None:
            cur.fail("the semiring must be declared before any weight")

    for cur in _lines(text, "wta"):
        kw = cur.take()
        if kw[0] == "semiring":
            if sr is not None:
                raise ParseError("duplicate semiring declaration", kw[1], kw[2])
            tok = cur.name("semiring")
            try:
                sr = get_semiring(tok[0])
            except WtaError as exc:
                raise ParseError(str(exc), tok[1], tok[2]) from None
        elif kw[0] == "symbol":
            tok = cur.name("symbol")
            if tok[0] in symbols:
                raise ParseError(f"duplicate symbol {tok[0]!r}", tok[1], tok[2])
            rank_tok = cur.take()
            if not rank_tok[0].isdigit():
                raise ParseError(f"rank must be a natural number, found {rank_tok[0]!r}",
                                 rank_tok[1], rank_tok[2])
            symbols[tok[0]] = int(rank_tok[0])
        elif kw[0] == "state":
            tok = cur.name("state")
            if tok[0] in states:
                raise ParseError(f"duplicate state {tok[0]!r}", tok[1], tok[2])
            states.append(tok[0])
        elif kw[0] == "final":
            need_semiring(cur)
            tok = cur.name("state")
            if tok[0] not in states:
                raise ParseError(f"unknown state {tok[0]!r}", tok[1], tok[2])
            if tok[0] in finals:
                raise ParseError(f"duplicate final weight for {tok[0]!r}", tok[1], tok[2])
            cur.take(":")
            finals[tok[0]] = _value(sr, cur.take())
        elif kw[0] == "trans":
            need_semiring(cur)
            sym = cur.name("symbol")
            if sym[0] not in symbols:
                raise ParseError(f"unknown symbol {sym[0]!r}", sym[1], sym[2])
            cur.take("(")
            children = []
            if cur.peek() != ")":
                while True:
                    tok = cur.name("state")
                    if tok[0] not in states:
                        raise ParseError(f"unknown state {tok[0]!r}", tok[1], tok[2])
                    children.append(tok[0])
                    if cur.peek() == ",":
                        cur.take(",")
                        continue
                    break
            cur.take(")")
            if len(children) != symbols[sym[0]]:
                raise ParseError(
                    f"symbol {sym[0]!r} has rank {symbols[sym[0]]} but the transition lists "
                    f"{len(children)} children", sym[1], sym[2])
            cur.take("->")
            tgt = cur.name("state")
            if tgt[0] not in states:
                raise ParseError(f"unknown state {tgt[0]!r}", tgt[1], tgt[2])
            cur.take(":")
            key = (sym[0], tuple(children), tgt[0])
            if key in trans:
                raise ParseError("duplicate transition", kw[1], kw[2])
            trans[key] = _value(sr, cur.take())
        else:
            raise ParseError(f"unknown statement {kw[0]!r}", kw[1], kw[2])
        cur.done()
    if sr is None:
        raise ParseError("missing semiring declaration", 1, 1)
    return Wta.build(sr, RankedAlphabet(list(symbols.items())), states, trans, finals)


def label_names(labels) -> list[str]:
    """Printable, distinct names for state labels (tuples are joined with dots)."""
    def name(x) -> str:
        if isinstance(x, tuple):
            return ".".join(name(y) for y in x)
        return str(x)

    names = [name(x) for x in labels]
    if len(set(names)) != len(names) or not all(NAME_RE.match(n) for n in names):
        names = [f"s{i}" for i in range(len(names))]
    return names


def print_wta(M: Wta) -> str:
    sr = M.semiring
    fmt = sr.format_value
    names = dict(zip(M.states, label_names(M.states)))
    out = ["wta {", f"  semiring {sr.name}"]
    out += [f"  symbol {s} {k}" for s, k in M.alphabet.items()]
    out += [f"  state {names[q]}" for q in M.states]
    out += [f"  final {names[q]} : {fmt(v)}" for q, v in zip(M.states, M.final.data) if v != 0]
    for s, w, q, x in M.nonzero_transitions():
        children = ", ".join(names[c] for c in w)
        out.append(f"  trans {s} ({children}) -> {names[q]} : {fmt(x)}")
    out.append("}")
    return "\n".join(out) + "\n"


def parse_tree(text: str, alphabet: Optional[RankedAlphabet] = None) -> Tree:
    toks = _tokens(text, 1)
    cur = _Cursor(toks, 1, len(text))
    # explicit stack so that deep trees do not hit the recursion limit
    stack: list[tuple[str, tuple, list]] = []
    result = None
    while True:
        tok = cur.name("symbol")
        if alphabet is not None and tok[0] not in alphabet:
            raise ParseError(f"unknown symbol {tok[0]!r}", tok[1], tok[2])
        if cur.peek() == "(":
            cur.take("(")
            if cur.peek() == ")":
                cur.take(")")
                node = Tree(tok[0])
            else:
                stack.append((tok[0], tok, []))
                continue
        else:
            node = Tree(tok[0])
        if alphabet is not None and alphabet.rank(tok[0]) != 0:
            raise ParseError(f"symbol {tok[0]!r} has rank {alphabet.rank(tok[0])} "
                             "but no children", tok[1], tok[2])
        # attach finished node, closing parents as needed
        while True:
            if not stack:
                result = node
                break
            stack[-1][2].append(node)
            if cur.peek() == ",":
                cur.take(",")
                break
            cur.take(")")
            sym, stok, kids = stack.pop()
            if alphabet is not None and alphabet.rank(sym) != len(kids):
                raise ParseError(f"symbol {sym!r} has rank {alphabet.rank(sym)} "
                                 f"but {len(kids)} children", stok[1], stok[2])
            node = Tree(sym, kids)
        if result is not None:
            break
    cur.done()
    return result


def parse_matrix(text: str, rows: IndexSet, cols: IndexSet, semiring: Semiring) -> Matrix:
    row_names = dict(zip(label_names(rows), rows))
    col_names = label_names(cols)
    entries: dict[Hashable, list] = {}
    for cur in _lines(text, "matrix"):
        kw = cur.take()
        if kw[0] == "cols":
            given = []
            while cur.peek() is not None:
                given.append(cur.name("state")[0])
            if given != col_names:
                raise ParseError(f"column header {given} does not match the state order "
                                 f"{col_names}", kw[1], kw[2])
            continue
        if kw[0] != "row":
            raise ParseError(f"unknown statement {kw[0]!r}", kw[1], kw[2])
        tok = cur.name("state")
        if tok[0] not in row_names:
            raise ParseError(f"unknown row state {tok[0]!r}", tok[1], tok[2])
        label = row_names[tok[0]]
        if label in entries:
            raise ParseError(f"duplicate row {tok[0]!r}", tok[1], tok[2])
        cur.take(":")
        values = []
        while cur.peek() is not None:
            values.append(_value(semiring, cur.take()))
        if len(values) != len(cols):
            raise ParseError(f"row {tok[0]!r} has {len(values)} entries, expected {len(cols)}",
                             tok[1], tok[2])
        entries[label] = values
    data = [entries.get(r, [semiring.zero] * len(cols)) for r in rows]
    return Matrix(rows, cols, data, semiring)


def print_matrix(X: Matrix) -> str:
    fmt = X.semiring.format_value
    out = ["matrix {"]
    if len(X.cols):
        out.append("  cols " + " ".join(label_names(X.cols)))
    for name, row in zip(label_names(X.rows), X.data):
        out.append(f"  row {name} : " + " ".join(fmt(x) for x in row))
    out.append("}")
    return "\n".join(out) + "\n"
