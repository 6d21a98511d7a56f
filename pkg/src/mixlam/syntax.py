r"""Surface syntax: parsing and printing for terms and formulas.

Terms:      ``\x. t`` abstraction (multi-binder ``\x y. t`` allowed),
            juxtaposition application (left-associative), ``C`` the control
            constant, ``#p`` stack constants, ``mu a.[b] t`` for naming.
Formulas:   ``_|_``, ``A -> B`` (right-associative), ``~A`` for ``A -> _|_``,
            ``forall x A`` / ``forall X A`` / ``forall Xc A``, atoms
            ``P(t1,...,tn)``.  ``N[t]``, ``N*[t]``, ``Nc[t]``, ``N``, ``N*``
            and ``Nc`` abbreviate the integer types.

Identifier conventions (documented, not negotiable at parse time): lowercase
initial means first-order; uppercase initial means predicate position, where
names starting with X/Y/Z are predicate variables, a trailing ``c`` on such a
name marks the classical twin (``Xc``), and anything else (``O``, ``D``...)
is a predicate symbol.  First-order integer literals abbreviate ``s(...s(0))``.
"""

from __future__ import annotations

import string

from .formulas import (
    Arrow,
    Atom,
    Bottom,
    ClassVar,
    Const,
    FoTerm,
    Formula,
    ForallClass,
    ForallFo,
    ForallSo,
    FunApp,
    FoVar,
    PredSym,
    PredVar,
    arrows,
    nat_type,
    nat_type_classical,
    nat_type_godel,
    prop_nat,
    prop_nat_classical,
    prop_nat_godel,
)
from .terms import App, C, ConstC, Lam, Mu, StackConst, Term, Var


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


_IDENT_START = set(string.ascii_letters)
_IDENT_CONT = set(string.ascii_letters + string.digits + "_'*")
_PUNCT = {"(": "(", ")": ")", ".": ".", ",": ",", "[": "[", "]": "]", "=": "="}


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    """Yield (kind, value, line, col) tokens; kinds are punctuation strings,
    'ident', 'int', 'lambda', 'hash', 'arrow', 'bottom', 'tilde'."""
    toks = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == ";":  # comment to end of line
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("->", i):
            toks.append(("arrow", "->", line, col))
            i += 2
            col += 2
            continue
        if text.startswith("_|_", i):
            toks.append(("bottom", "_|_", line, col))
            i += 3
            col += 3
            continue
        if ch == "\\":
            toks.append(("lambda", "\\", line, col))
            i += 1
            col += 1
            continue
        if ch == "#":
            toks.append(("hash", "#", line, col))
            i += 1
            col += 1
            continue
        if ch == "~":
            toks.append(("tilde", "~", line, col))
            i += 1
            col += 1
            continue
        if ch in _PUNCT:
            toks.append((ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in _IDENT_START:
            j = i
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            toks.append(("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(("eof", "", line, col))
    return toks


class _Tokens:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int, int]:
        return self.toks[self.pos]

    def next(self) -> tuple[str, str, int, int]:
        t = self.toks[self.pos]
        if t[0] != "eof":
            self.pos += 1
        return t

    def expect(self, kind: str) -> tuple[str, str, int, int]:
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[1]!r}", t[2], t[3])
        return t

    def error(self, message: str):
        t = self.peek()
        raise ParseError(message, t[2], t[3])


# ---------------------------------------------------------------------------
# Terms

def parse_term(text: str) -> Term:
    ts = _Tokens(text)
    t = _parse_term(ts)
    ts.expect("eof")
    return t


def _parse_term(ts: _Tokens) -> Term:
    kind, val, _, _ = ts.peek()
    if kind == "lambda":
        ts.next()
        binders = []
        while ts.peek()[0] == "ident":
            binders.append(ts.next()[1])
        if not binders:
            ts.error("expected binder after '\\'")
        ts.expect(".")
        body = _parse_term(ts)
        for b in reversed(binders):
            body = Lam(b, body)
        return body
    if kind == "ident" and val == "mu":
        ts.next()
        binder = ts.expect("ident")[1]
        ts.expect(".")
        ts.expect("[")
        named = ts.expect("ident")[1]
        ts.expect("]")
        body = _parse_term(ts)
        return Mu(binder, named, body)
    return _parse_app(ts)


def _parse_app(ts: _Tokens) -> Term:
    t = _parse_atom(ts)
    while True:
        kind, val, _, _ = ts.peek()
        if kind in ("(", "hash") or kind == "lambda" or (kind == "ident" and val != "mu"):
            t = App(t, _parse_atom(ts))
        elif kind == "ident" and val == "mu":
            t = App(t, _parse_term(ts))
        else:
            return t


def _parse_atom(ts: _Tokens) -> Term:
    kind, val, line, col = ts.peek()
    if kind == "(":
        ts.next()
        t = _parse_term(ts)
        ts.expect(")")
        return t
    if kind == "hash":
        ts.next()
        name = ts.expect("ident")[1]
        return StackConst(name)
    if kind == "lambda":
        return _parse_term(ts)
    if kind == "ident":
        ts.next()
        if val == "C":
            return C
        if val == "mu":
            raise ParseError("mu-term must be parenthesised in argument position", line, col)
        return Var(val)
    ts.error(f"unexpected token {val!r} in term")


def print_term(t: Term) -> str:
    match t:
        case Var(x):
            return x
        case ConstC():
            return "C"
        case StackConst(p):
            return f"#{p}"
        case Lam(x, b):
            binders = [x]
            while isinstance(b, Lam):
                binders.append(b.binder)
                b = b.body
            return f"\\{' '.join(binders)}. {print_term(b)}"
        case App(f, a):
            fs = print_term(f)
            if isinstance(f, (Lam, Mu)):
                fs = f"({fs})"
            as_ = print_term(a)
            if isinstance(a, (App, Lam, Mu)):
                as_ = f"({as_})"
            return f"{fs} {as_}"
        case Mu(g, d, b):
            return f"mu {g}.[{d}] {print_term(b)}"
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# First-order terms

def parse_fo_term(text: str) -> FoTerm:
    ts = _Tokens(text)
    t = _parse_fo(ts)
    ts.expect("eof")
    return t


def _int_to_term(n: int) -> FoTerm:
    t: FoTerm = Const("0")
    for _ in range(n):
        t = FunApp("s", (t,))
    return t


def _parse_fo(ts: _Tokens) -> FoTerm:
    kind, val, line, col = ts.next()
    if kind == "int":
        return _int_to_term(int(val))
    if kind != "ident":
        raise ParseError(f"expected first-order term, found {val!r}", line, col)
    if not val[0].islower():
        raise ParseError(f"first-order symbols are lowercase, found {val!r}", line, col)
    if ts.peek()[0] == "(":
        ts.next()
        args = [_parse_fo(ts)]
        while ts.peek()[0] == ",":
            ts.next()
            args.append(_parse_fo(ts))
        ts.expect(")")
        return FunApp(val, tuple(args))
    return FoVar(val)


def print_fo_term(t: FoTerm) -> str:
    match t:
        case FoVar(x):
            return x
        case Const(c):
            return c
        case FunApp(f, args):
            return f"{f}({', '.join(print_fo_term(a) for a in args)})"
    raise TypeError(f"not a first-order term: {t!r}")


# ---------------------------------------------------------------------------
# Formulas

_NAT_ABBREVS = {
    "N": (nat_type, prop_nat),
    "N*": (nat_type_godel, prop_nat_godel),
    "Nc": (nat_type_classical, prop_nat_classical),
}


def _classify_pred(name: str):
    if name[0] in "XYZ":
        if len(name) > 1 and name.endswith("c") and "*" not in name:
            return ClassVar(name[:-1])
        return PredVar(name)
    return PredSym(name)


def parse_formula(text: str) -> Formula:
    ts = _Tokens(text)
    f = _parse_formula(ts)
    ts.expect("eof")
    return f


def _parse_formula(ts: _Tokens) -> Formula:
    kind, val, _, _ = ts.peek()
    if kind == "ident" and val == "forall":
        ts.next()
        name_tok = ts.expect("ident")
        name, line, col = name_tok[1], name_tok[2], name_tok[3]
        body = _parse_formula(ts)
        if name[0].islower():
            return ForallFo(name, body)
        pred = _classify_pred(name)
        if isinstance(pred, ClassVar):
            return ForallClass(pred.name, body)
        if isinstance(pred, PredVar):
            return ForallSo(pred.name, body)
        raise ParseError(f"cannot quantify over predicate symbol {name!r}", line, col)
    return _parse_arrow(ts)


def _parse_arrow(ts: _Tokens) -> Formula:
    lhs = _parse_formula_atom(ts)
    if ts.peek()[0] == "arrow":
        ts.next()
        return Arrow(lhs, _parse_formula(ts))
    return lhs


def _parse_formula_atom(ts: _Tokens) -> Formula:
    kind, val, line, col = ts.peek()
    if kind == "bottom":
        ts.next()
        return Bottom()
    if kind == "tilde":
        ts.next()
        return Arrow(_parse_formula_atom(ts), Bottom())
    if kind == "(":
        ts.next()
        f = _parse_formula(ts)
        ts.expect(")")
        return f
    if kind == "ident":
        if val in _NAT_ABBREVS:
            ts.next()
            indexed, propositional = _NAT_ABBREVS[val]
            if ts.peek()[0] == "[":
                ts.next()
                idx = _parse_fo(ts)
                ts.expect("]")
                return indexed(idx)
            return propositional()
        if val[0].islower():
            ts.error(f"predicate names start uppercase, found {val!r}")
        ts.next()
        pred = _classify_pred(val)
        args: tuple[FoTerm, ...] = ()
        if ts.peek()[0] == "(":
            ts.next()
            lst = [_parse_fo(ts)]
            while ts.peek()[0] == ",":
                ts.next()
                lst.append(_parse_fo(ts))
            ts.expect(")")
            args = tuple(lst)
        return Atom(pred, args)
    ts.error(f"unexpected token {val!r} in formula")


def print_pred(p) -> str:
    match p:
        case PredVar(n):
            return n
        case ClassVar(n):
            return f"{n}c"
        case PredSym(n):
            return n
    raise TypeError(f"not a predicate: {p!r}")


def print_formula(f: Formula) -> str:
    match f:
        case Bottom():
            return "_|_"
        case Atom(p, args):
            if args:
                return f"{print_pred(p)}({', '.join(print_fo_term(a) for a in args)})"
            return print_pred(p)
        case Arrow(a, Bottom()):
            s = print_formula(a)
            if isinstance(a, (Arrow, ForallFo, ForallSo, ForallClass)):
                s = f"({s})"
            return f"~{s}"
        case Arrow(a, b):
            ls = print_formula(a)
            if isinstance(a, (Arrow, ForallFo, ForallSo, ForallClass)) and not (
                isinstance(a, Arrow) and isinstance(a.rhs, Bottom)
            ):
                ls = f"({ls})"
            return f"{ls} -> {print_formula(b)}"
        case ForallFo(x, b):
            return f"forall {x} {print_formula(b)}"
        case ForallSo(x, b):
            return f"forall {x} {print_formula(b)}"
        case ForallClass(x, b):
            return f"forall {x}c {print_formula(b)}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Equation files: one ``lhs = rhs`` per line

def parse_equations(text: str) -> tuple[tuple[FoTerm, FoTerm], ...]:
    eqs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";")[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'lhs = rhs'", lineno, 1)
        lhs_text, rhs_text = line.split("=", 1)
        try:
            lhs = parse_fo_term(lhs_text.strip())
            rhs = parse_fo_term(rhs_text.strip())
        except ParseError as e:
            raise ParseError(f"in equation: {e}", lineno, 1) from None
        eqs.append((lhs, rhs))
    return tuple(eqs)


def print_equations(eqs) -> str:
    return "\n".join(f"{print_fo_term(l)} = {print_fo_term(r)}" for l, r in eqs) + "\n"
