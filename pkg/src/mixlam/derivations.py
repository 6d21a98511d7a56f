"""Explicit typing derivations and their checker.

A derivation is a tree with one node per rule application; every quantifier
instantiation carries its witness and every equational step names the
equation, the substitution instance, the rewrite position and the direction.
The checker validates each node against its system's rule set; there is no
inference.

Systems: AF2 (rules 1-8), C2 (adds the ordinary control axiom), M2 (adds the
classical control axiom and classical generalisation/instantiation), M (the
propositional restriction of M2), FD2 (AF2 plus the mu-naming rule, sequents
with a mu-context).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .formulas import (
    Arrow,
    Atom,
    Bottom,
    BOT,
    ClassVar,
    EquationSet,
    FoTerm,
    Formula,
    ForallClass,
    ForallFo,
    ForallSo,
    FunApp,
    PredAbs,
    PredVar,
    _pred_arity,
    class_subst,
    double_neg_elim_classical,
    double_neg_elim_ordinary,
    fo_subst,
    fo_subst_term,
    formula_class_vars,
    formula_fo_vars,
    formula_pred_vars,
    is_classical_type,
    so_subst,
)
from .terms import App, ConstC, Lam, Mu, Term, Var, alpha_eq, free_vars


class Rule(str, Enum):
    AX = "Ax"
    ARR_INTRO = "ArrIntro"
    ARR_ELIM = "ArrElim"
    FO_GEN = "FoGen"
    FO_INST = "FoInst"
    SO_GEN = "SoGen"
    SO_INST = "SoInst"
    EQ = "Eq"
    C_AXIOM = "CAxiom"
    CLASS_GEN = "ClassGen"
    CLASS_INST = "ClassInst"
    MU_NAMING = "MuNaming"


class Reason(str, Enum):
    BAD_WITNESS = "BadWitness"
    SIDE_CONDITION_VIOLATED = "SideConditionViolated"
    WRONG_SYSTEM = "WrongSystem"
    CONTEXT_MISMATCH = "ContextMismatch"
    NON_CLASSICAL_INSTANTIATION = "NonClassicalInstantiation"
    TYPE_MISMATCH = "TypeMismatch"
    SUBJECT_MISMATCH = "SubjectMismatch"
    DUPLICATE_LABEL = "DuplicateLabel"
    MALFORMED = "MalformedDerivation"
    BAD_EQUATION = "BadEquation"


SYSTEMS = ("AF2", "C2", "M2", "M", "FD2")

_AF2_RULES = frozenset(
    {Rule.AX, Rule.ARR_INTRO, Rule.ARR_ELIM, Rule.FO_GEN, Rule.FO_INST, Rule.SO_GEN, Rule.SO_INST, Rule.EQ}
)

RULES_BY_SYSTEM = {
    "AF2": _AF2_RULES,
    "C2": _AF2_RULES | {Rule.C_AXIOM},
    "M2": _AF2_RULES | {Rule.C_AXIOM, Rule.CLASS_GEN, Rule.CLASS_INST},
    "M": frozenset(
        {
            Rule.AX,
            Rule.ARR_INTRO,
            Rule.ARR_ELIM,
            Rule.SO_GEN,
            Rule.SO_INST,
            Rule.C_AXIOM,
            Rule.CLASS_GEN,
            Rule.CLASS_INST,
        }
    ),
    "FD2": _AF2_RULES | {Rule.MU_NAMING},
}

Ctx = tuple[tuple[str, Formula], ...]


@dataclass(frozen=True)
class Sequent:
    lambda_ctx: Ctx
    subject: Term
    subject_type: Formula
    mu_ctx: Ctx = ()

    def __str__(self):
        from .syntax import print_formula, print_term

        parts = ", ".join(f"{x} : {print_formula(a)}" for x, a in self.lambda_ctx)
        mu = "".join(f", {a} : {print_formula(b)}" for a, b in self.mu_ctx)
        return f"{parts} |- {print_term(self.subject)} : {print_formula(self.subject_type)}{mu}"


@dataclass(frozen=True)
class EqWitness:
    """Named equation instance: rewrite sigma(lhs) to sigma(rhs) at path."""

    lhs: FoTerm
    rhs: FoTerm
    subst: tuple[tuple[str, FoTerm], ...]
    path: tuple[int, ...]
    reverse: bool = False


@dataclass(frozen=True)
class Derivation:
    rule: Rule
    conclusion: Sequent
    premises: tuple["Derivation", ...] = ()
    witness: object = None
    system: str = "AF2"
    equations: tuple | None = None  # meaningful on the root only

    def node_count(self) -> int:
        return 1 + sum(p.node_count() for p in self.premises)


@dataclass(frozen=True)
class Valid:
    def __bool__(self):
        return True


@dataclass(frozen=True)
class Invalid:
    path: tuple[int, ...]
    reason: Reason
    detail: str

    def __bool__(self):
        return False

    def __str__(self):
        where = ".".join(map(str, self.path)) or "root"
        return f"invalid at {where}: {self.reason.value}: {self.detail}"


def ctx_lookup(ctx: Ctx, name: str) -> Formula | None:
    for n, f in ctx:
        if n == name:
            return f
    return None


def _dup_label(ctx: Ctx) -> str | None:
    seen = set()
    for n, _ in ctx:
        if n in seen:
            return n
        seen.add(n)
    return None


def _ctx_subset(small: Ctx, big: Ctx) -> bool:
    return all(any(n == m and f == g for m, g in big) for n, f in small)


def _ctx_remove(ctx: Ctx, name: str) -> Ctx:
    return tuple((n, f) for n, f in ctx if n != name)


# ---------------------------------------------------------------------------
# Navigation for the equational rule: one child index per step, through
# arrows (0 lhs, 1 rhs), quantifier bodies (0), atom arguments and
# function-application arguments.

def subterm_at(f: Formula, path: tuple[int, ...]) -> FoTerm | None:
    from .formulas import Const, FoVar

    node: object = f
    for i in path:
        match node:
            case Arrow(a, b):
                node = (a, b)[i] if i in (0, 1) else None
            case ForallFo(_, b) | ForallSo(_, b) | ForallClass(_, b):
                node = b if i == 0 else None
            case Atom(_, args):
                node = args[i] if 0 <= i < len(args) else None
            case FunApp(_, args):
                node = args[i] if 0 <= i < len(args) else None
            case _:
                node = None
        if node is None:
            return None
    return node if isinstance(node, (FoVar, Const, FunApp)) else None


def replace_at(f, path: tuple[int, ...], new: FoTerm):
    if not path:
        return new
    i = path[0]
    rest = path[1:]
    match f:
        case Arrow(a, b):
            if i == 0:
                return Arrow(replace_at(a, rest, new), b)
            if i == 1:
                return Arrow(a, replace_at(b, rest, new))
        case ForallFo(x, b):
            if i == 0:
                return ForallFo(x, replace_at(b, rest, new))
        case ForallSo(x, b):
            if i == 0:
                return ForallSo(x, replace_at(b, rest, new))
        case ForallClass(x, b):
            if i == 0:
                return ForallClass(x, replace_at(b, rest, new))
        case Atom(p, args):
            if 0 <= i < len(args):
                return Atom(p, args[:i] + (replace_at(args[i], rest, new),) + args[i + 1 :])
        case FunApp(s, args):
            if 0 <= i < len(args):
                return FunApp(s, args[:i] + (replace_at(args[i], rest, new),) + args[i + 1 :])
    return None


def is_propositional(f: Formula) -> bool:
    match f:
        case Bottom():
            return True
        case Atom(_, args):
            return not args
        case Arrow(a, b):
            return is_propositional(a) and is_propositional(b)
        case ForallSo(_, b) | ForallClass(_, b):
            return is_propositional(b)
        case ForallFo(_, _):
            return False
    return False


# ---------------------------------------------------------------------------
# The checker

def check(d: Derivation, equations: EquationSet | None = None) -> Valid | Invalid:
    """Validate every node; the first failing node wins."""
    eqs = equations
    if eqs is None and d.equations is not None:
        eqs = EquationSet(tuple(d.equations))
    return _check(d, (), d.system, eqs)


def _check(d: Derivation, path: tuple[int, ...], system: str, eqs) -> Valid | Invalid:
    bad = _check_node(d, system, eqs)
    if bad is not None:
        return Invalid(path, bad[0], bad[1])
    for i, p in enumerate(d.premises):
        r = _check(p, path + (i,), system, eqs)
        if isinstance(r, Invalid):
            return r
    return Valid()


def _check_node(d: Derivation, system: str, eqs) -> tuple[Reason, str] | None:
    if d.system != system:
        return Reason.WRONG_SYSTEM, f"node system {d.system} differs from derivation system {system}"
    if system not in RULES_BY_SYSTEM:
        return Reason.MALFORMED, f"unknown system {system!r}"
    if d.rule not in RULES_BY_SYSTEM[system]:
        return Reason.WRONG_SYSTEM, f"rule {d.rule.value} is not part of {system}"
    c = d.conclusion
    dup = _dup_label(c.lambda_ctx)
    if dup is not None:
        return Reason.DUPLICATE_LABEL, f"label {dup!r} repeated in context"
    dup = _dup_label(c.mu_ctx)
    if dup is not None:
        return Reason.DUPLICATE_LABEL, f"label {dup!r} repeated in mu-context"
    if system != "FD2" and c.mu_ctx:
        return Reason.WRONG_SYSTEM, "mu-context outside FD2"
    if system in ("AF2", "C2", "FD2"):
        from .formulas import has_class_vars

        if has_class_vars(c.subject_type) or any(
            has_class_vars(f) for _, f in c.lambda_ctx + c.mu_ctx
        ):
            return Reason.MALFORMED, f"classical variables have no place in {system} formulas"
    if system == "M":
        if not is_propositional(c.subject_type) or any(
            not is_propositional(f) for _, f in c.lambda_ctx
        ):
            return Reason.MALFORMED, "system M is propositional"

    n_expected = {
        Rule.AX: 0,
        Rule.C_AXIOM: 0,
        Rule.ARR_ELIM: 2,
    }.get(d.rule, 1)
    if len(d.premises) != n_expected:
        return Reason.MALFORMED, f"{d.rule.value} takes {n_expected} premises, got {len(d.premises)}"

    checker = _RULE_CHECKS[d.rule]
    return checker(d, eqs)


def _premise_ctx_ok(p: Sequent, c: Sequent, skip_lambda: str | None = None, skip_mu: str | None = None) -> bool:
    lam_ctx = _ctx_remove(p.lambda_ctx, skip_lambda) if skip_lambda else p.lambda_ctx
    mu_ctx = _ctx_remove(p.mu_ctx, skip_mu) if skip_mu else p.mu_ctx
    return _ctx_subset(lam_ctx, c.lambda_ctx) and _ctx_subset(mu_ctx, c.mu_ctx)


def _check_ax(d: Derivation, eqs):
    c = d.conclusion
    if not isinstance(c.subject, Var):
        return Reason.SUBJECT_MISMATCH, "axiom subject must be a variable"
    a = ctx_lookup(c.lambda_ctx, c.subject.name)
    if a is None:
        return Reason.CONTEXT_MISMATCH, f"variable {c.subject.name!r} not in context"
    if a != c.subject_type:
        return Reason.TYPE_MISMATCH, f"context gives {a}, conclusion claims {c.subject_type}"
    return None


def _check_arr_intro(d: Derivation, eqs):
    c = d.conclusion
    (p,) = d.premises
    if not isinstance(c.subject_type, Arrow):
        return Reason.TYPE_MISMATCH, "arrow introduction concludes an arrow type"
    if not isinstance(c.subject, Lam):
        return Reason.SUBJECT_MISMATCH, "arrow introduction concludes an abstraction"
    x = c.subject.binder
    a, b = c.subject_type.lhs, c.subject_type.rhs
    hyp = ctx_lookup(p.conclusion.lambda_ctx, x)
    if hyp is None:
        if x in free_vars(p.conclusion.subject):
            return Reason.CONTEXT_MISMATCH, f"binder {x!r} free in premise subject but not in premise context"
    elif hyp != a:
        return Reason.TYPE_MISMATCH, f"hypothesis {x} : {hyp} does not match arrow premise {a}"
    if p.conclusion.subject_type != b:
        return Reason.TYPE_MISMATCH, "premise type is not the arrow conclusion"
    if not alpha_eq(c.subject.body, p.conclusion.subject):
        return Reason.SUBJECT_MISMATCH, "abstraction body differs from premise subject"
    if not _premise_ctx_ok(p.conclusion, c, skip_lambda=x):
        return Reason.CONTEXT_MISMATCH, "premise context not contained in conclusion context"
    return None


def _check_arr_elim(d: Derivation, eqs):
    c = d.conclusion
    pf, pa = d.premises
    if not isinstance(c.subject, App):
        return Reason.SUBJECT_MISMATCH, "arrow elimination concludes an application"
    ft = pf.conclusion.subject_type
    if not isinstance(ft, Arrow):
        return Reason.TYPE_MISMATCH, "function premise must have an arrow type"
    if ft.lhs != pa.conclusion.subject_type:
        return Reason.TYPE_MISMATCH, f"argument type {pa.conclusion.subject_type} does not match {ft.lhs}"
    if ft.rhs != c.subject_type:
        return Reason.TYPE_MISMATCH, "conclusion type is not the arrow's right side"
    if not alpha_eq(c.subject.fun, pf.conclusion.subject) or not alpha_eq(c.subject.arg, pa.conclusion.subject):
        return Reason.SUBJECT_MISMATCH, "application parts differ from premise subjects"
    if not (_premise_ctx_ok(pf.conclusion, c) and _premise_ctx_ok(pa.conclusion, c)):
        return Reason.CONTEXT_MISMATCH, "premise context not contained in conclusion context"
    return None


def _gen_common(d: Derivation, quant_cls, free_in_formula):
    c = d.conclusion
    (p,) = d.premises
    if not isinstance(c.subject_type, quant_cls):
        return Reason.TYPE_MISMATCH, "generalisation concludes a quantified type"
    v, body = c.subject_type.var, c.subject_type.body
    if body != p.conclusion.subject_type:
        return Reason.TYPE_MISMATCH, "quantifier body differs from premise type"
    if not alpha_eq(c.subject, p.conclusion.subject):
        return Reason.SUBJECT_MISMATCH, "generalisation does not change the subject"
    for _, f in c.lambda_ctx + c.mu_ctx:
        if v in free_in_formula(f):
            return Reason.SIDE_CONDITION_VIOLATED, f"{v!r} occurs free in the context"
    if not _premise_ctx_ok(p.conclusion, c):
        return Reason.CONTEXT_MISMATCH, "premise context not contained in conclusion context"
    return None


def _check_fo_gen(d: Derivation, eqs):
    return _gen_common(d, ForallFo, formula_fo_vars)


def _check_so_gen(d: Derivation, eqs):
    return _gen_common(d, ForallSo, formula_pred_vars)


def _check_class_gen(d: Derivation, eqs):
    return _gen_common(d, ForallClass, formula_class_vars)


def _inst_common(d: Derivation, quant_cls, apply_witness):
    c = d.conclusion
    (p,) = d.premises
    pt = p.conclusion.subject_type
    if not isinstance(pt, quant_cls):
        return Reason.TYPE_MISMATCH, "instantiation needs a quantified premise"
    if not alpha_eq(c.subject, p.conclusion.subject):
        return Reason.SUBJECT_MISMATCH, "instantiation does not change the subject"
    try:
        expected = apply_witness(pt)
    except (ValueError, TypeError) as e:
        return Reason.BAD_WITNESS, str(e)
    if expected != c.subject_type:
        return Reason.BAD_WITNESS, f"witness yields {expected}, conclusion claims {c.subject_type}"
    if not _premise_ctx_ok(p.conclusion, c):
        return Reason.CONTEXT_MISMATCH, "premise context not contained in conclusion context"
    return None


def _check_fo_inst(d: Derivation, eqs):
    from .formulas import Const, FoVar

    u = d.witness
    if not isinstance(u, (FoVar, Const, FunApp)):
        return Reason.BAD_WITNESS, "first-order instantiation needs a term witness"
    return _inst_common(d, ForallFo, lambda pt: fo_subst(pt.body, {pt.var: u}))


def _check_so_inst(d: Derivation, eqs):
    g = d.witness
    if not isinstance(g, PredAbs):
        return Reason.BAD_WITNESS, "second-order instantiation needs a predicate witness"
    if d.system == "M" and g.arity != 0:
        return Reason.WRONG_SYSTEM, "system M instantiates propositional variables only"

    def apply(pt):
        arity = _pred_arity(pt.body, pt.var)
        if arity is not None and arity != g.arity:
            raise ValueError(f"witness arity {g.arity} but variable used at arity {arity}")
        return so_subst(pt.body, pt.var, g)

    return _inst_common(d, ForallSo, apply)


def _check_class_inst(d: Derivation, eqs):
    g = d.witness
    if not isinstance(g, PredAbs):
        return Reason.BAD_WITNESS, "classical instantiation needs a predicate witness"
    if not is_classical_type(g.body):
        return Reason.NON_CLASSICAL_INSTANTIATION, f"witness {g.body} is not a classical type"
    if d.system == "M" and g.arity != 0:
        return Reason.WRONG_SYSTEM, "system M instantiates propositional variables only"

    def apply(pt):
        arity = _pred_arity(pt.body, pt.var, classical=True)
        if arity is not None and arity != g.arity:
            raise ValueError(f"witness arity {g.arity} but variable used at arity {arity}")
        return class_subst(pt.body, pt.var, g)

    return _inst_common(d, ForallClass, apply)


def _check_eq(d: Derivation, eqs):
    c = d.conclusion
    (p,) = d.premises
    w = d.witness
    if not isinstance(w, EqWitness):
        return Reason.BAD_WITNESS, "equational step needs an equation witness"
    if eqs is not None and (w.lhs, w.rhs) not in eqs:
        return Reason.BAD_EQUATION, "named equation is not among the ambient equations"
    if not alpha_eq(c.subject, p.conclusion.subject):
        return Reason.SUBJECT_MISMATCH, "equational step does not change the subject"
    sigma = dict(w.subst)
    left = fo_subst_term(w.lhs, sigma)
    right = fo_subst_term(w.rhs, sigma)
    if w.reverse:
        left, right = right, left
    at = subterm_at(p.conclusion.subject_type, w.path)
    if at is None:
        return Reason.BAD_WITNESS, "path does not lead to a first-order subterm"
    if at != left:
        return Reason.BAD_WITNESS, "premise subterm differs from the equation instance"
    expected = replace_at(p.conclusion.subject_type, w.path, right)
    if expected != c.subject_type:
        return Reason.BAD_WITNESS, "rewrite result differs from the conclusion type"
    if not _premise_ctx_ok(p.conclusion, c):
        return Reason.CONTEXT_MISMATCH, "premise context not contained in conclusion context"
    return None


def _check_c_axiom(d: Derivation, eqs):
    c = d.conclusion
    if not isinstance(c.subject, ConstC):
        return Reason.SUBJECT_MISMATCH, "the control axiom types the constant C"
    if d.system == "C2":
        want = double_neg_elim_ordinary()
    elif d.system in ("M2", "M"):
        want = double_neg_elim_classical()
    else:
        return Reason.WRONG_SYSTEM, f"no control axiom in {d.system}"
    if c.subject_type != want:
        return Reason.TYPE_MISMATCH, f"control axiom concludes {want}"
    return None


def _check_mu_naming(d: Derivation, eqs):
    c = d.conclusion
    (p,) = d.premises
    if not isinstance(c.subject, Mu):
        return Reason.SUBJECT_MISMATCH, "mu-naming concludes a mu-abstraction"
    beta = c.subject.binder
    alpha = c.subject.named
    if not alpha_eq(c.subject.body, p.conclusion.subject):
        return Reason.SUBJECT_MISMATCH, "mu body differs from premise subject"
    b_type = ctx_lookup(p.conclusion.mu_ctx, beta)
    if b_type is None:
        b_type = BOT  # the convention: a bottom-labelled mu variable is tacit
    if c.subject_type != b_type:
        return Reason.TYPE_MISMATCH, f"conclusion type should be {b_type}"
    a_type = p.conclusion.subject_type
    remaining = _ctx_remove(p.conclusion.mu_ctx, beta)
    if alpha != beta and ctx_lookup(c.mu_ctx, beta) is not None:
        return Reason.CONTEXT_MISMATCH, f"bound mu-variable {beta!r} still in conclusion mu-context"
    if a_type == BOT:
        if ctx_lookup(c.mu_ctx, alpha) is not None and ctx_lookup(remaining, alpha) is None:
            return Reason.CONTEXT_MISMATCH, "bottom naming must stay tacit"
    else:
        have = ctx_lookup(c.mu_ctx, alpha)
        prior = ctx_lookup(remaining, alpha)
        if prior is not None and prior != a_type:
            return Reason.DUPLICATE_LABEL, f"{alpha!r} already labels {prior}"
        if have is None or have != a_type:
            return Reason.CONTEXT_MISMATCH, f"conclusion mu-context must give {alpha} : {a_type}"
    if not _ctx_subset(remaining, c.mu_ctx):
        return Reason.CONTEXT_MISMATCH, "premise mu-context not carried to the conclusion"
    if not _ctx_subset(p.conclusion.lambda_ctx, c.lambda_ctx):
        return Reason.CONTEXT_MISMATCH, "premise context not contained in conclusion context"
    return None


_RULE_CHECKS = {
    Rule.AX: _check_ax,
    Rule.ARR_INTRO: _check_arr_intro,
    Rule.ARR_ELIM: _check_arr_elim,
    Rule.FO_GEN: _check_fo_gen,
    Rule.FO_INST: _check_fo_inst,
    Rule.SO_GEN: _check_so_gen,
    Rule.SO_INST: _check_so_inst,
    Rule.EQ: _check_eq,
    Rule.C_AXIOM: _check_c_axiom,
    Rule.CLASS_GEN: _check_class_gen,
    Rule.CLASS_INST: _check_class_inst,
    Rule.MU_NAMING: _check_mu_naming,
}


def subject_of(d: Derivation) -> tuple[Term, Formula]:
    """Root subject and type of a derivation that checks Valid."""
    r = check(d)
    if isinstance(r, Invalid):
        raise ValueError(f"derivation does not check: {r}")
    return d.conclusion.subject, d.conclusion.subject_type


# ---------------------------------------------------------------------------
# Embedding C2 into M2 (the constructive direction of the equivalence)

class EmbeddingError(ValueError):
    pass


def embed_c2_in_m2(d: Derivation) -> Derivation:
    """Translate a valid C2 derivation into a valid M2 derivation of the
    classically-translated sequent, by structural induction on the tree."""
    if d.system != "C2":
        raise EmbeddingError("embedding takes C2 derivations")
    r = check(d)
    if isinstance(r, Invalid):
        raise EmbeddingError(f"input does not check: {r}")
    return _embed(d)


def _embed(d: Derivation) -> Derivation:
    from .translations import classical

    c = d.conclusion
    new_seq = Sequent(
        tuple((x, classical(f)) for x, f in c.lambda_ctx),
        c.subject,
        classical(c.subject_type),
        (),
    )
    rule = d.rule
    witness = d.witness
    if rule == Rule.SO_GEN:
        rule = Rule.CLASS_GEN
    elif rule == Rule.SO_INST:
        g: PredAbs = d.witness
        body = classical(g.body)
        if not is_classical_type(body):
            raise EmbeddingError(
                f"witness {g.body} translates to the non-classical {body}; "
                "the instantiation cannot cross into the mixed system"
            )
        rule = Rule.CLASS_INST
        witness = PredAbs(g.params, body)
    return Derivation(
        rule,
        new_seq,
        tuple(_embed(p) for p in d.premises),
        witness,
        "M2",
        d.equations,
    )


# ---------------------------------------------------------------------------
# Derivation files: nested parenthesised records

def _sexp_tokens(text: str):
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
        elif ch in " \t\r":
            i += 1
            col += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield (ch, ch, line, col)
            i += 1
            col += 1
        elif ch == '"':
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                from .syntax import ParseError

                raise ParseError("unterminated string", line, col)
            yield ("str", "".join(buf), line, col)
            col += j - i + 1
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in ' \t\r\n();"':
                j += 1
            yield ("sym", text[i:j], line, col)
            col += j - i
            i = j
    yield ("eof", "", line, col)


def _parse_sexp(text: str):
    from .syntax import ParseError

    toks = list(_sexp_tokens(text))
    pos = 0

    def parse():
        nonlocal pos
        kind, val, line, col = toks[pos]
        pos += 1
        if kind == "(":
            items = []
            while toks[pos][0] not in (")", "eof"):
                items.append(parse())
            if toks[pos][0] == "eof":
                raise ParseError("unbalanced parenthesis", line, col)
            pos += 1
            return items
        if kind in ("sym", "str"):
            return (kind, val)
        raise ParseError(f"unexpected token {val!r}", line, col)

    out = parse()
    if toks[pos][0] != "eof":
        raise ParseError("trailing input after derivation", toks[pos][2], toks[pos][3])
    return out


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def derivation_to_text(d: Derivation) -> str:
    from .syntax import print_equations

    lines = ["(derivation", f"  (system {d.system})"]
    if d.equations:
        eqs = " ".join(
            f"({_quote(_fo_text(l))} {_quote(_fo_text(r))})" for l, r in d.equations
        )
        lines.append(f"  (equations {eqs})")
    lines.append(_node_text(d, 1))
    lines.append(")")
    return "\n".join(lines) + "\n"


def _fo_text(t) -> str:
    from .syntax import print_fo_term

    return print_fo_term(t)


def _node_text(d: Derivation, depth: int) -> str:
    from .syntax import print_formula, print_term

    pad = "  " * depth
    out = [f"{pad}(rule {d.rule.value}"]
    ctx = " ".join(f"({x} {_quote(print_formula(f))})" for x, f in d.conclusion.lambda_ctx)
    out.append(f"{pad}  (ctx {ctx})" if ctx else f"{pad}  (ctx)")
    if d.conclusion.mu_ctx:
        mctx = " ".join(f"({x} {_quote(print_formula(f))})" for x, f in d.conclusion.mu_ctx)
        out.append(f"{pad}  (mu-ctx {mctx})")
    out.append(f"{pad}  (term {_quote(print_term(d.conclusion.subject))})")
    out.append(f"{pad}  (type {_quote(print_formula(d.conclusion.subject_type))})")
    w = d.witness
    if isinstance(w, EqWitness):
        sub = " ".join(f"({x} {_quote(_fo_text(t))})" for x, t in w.subst)
        path = " ".join(map(str, w.path))
        direction = "bwd" if w.reverse else "fwd"
        out.append(
            f"{pad}  (witness-eq {_quote(_fo_text(w.lhs))} {_quote(_fo_text(w.rhs))}"
            f" (subst {sub}) (path {path}) (dir {direction}))"
        )
    elif isinstance(w, PredAbs):
        from .syntax import print_formula as pf

        params = " ".join(w.params)
        out.append(f"{pad}  (witness-pred (params {params}) {_quote(pf(w.body))})")
    elif w is not None:
        out.append(f"{pad}  (witness-term {_quote(_fo_text(w))})")
    if d.premises:
        out.append(f"{pad}  (premises")
        for p in d.premises:
            out.append(_node_text(p, depth + 2))
        out.append(f"{pad}  )")
    out.append(f"{pad})")
    return "\n".join(out)


def _expect_sym(item, what: str) -> str:
    from .syntax import ParseError

    if not (isinstance(item, tuple) and item[0] in ("sym", "str")):
        raise ParseError(f"expected {what}", 0, 0)
    return item[1]


def derivation_from_text(text: str) -> Derivation:
    from .syntax import ParseError

    root = _parse_sexp(text)
    if not isinstance(root, list) or not root or _expect_sym(root[0], "derivation") != "derivation":
        raise ParseError("expected (derivation ...)", 1, 1)
    system = "AF2"
    equations = None
    node = None
    sections = []
    for item in root[1:]:
        if not isinstance(item, list) or not item:
            raise ParseError("bad derivation section", 1, 1)
        sections.append((_expect_sym(item[0], "section head"), item))
    for head, item in sections:  # system first, whatever the file order
        if head == "system":
            system = _expect_sym(item[1], "system name")
    for head, item in sections:
        if head == "equations":
            from .syntax import parse_fo_term

            eqs = []
            for pair in item[1:]:
                eqs.append((parse_fo_term(pair[0][1]), parse_fo_term(pair[1][1])))
            equations = tuple(eqs)
        elif head == "rule":
            node = _node_from_sexp(item, system)
        elif head != "system":
            raise ParseError(f"unknown derivation section {head!r}", 1, 1)
    if node is None:
        raise ParseError("derivation has no rule tree", 1, 1)
    return Derivation(node.rule, node.conclusion, node.premises, node.witness, system, equations)


def _node_from_sexp(item, system: str) -> Derivation:
    from .syntax import ParseError, parse_fo_term, parse_formula, parse_term

    tag = _expect_sym(item[1], "rule tag")
    try:
        rule = Rule(tag)
    except ValueError:
        raise ParseError(f"unknown rule {tag!r}", 1, 1) from None
    ctx: list[tuple[str, Formula]] = []
    mu_ctx: list[tuple[str, Formula]] = []
    term = None
    typ = None
    witness = None
    premises: list[Derivation] = []
    for sec in item[2:]:
        head = _expect_sym(sec[0], "node section")
        if head == "ctx":
            for entry in sec[1:]:
                ctx.append((_expect_sym(entry[0], "label"), parse_formula(entry[1][1])))
        elif head == "mu-ctx":
            for entry in sec[1:]:
                mu_ctx.append((_expect_sym(entry[0], "label"), parse_formula(entry[1][1])))
        elif head == "term":
            term = parse_term(sec[1][1])
        elif head == "type":
            typ = parse_formula(sec[1][1])
        elif head == "witness-term":
            witness = parse_fo_term(sec[1][1])
        elif head == "witness-pred":
            params = tuple(_expect_sym(s, "param") for s in sec[1][1:])
            witness = PredAbs(params, parse_formula(sec[2][1]))
        elif head == "witness-eq":
            lhs = parse_fo_term(sec[1][1])
            rhs = parse_fo_term(sec[2][1])
            subst = []
            path: tuple[int, ...] = ()
            reverse = False
            for opt in sec[3:]:
                oh = _expect_sym(opt[0], "eq option")
                if oh == "subst":
                    for entry in opt[1:]:
                        subst.append((_expect_sym(entry[0], "var"), parse_fo_term(entry[1][1])))
                elif oh == "path":
                    path = tuple(int(_expect_sym(s, "index")) for s in opt[1:])
                elif oh == "dir":
                    reverse = _expect_sym(opt[1], "direction") == "bwd"
            witness = EqWitness(lhs, rhs, tuple(subst), path, reverse)
        elif head == "premises":
            for sub in sec[1:]:
                premises.append(_node_from_sexp(sub, system))
        else:
            raise ParseError(f"unknown node section {head!r}", 1, 1)
    if term is None or typ is None:
        raise ParseError(f"rule {tag} missing term or type", 1, 1)
    seq = Sequent(tuple(ctx), term, typ, tuple(mu_ctx))
    return Derivation(rule, seq, tuple(premises), witness, system)
