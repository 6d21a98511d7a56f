"""The shipped derivation fixtures.

Each fixture is a complete explicit derivation, built programmatically so the
rule structure is reviewable; serialized copies live next to this module as
``fixtures/*.deriv`` for the command line and round-trip tests.

Hand-derived contents:

* ``zero``/``one``/``two``/``succ-zero`` -- Church numerals at their indexed
  integer types.
* ``succ``           -- the successor combinator at forall y (N[y] -> N[s y]).
* ``Caxiom``         -- the control constant's axiom in the extended system.
* ``abort``          -- forall Xc (_|_ -> Xc) in the mixed system.
* ``Cprime``         -- forall Xc (~~Xc -> Xc) in the mixed system.
* ``T1``             -- forall x (N*[x] -> ~~N[x]): the double-negation
                        instantiation makes the iterated step typecheck.
* ``T2prop``         -- the trailing-accumulator operator at the
                        propositional type N* -> ~~N.  (Its indexed typing is
                        not derivable with an adequate equation set: the
                        accumulator would need an index satisfying
                        s(g(s w)) = g(w) universally, which forces s(a) = 0.)
* ``muC``            -- the mu-calculus control term at forall X (~~X -> X).
* ``remark``         -- the classical-system operator \\v f. (f)(C)(T1)v.
* ``zero-C2``        -- zero lifted to the classical system (embedding input).
* ``eq-pred``        -- an equational step rewriting p(s(0)) to 0.
* ``bottom-step-0..3`` -- a _|_-typed judgment followed through each head
                        C-reduction step.
"""

from __future__ import annotations

from importlib import resources

from .derivations import Derivation, EqWitness, Rule, Sequent, ctx_lookup
from .formulas import (
    Arrow,
    Atom,
    BOT,
    ClassVar,
    Formula,
    ForallClass,
    ForallFo,
    ForallSo,
    FoVar,
    INTEGER_EQUATIONS,
    PredAbs,
    PredVar,
    ZERO,
    class_subst,
    double_neg_elim_classical,
    double_neg_elim_ordinary,
    fo_subst,
    nat_type,
    nat_type_godel,
    neg,
    prop_nat,
    prop_nat_godel,
    s_tower,
    so_subst,
)
from .terms import App, C, Lam, Mu, Var, app, church, builtin, part


class _Build:
    """Conclusion-computing shorthands; the checker validates independently."""

    def __init__(self, system: str, equations=None):
        self.system = system
        self.equations = equations

    def _mk(self, rule, seq, premises=(), witness=None):
        return Derivation(rule, seq, tuple(premises), witness, self.system, self.equations)

    def ax(self, ctx, name, mu=()):
        a = ctx_lookup(tuple(ctx), name)
        if a is None:
            raise ValueError(f"{name!r} not in context")
        return self._mk(Rule.AX, Sequent(tuple(ctx), Var(name), a, tuple(mu)))

    def intro(self, p, binder, hyp: Formula | None = None):
        c = p.conclusion
        a = ctx_lookup(c.lambda_ctx, binder)
        if a is None:
            if hyp is None:
                raise ValueError(f"need a type for unused binder {binder!r}")
            a = hyp
        ctx = tuple(e for e in c.lambda_ctx if e[0] != binder)
        seq = Sequent(ctx, Lam(binder, c.subject), Arrow(a, c.subject_type), c.mu_ctx)
        return self._mk(Rule.ARR_INTRO, seq, (p,))

    def elim(self, pf, pa):
        cf, ca = pf.conclusion, pa.conclusion
        if not isinstance(cf.subject_type, Arrow):
            raise ValueError("function premise is not an arrow")
        ctx = list(cf.lambda_ctx)
        for e in ca.lambda_ctx:
            if ctx_lookup(tuple(ctx), e[0]) is None:
                ctx.append(e)
        mu = list(cf.mu_ctx)
        for e in ca.mu_ctx:
            if ctx_lookup(tuple(mu), e[0]) is None:
                mu.append(e)
        seq = Sequent(tuple(ctx), App(cf.subject, ca.subject), cf.subject_type.rhs, tuple(mu))
        return self._mk(Rule.ARR_ELIM, seq, (pf, pa))

    def fo_gen(self, p, var):
        c = p.conclusion
        seq = Sequent(c.lambda_ctx, c.subject, ForallFo(var, c.subject_type), c.mu_ctx)
        return self._mk(Rule.FO_GEN, seq, (p,))

    def fo_inst(self, p, term):
        c = p.conclusion
        t = c.subject_type
        seq = Sequent(c.lambda_ctx, c.subject, fo_subst(t.body, {t.var: term}), c.mu_ctx)
        return self._mk(Rule.FO_INST, seq, (p,), term)

    def so_gen(self, p, var):
        c = p.conclusion
        seq = Sequent(c.lambda_ctx, c.subject, ForallSo(var, c.subject_type), c.mu_ctx)
        return self._mk(Rule.SO_GEN, seq, (p,))

    def so_inst(self, p, g: PredAbs):
        c = p.conclusion
        t = c.subject_type
        seq = Sequent(c.lambda_ctx, c.subject, so_subst(t.body, t.var, g), c.mu_ctx)
        return self._mk(Rule.SO_INST, seq, (p,), g)

    def class_gen(self, p, var):
        c = p.conclusion
        seq = Sequent(c.lambda_ctx, c.subject, ForallClass(var, c.subject_type), c.mu_ctx)
        return self._mk(Rule.CLASS_GEN, seq, (p,))

    def class_inst(self, p, g: PredAbs):
        c = p.conclusion
        t = c.subject_type
        seq = Sequent(c.lambda_ctx, c.subject, class_subst(t.body, t.var, g), c.mu_ctx)
        return self._mk(Rule.CLASS_INST, seq, (p,), g)

    def caxiom(self, ctx=(), mu=()):
        typ = double_neg_elim_ordinary() if self.system == "C2" else double_neg_elim_classical()
        return self._mk(Rule.C_AXIOM, Sequent(tuple(ctx), C, typ, tuple(mu)))

    def mu_name(self, p, binder, named):
        c = p.conclusion
        b_type = ctx_lookup(c.mu_ctx, binder)
        if b_type is None:
            b_type = BOT
        mu = tuple(e for e in c.mu_ctx if e[0] != binder)
        if c.subject_type != BOT:
            if ctx_lookup(mu, named) is None:
                mu = mu + ((named, c.subject_type),)
        seq = Sequent(c.lambda_ctx, Mu(binder, named, c.subject), b_type, mu)
        return self._mk(Rule.MU_NAMING, seq, (p,))

    def eq(self, p, lhs, rhs, subst, path, reverse=False):
        from .derivations import replace_at
        from .formulas import fo_subst_term

        c = p.conclusion
        sigma = dict(subst)
        left, right = fo_subst_term(lhs, sigma), fo_subst_term(rhs, sigma)
        if reverse:
            left, right = right, left
        new_type = replace_at(c.subject_type, path, right)
        seq = Sequent(c.lambda_ctx, c.subject, new_type, c.mu_ctx)
        return self._mk(Rule.EQ, seq, (p,), EqWitness(lhs, rhs, tuple(subst), tuple(path), reverse))


# ---------------------------------------------------------------------------
# Shared subtrees

_X = PredVar("X")


def _x_at(t) -> Formula:
    return Atom(_X, (t,))


def _step_type() -> Formula:
    return ForallFo("y", Arrow(_x_at(FoVar("y")), _x_at(s_tower(1, FoVar("y")))))


def numeral_tree(n: int, system: str = "AF2") -> Derivation:
    """|- church(n) : N[s^n 0]."""
    b = _Build(system)
    ctx = (("x", _x_at(ZERO)), ("f", _step_type()))
    cur = b.ax(ctx, "x")
    for i in range(n):
        f_i = b.fo_inst(b.ax(ctx, "f"), s_tower(i))
        cur = b.elim(f_i, cur)
    cur = b.intro(cur, "f", _step_type())
    cur = b.intro(cur, "x")
    return b.so_gen(cur, "X")


def succ_tree(system: str = "AF2") -> Derivation:
    """|- succ : forall y (N[y] -> N[s y])."""
    b = _Build(system)
    y = FoVar("y")
    ctx = (("n", nat_type(y)), ("x", _x_at(ZERO)), ("f", _step_type()))
    n_inst = b.so_inst(b.ax(ctx, "n"), PredAbs(("w",), _x_at(FoVar("w"))))
    nx = b.elim(n_inst, b.ax(ctx, "x"))
    nxf = b.elim(nx, b.ax(ctx, "f"))
    f_y = b.fo_inst(b.ax(ctx, "f"), y)
    body = b.elim(f_y, nxf)
    out = b.intro(body, "f")
    out = b.intro(out, "x")
    out = b.so_gen(out, "X")
    out = b.intro(out, "n")
    return b.fo_gen(out, "y")


def succ_zero_tree(system: str = "AF2") -> Derivation:
    """|- (succ) 0 : N[s 0]."""
    b = _Build(system)
    s_at_0 = b.fo_inst(succ_tree(system), ZERO)
    return b.elim(s_at_0, numeral_tree(0, system))


def _delta_tree(b: _Build) -> Derivation:
    ctx = (("h", neg(nat_type(ZERO))),)
    body = b.elim(b.ax(ctx, "h"), numeral_tree(0, b.system))
    return b.intro(body, "h")


def _g_tree(b: _Build) -> Derivation:
    """|- G : forall y (~~N[y] -> ~~N[s y]) with G = \\x y. x (\\z. y (succ z))."""
    y = FoVar("y")
    sy = s_tower(1, y)
    x_e = ("x", neg(neg(nat_type(y))))
    y_e = ("y", neg(nat_type(sy)))
    z_e = ("z", nat_type(y))
    s_at_y = b.fo_inst(succ_tree(b.system), y)
    sz = b.elim(s_at_y, b.ax((z_e,), "z"))
    inner = b.elim(b.ax((y_e,), "y"), sz)
    lam_z = b.intro(inner, "z")
    applied = b.elim(b.ax((x_e,), "x"), lam_z)
    out = b.intro(applied, "y")
    out = b.intro(out, "x")
    return b.fo_gen(out, "y")


def t1_tree(system: str = "AF2") -> Derivation:
    """|- T1 : forall x (N*[x] -> ~~N[x])."""
    b = _Build(system)
    x = FoVar("x")
    ctx = (("n", nat_type_godel(x)),)
    nu = b.so_inst(b.ax(ctx, "n"), PredAbs(("w",), neg(nat_type(FoVar("w")))))
    with_delta = b.elim(nu, _delta_tree(b))
    with_g = b.elim(with_delta, _g_tree(b))
    out = b.intro(with_g, "n")
    return b.fo_gen(out, "x")


def _prop_zero_tree(b: _Build) -> Derivation:
    x = Atom(_X)
    ctx = (("x", x), ("f", Arrow(x, x)))
    out = b.intro(b.ax(ctx, "x"), "f", Arrow(x, x))
    out = b.intro(out, "x")
    return b.so_gen(out, "X")


def _prop_succ_tree(b: _Build) -> Derivation:
    x = Atom(_X)
    ctx = (("n", prop_nat()), ("x", x), ("f", Arrow(x, x)))
    n_inst = b.so_inst(b.ax(ctx, "n"), PredAbs((), x))
    nx = b.elim(n_inst, b.ax(ctx, "x"))
    nxf = b.elim(nx, b.ax(ctx, "f"))
    body = b.elim(b.ax(ctx, "f"), nxf)
    out = b.intro(body, "f")
    out = b.intro(out, "x")
    out = b.so_gen(out, "X")
    return b.intro(out, "n")


def _prop_f_tree(b: _Build) -> Derivation:
    n = prop_nat()
    ctx = (("x", neg(n)), ("y", n))
    sy = b.elim(_prop_succ_tree(b), b.ax(ctx, "y"))
    body = b.elim(b.ax(ctx, "x"), sy)
    out = b.intro(body, "y")
    return b.intro(out, "x")


def t2_prop_tree(system: str = "AF2") -> Derivation:
    """|- T2 : N* -> ~~N (the propositional typing)."""
    b = _Build(system)
    n = prop_nat()
    ctx = (("n", prop_nat_godel()), ("f", neg(n)))
    nu = b.so_inst(b.ax(ctx, "n"), PredAbs((), n))
    nf = b.elim(nu, b.ax(ctx, "f"))
    nff = b.elim(nf, _prop_f_tree(b))
    body = b.elim(nff, _prop_zero_tree(b))
    out = b.intro(body, "f")
    return b.intro(out, "n")


def c_axiom_tree() -> Derivation:
    return _Build("C2").caxiom()


def abort_tree() -> Derivation:
    b = _Build("M2")
    xc = Atom(ClassVar("X"))
    ctx = (("x", BOT), ("y", neg(xc)))
    lam_y = b.intro(b.ax(ctx, "x"), "y")
    c_inst = b.class_inst(b.caxiom(), PredAbs((), xc))
    applied = b.elim(c_inst, lam_y)
    out = b.intro(applied, "x")
    return b.class_gen(out, "X")


def cprime_tree() -> Derivation:
    b = _Build("M2")
    xc = Atom(ClassVar("X"))
    x_e = ("x", neg(neg(xc)))
    y_e = ("y", xc)
    d_e = ("d", neg(xc))
    dy = b.elim(b.ax((d_e,), "d"), b.ax((y_e,), "y"))
    lam_z = b.intro(dy, "z", xc)
    x_lz = b.elim(b.ax((x_e,), "x"), lam_z)
    lam_y = b.intro(x_lz, "y")
    x_ly = b.elim(b.ax((x_e,), "x"), lam_y)
    lam_d = b.intro(x_ly, "d")
    c_inst = b.class_inst(b.caxiom(), PredAbs((), xc))
    applied = b.elim(c_inst, lam_d)
    out = b.intro(applied, "x")
    return b.class_gen(out, "X")


def mu_c_tree() -> Derivation:
    b = _Build("FD2")
    x = Atom(_X)
    ctx = (("x", neg(neg(x))), ("y", x))
    named = b.mu_name(b.ax(ctx, "y"), "b", "a")
    lam_y = b.intro(named, "y")
    applied = b.elim(b.ax((("x", neg(neg(x))),), "x", mu=(("a", x),)), lam_y)
    out = b.mu_name(applied, "a", "phi")
    out = b.intro(out, "x")
    return b.so_gen(out, "X")


def remark_tree() -> Derivation:
    """|- \\v f. (f)(C)(T1)v : forall x (N*[x] -> ~~N[x]) in the classical system."""
    b = _Build("C2")
    x = FoVar("x")
    ctx = (("v", nat_type_godel(x)), ("f", neg(nat_type(x))))
    t1_at_x = b.fo_inst(t1_tree("C2"), x)
    t1_v = b.elim(t1_at_x, b.ax(ctx, "v"))
    c_inst = b.so_inst(b.caxiom(), PredAbs((), nat_type(x)))
    c_t1_v = b.elim(c_inst, t1_v)
    body = b.elim(b.ax(ctx, "f"), c_t1_v)
    out = b.intro(body, "f")
    out = b.intro(out, "v")
    return b.fo_gen(out, "x")


def eq_pred_tree() -> Derivation:
    """z : X(p(s 0)) |- z : X(0) via the integer equations."""
    b = _Build("AF2", equations=tuple(INTEGER_EQUATIONS))
    from .formulas import FunApp

    p_s_0 = FunApp("p", (s_tower(1),))
    ctx = (("z", _x_at(p_s_0)),)
    start = b.ax(ctx, "z")
    lhs = FunApp("p", (s_tower(1, FoVar("x")),))
    return b.eq(start, lhs, FoVar("x"), (("x", ZERO),), (0,))


def _not_not_not_n0(b: _Build) -> Derivation:
    """k : ~N[0] ... |- \\d. d k : ~~~N[0]."""
    ctx = (("k", neg(nat_type(ZERO))), ("d", neg(neg(nat_type(ZERO)))))
    dk = b.elim(b.ax(ctx, "d"), b.ax(ctx, "k"))
    return b.intro(dk, "d")


def _twice_neg_zero(b: _Build) -> Derivation:
    """|- \\z. z 0 : ~~N[0]."""
    ctx = (("z", neg(nat_type(ZERO))),)
    z0 = b.elim(b.ax(ctx, "z"), numeral_tree(0, b.system))
    return b.intro(z0, "z")


def bottom_step_tree(k: int) -> Derivation:
    """The _|_-typed head C-reduction chain ((C)\\d.(d)k) 0 from the classical
    system: step 0 is the start, steps 1-3 its successive head reducts."""
    b = _Build("C2")
    ctx = (("k", neg(nat_type(ZERO))),)
    if k == 0:
        lam_d = _not_not_not_n0(b)
        c_inst = b.so_inst(b.caxiom(), PredAbs((), neg(nat_type(ZERO))))
        c_app = b.elim(c_inst, lam_d)
        return b.elim(c_app, numeral_tree(0, "C2"))
    if k == 1:
        return b.elim(_not_not_not_n0(b), _twice_neg_zero(b))
    if k == 2:
        return b.elim(_twice_neg_zero(b), b.ax(ctx, "k"))
    if k == 3:
        return b.elim(b.ax(ctx, "k"), numeral_tree(0, "C2"))
    raise ValueError("steps are 0..3")


# ---------------------------------------------------------------------------
# Registry

FIXTURE_BUILDERS = {
    "zero": lambda: numeral_tree(0),
    "one": lambda: numeral_tree(1),
    "two": lambda: numeral_tree(2),
    "succ-zero": lambda: succ_zero_tree(),
    "succ-zero-M2": lambda: succ_zero_tree("M2"),
    "succ": succ_tree,
    "Caxiom": c_axiom_tree,
    "abort": abort_tree,
    "Cprime": cprime_tree,
    "T1": t1_tree,
    "T2prop": t2_prop_tree,
    "muC": mu_c_tree,
    "remark": remark_tree,
    "zero-C2": lambda: numeral_tree(0, "C2"),
    "eq-pred": eq_pred_tree,
    "bottom-step-0": lambda: bottom_step_tree(0),
    "bottom-step-1": lambda: bottom_step_tree(1),
    "bottom-step-2": lambda: bottom_step_tree(2),
    "bottom-step-3": lambda: bottom_step_tree(3),
}

FIXTURE_NAMES = tuple(FIXTURE_BUILDERS)

#: fixtures whose subject is a pure lambda term of type N[s^n 0]
NUMERAL_FIXTURES = {
    "zero": 0,
    "one": 1,
    "two": 2,
    "succ-zero": 1,
    "succ-zero-M2": 1,
    "zero-C2": 0,
}

C2_FIXTURES = ("Caxiom", "remark", "zero-C2", "bottom-step-0", "bottom-step-1", "bottom-step-2", "bottom-step-3")


def fixture(name: str) -> Derivation:
    try:
        return FIXTURE_BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown fixture {name!r}; known: {sorted(FIXTURE_BUILDERS)}") from None


def fixture_file_text(name: str) -> str:
    from .derivations import derivation_to_text

    return derivation_to_text(fixture(name))


def shipped_fixture_text(name: str) -> str:
    """The serialized fixture as shipped with the package."""
    return resources.files("mixlam").joinpath(f"fixtures/{name}.deriv").read_text()


def write_fixture_files(directory) -> list[str]:
    import pathlib

    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in FIXTURE_NAMES:
        path = directory / f"{name}.deriv"
        path.write_text(fixture_file_text(name))
        written.append(str(path))
    return written


if __name__ == "__main__":  # regenerate the shipped files
    import pathlib
    import sys

    target = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path(__file__).parent / "fixtures"
    for p in write_fixture_files(target):
        print(p)
