from dataclasses import replace

import pytest

from mixlam.derivations import (
    Derivation,
    EmbeddingError,
    EqWitness,
    Invalid,
    Reason,
    Rule,
    Sequent,
    Valid,
    check,
    derivation_from_text,
    derivation_to_text,
    embed_c2_in_m2,
    subject_of,
)
from mixlam.fixtures import (
    C2_FIXTURES,
    FIXTURE_NAMES,
    NUMERAL_FIXTURES,
    fixture,
    shipped_fixture_text,
)
from mixlam.formulas import (
    Atom,
    BOT,
    ClassVar,
    EquationSet,
    FoVar,
    INTEGER_EQUATIONS,
    PredAbs,
    PredSym,
    PredVar,
    ZERO,
    nat_type,
    nat_type_classical,
    neg,
    s_tower,
)
from mixlam.reduction import beta_normalize, head_c_reduce
from mixlam.syntax import parse_formula, parse_term
from mixlam.terms import Var, builtin, church


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_checks_valid(name):
    assert isinstance(check(fixture(name)), Valid)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_serialisation_round_trip(name):
    d = fixture(name)
    d2 = derivation_from_text(derivation_to_text(d))
    assert isinstance(check(d2), Valid)
    assert d2.conclusion.subject == d.conclusion.subject
    assert d2.conclusion.subject_type == d.conclusion.subject_type


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_shipped_files_match_builders(name):
    text = shipped_fixture_text(name)
    d = derivation_from_text(text)
    assert isinstance(check(d), Valid)
    assert d.conclusion.subject == fixture(name).conclusion.subject
    assert d.conclusion.subject_type == fixture(name).conclusion.subject_type


def test_fixture_conclusions():
    subject, typ = subject_of(fixture("zero"))
    assert subject == church(0) and typ == nat_type(ZERO)
    subject, typ = subject_of(fixture("abort"))
    assert subject == builtin("abort")
    assert typ == parse_formula("forall Xc (_|_ -> Xc)")
    subject, typ = subject_of(fixture("Cprime"))
    assert subject == builtin("Cprime")
    assert typ == parse_formula("forall Xc (~~Xc -> Xc)")
    subject, typ = subject_of(fixture("muC"))
    assert subject == builtin("muC")
    assert typ == parse_formula("forall X (~~X -> X)")
    subject, typ = subject_of(fixture("T1"))
    assert subject == builtin("T1")
    assert typ == parse_formula("forall x (N*[x] -> ~~N[x])")
    subject, typ = subject_of(fixture("remark"))
    assert typ == parse_formula("forall x (N*[x] -> ~~N[x])")
    subject, typ = subject_of(fixture("T2prop"))
    assert subject == builtin("T2")
    assert typ == parse_formula("N* -> ~~N")


def test_subject_of_rejects_invalid():
    d = fixture("zero")
    broken = replace(d, conclusion=replace(d.conclusion, subject_type=BOT))
    with pytest.raises(ValueError):
        subject_of(broken)


# ---------------------------------------------------------------------------
# Corruptions: each single-node edit must fail with the right reason

def _corrupt(d: Derivation, path, **changes) -> Derivation:
    if not path:
        return replace(d, **changes)
    i = path[0]
    prem = list(d.premises)
    prem[i] = _corrupt(prem[i], path[1:], **changes)
    return replace(d, premises=tuple(prem))


def _reason_of(d, equations=None) -> Reason:
    r = check(d, equations)
    assert isinstance(r, Invalid), "corruption went unnoticed"
    return r.reason


def test_corrupt_classical_witness():
    d = fixture("abort")
    # abort's tree: ClassGen <- ArrIntro <- ArrElim <- (ClassInst, ...)
    path_to_inst = (0, 0, 0)
    node = d.premises[0].premises[0].premises[0]
    assert node.rule == Rule.CLASS_INST
    bad = _corrupt(d, path_to_inst, witness=PredAbs((), Atom(PredVar("Y"))))
    assert _reason_of(bad) == Reason.NON_CLASSICAL_INSTANTIATION


def test_corrupt_generalisation_side_condition():
    d = fixture("succ")
    # root is FoGen over y; adding a context hypothesis mentioning y breaks it
    seq = d.conclusion
    bad_ctx = seq.lambda_ctx + (("extra", Atom(PredSym("P"), (FoVar("y"),))),)
    bad = replace(d, conclusion=replace(seq, lambda_ctx=bad_ctx))
    assert _reason_of(bad) == Reason.SIDE_CONDITION_VIOLATED


def test_corrupt_system_tag():
    d = fixture("Caxiom")
    bad = replace(d, system="AF2")
    assert _reason_of(bad) == Reason.WRONG_SYSTEM


def test_corrupt_mixed_systems_in_tree():
    d = fixture("zero")
    bad = _corrupt(d, (0,), system="C2")
    assert _reason_of(bad) == Reason.WRONG_SYSTEM


def test_corrupt_fo_witness():
    d = fixture("succ-zero")
    # root: ArrElim(FoInst(succ...), zero); break the instantiation witness
    assert d.premises[0].rule == Rule.FO_INST
    bad = _corrupt(d, (0,), witness=s_tower(1))
    assert _reason_of(bad) == Reason.BAD_WITNESS


def test_corrupt_axiom_type():
    d = fixture("zero")
    node = d
    while node.rule != Rule.AX:
        node = node.premises[0]
    bad = _corrupt(
        d,
        (0, 0, 0),
        conclusion=replace(node.conclusion, subject_type=Atom(PredVar("X"), (s_tower(1),))),
    )
    r = check(bad)
    assert isinstance(r, Invalid)
    assert r.reason in (Reason.TYPE_MISMATCH,)


def test_corrupt_context_entry():
    d = fixture("zero")
    ax = d.premises[0].premises[0].premises[0]
    assert ax.rule == Rule.AX
    bad_seq = replace(ax.conclusion, lambda_ctx=(("w", Atom(PredVar("X"), (ZERO,))),))
    bad = _corrupt(d, (0, 0, 0), conclusion=bad_seq)
    assert _reason_of(bad) == Reason.CONTEXT_MISMATCH


def test_corrupt_duplicate_label():
    d = fixture("zero")
    seq = d.conclusion
    dup = (("a", BOT), ("a", BOT))
    bad = replace(d, conclusion=replace(seq, lambda_ctx=dup))
    assert _reason_of(bad) == Reason.DUPLICATE_LABEL


def test_corrupt_equation_not_ambient():
    d = fixture("eq-pred")
    other = EquationSet(((FoVar("x"), FoVar("x")),))
    assert _reason_of(d, other) == Reason.BAD_EQUATION
    assert isinstance(check(d, INTEGER_EQUATIONS), Valid)


def test_corrupt_eq_path():
    d = fixture("eq-pred")
    w = d.witness
    bad = replace(d, witness=EqWitness(w.lhs, w.rhs, w.subst, (0, 0, 0), w.reverse))
    assert _reason_of(bad) == Reason.BAD_WITNESS


def test_corrupt_mu_context():
    d = fixture("muC")
    # drop the mu-context entry the naming needs
    node = d.premises[0].premises[0]
    assert node.rule == Rule.MU_NAMING
    seq = node.conclusion
    bad_seq = replace(seq, mu_ctx=())
    bad = _corrupt(d, (0, 0), conclusion=bad_seq)
    r = check(bad)
    assert isinstance(r, Invalid)
    assert r.reason in (Reason.TYPE_MISMATCH, Reason.CONTEXT_MISMATCH)


def test_mu_ctx_outside_fd2():
    seq = Sequent((), Var("x"), BOT, (("a", Atom(PredVar("X"))),))
    d = Derivation(Rule.AX, seq, (), None, "AF2")
    assert _reason_of(d) == Reason.WRONG_SYSTEM


def test_classical_vars_rejected_outside_mixed_systems():
    seq = Sequent((("x", Atom(ClassVar("X"))),), Var("x"), Atom(ClassVar("X")))
    d = Derivation(Rule.AX, seq, (), None, "AF2")
    assert _reason_of(d) == Reason.MALFORMED


def test_m_system_is_propositional():
    seq = Sequent((("x", nat_type(ZERO)),), Var("x"), nat_type(ZERO))
    d = Derivation(Rule.AX, seq, (), None, "M")
    assert _reason_of(d) == Reason.MALFORMED


# ---------------------------------------------------------------------------
# Embedding

@pytest.mark.parametrize("name", C2_FIXTURES)
def test_embedding_revalidates(name):
    m = embed_c2_in_m2(fixture(name))
    assert m.system == "M2"
    assert isinstance(check(m), Valid)


def test_embedding_zero_concludes_classical_nat():
    m = embed_c2_in_m2(fixture("zero-C2"))
    assert m.conclusion.subject == church(0)
    assert m.conclusion.subject_type == nat_type_classical(ZERO)


def test_embedding_rejects_invalid_input():
    d = fixture("zero-C2")
    broken = replace(d, conclusion=replace(d.conclusion, subject_type=BOT))
    with pytest.raises(EmbeddingError):
        embed_c2_in_m2(broken)
    with pytest.raises(EmbeddingError):
        embed_c2_in_m2(fixture("zero"))  # wrong system


def test_embedding_rejects_symbol_ending_witness():
    # an instantiation witness ending with a predicate symbol translates to a
    # non-classical type; such derivations cannot cross into the mixed system
    b_ctx = (("t", parse_formula("forall X (X(0) -> P(0))")),)
    ax = Derivation(Rule.AX, Sequent(b_ctx, Var("t"), parse_formula("forall X (X(0) -> P(0))")), (), None, "C2")
    inst = Derivation(
        Rule.SO_INST,
        Sequent(b_ctx, Var("t"), parse_formula("Q(0, 0) -> P(0)")),
        (ax,),
        PredAbs(("w",), parse_formula("Q(w, 0)")),
        "C2",
    )
    assert isinstance(check(inst), Valid)
    with pytest.raises(EmbeddingError):
        embed_c2_in_m2(inst)


# ---------------------------------------------------------------------------
# Reduction-facing properties of the fixtures

def test_bottom_steps_follow_head_c_reduction():
    # subject of step 0 head-C-reduces through the subjects of steps 1..3,
    # and each step carries its own valid derivation of the absurdity type
    subjects = [fixture(f"bottom-step-{k}").conclusion.subject for k in range(4)]
    for k in range(4):
        assert fixture(f"bottom-step-{k}").conclusion.subject_type == BOT
    trace = head_c_reduce(subjects[0])
    got = list(trace.terms())
    assert got == subjects


def test_numeral_fixture_unicity():
    # every shipped derivation of an indexed integer type with a pure subject
    # has the corresponding numeral as its normal form
    for name, n in NUMERAL_FIXTURES.items():
        d = fixture(name)
        assert d.conclusion.subject_type == nat_type(s_tower(n))
        assert beta_normalize(d.conclusion.subject) == church(n)


def test_typecheck_rejects_malformed_file():
    with pytest.raises(Exception):
        derivation_from_text("(derivation (system AF2)")
