"""mixlam: a workbench for classical lambda calculi and their type systems.

Three term languages (pure, control-extended, mu), their reduction engines,
a second-order derivation checker for five systems, the Gödel/classical/
propositional translations, the classical-integer value-extraction machine,
and an operational storage/control-operator verification harness.
"""

from .terms import (
    App,
    C,
    ConstC,
    Lam,
    Mu,
    StackConst,
    Substitution,
    Term,
    Var,
    alpha_eq,
    app,
    builtin,
    church,
    free_vars,
    is_lambda_cp,
    substitute,
)
from .reduction import (
    Budget,
    BudgetExhausted,
    ReductionTrace,
    beta_normalize,
    head_c_reduce,
    head_reduce,
    is_c_solvable,
    mu_head_equiv,
    mu_reduce,
    stack_reduce,
)
from .formulas import (
    EquationSet,
    Formula,
    INCONCLUSIVE,
    PolarityClass,
    check_adequate,
    ends_with,
    equal_modulo,
    instantiates,
    is_classical_type,
    polarity,
)
from .translations import classical, godel, prop_erase, simple_godel
from .derivations import Derivation, Invalid, Sequent, Valid, check, embed_c2_in_m2, subject_of
from .intmachine import ValueTrace, classify_mu_integer, extract_value, extract_value_open, in_nxf, rep
from .storage import (
    StorageReport,
    ThetaCorpus,
    characterize_bottom_arrow,
    characterize_cc,
    default_corpus,
    verify_storage,
    verify_storage_classical,
    verify_storage_mu,
)

__version__ = "0.1.0"
