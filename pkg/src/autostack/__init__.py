"""Autostackable group structures.

Bounded flow functions on Cayley graphs with synchronously regular
stacking maps: a word-problem solver driven by prefix rewriting, acceptor
algebra over padded tuple alphabets, closure constructions (graph
products, extensions, finite-index supergroups), and a catalog of
concrete structures including the Stallings group.
"""

from .words import (
    Alphabet,
    Word,
    EPSILON,
    format_word,
    formal_inverse,
    free_reduce,
    inverse_name,
    last_letter,
    max_suffix,
    parse_word,
)
from .fsa import (
    Fsa,
    PaddedAlphabet,
    SyncAcceptor,
    all_words,
    empty_language,
    epsilon_language,
    letters_language,
    pad,
    product,
    proj1,
    suffix_language,
    union_many,
    unpad,
    word_language,
)
from .stacking import (
    ChainExitsBall,
    DirectedEdge,
    FlowBudgetError,
    GuardCoverageError,
    MonotonicityReport,
    PiecewiseRule,
    PrefixRule,
    PsiCertificate,
    StackingStructure,
    VerificationReport,
    check_psi_monotonicity,
    descending_chain_length,
    register_oracle,
    relabel_structure,
)
from .constructions import (
    ExtensionData,
    GraphSpec,
    IndexData,
    extension,
    finite_index,
    graph_product,
    pi,
    product_normal_forms,
)
from .instances import (
    builtin,
    builtin_names,
    finite_group,
    free_group,
    heisenberg_matrix,
    heisenberg_structure,
    index2z_structure,
    s3_structure,
    stallings_irreducible,
    stallings_nf_automaton,
    stallings_rewrite,
    stallings_structure,
    z2_structure,
    f2xf2_structure,
)

__version__ = "0.1.0"
