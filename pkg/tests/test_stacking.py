import itertools

import pytest
from hypothesis import given, settings, strategies as st

from autostack.fsa import proj1
from autostack.instances import free_group, stallings_structure
from autostack.stacking import (
    FlowBudgetError,
    GuardCoverageError,
    PiecewiseRule,
    StackingStructure,
    check_psi_monotonicity,
    descending_chain_length,
    relabel_structure,
)
from autostack.words import Alphabet, parse_word

F1 = free_group(["a"])
F2 = free_group(["a", "b"])


def test_free_group_normalize():
    assert F1.normalize(parse_word("a a^-1 a")) == ("a",)
    assert F2.normalize(parse_word("a b b^-1 a")) == ("a", "a")
    assert F1.normalize(()) == ()


def test_free_group_ball():
    assert F1.ball(0) == [()]
    ball2 = F1.ball(2)
    assert len(ball2) == 5
    assert set(ball2) == {(), ("a",), ("a^-1",), ("a", "a"), ("a^-1", "a^-1")}


def test_tree_edges_in_free_group():
    assert F2.is_tree_edge(("a",), "b")
    assert F2.is_tree_edge(("a",), "a^-1")
    assert F2.stack(("a",), "b") == ("b",)


def test_normalize_step_requires_normal_form():
    with pytest.raises(ValueError):
        F1.normalize_step(("a", "a^-1"), "a")
    with pytest.raises(ValueError):
        F1.stack(("a", "a^-1"), "a")


def test_normalize_step_tree_backtrack():
    assert F1.normalize_step(("a",), "a^-1") == ()


words2 = st.lists(st.sampled_from(F2.alphabet.letters), max_size=8).map(tuple)


@given(words2)
@settings(max_examples=60)
def test_normalize_idempotent_and_in_language(w):
    nf = F2.normalize(w)
    assert F2.is_normal_form(nf)
    assert F2.normalize(nf) == nf


@given(words2, st.sampled_from(F2.alphabet.letters))
@settings(max_examples=60)
def test_normalize_cancels_inverse_pairs(w, a):
    y = F2.normalize(w)
    assert F2.normalize(y + (a,) + (F2.alphabet.inverse(a),)) == y


def test_ball_words_label_tree_geodesics():
    S = stallings_structure()
    for y in S.ball(2):
        cur = ()
        for x in y:
            assert S.is_tree_edge(cur, x)
            cur = S.normalize_step(cur, x)
        assert cur == y


def test_verify_passes_on_free_groups():
    for S in (F1, F2):
        report = S.verify(3)
        assert report.passed, report.summary()


def test_verify_report_summary_format():
    report = F1.verify(2)
    text = report.summary()
    assert "[PASS]" in text and "radius 2" in text


def test_graph_automaton_free_group():
    sync = F1.graph_automaton()
    assert sync.accepts_tuple(((("a",)) , ("a",), ("a",)))
    assert sync.accepts_tuple(((), ("a",), ("a",)))
    assert not sync.accepts_tuple(((), ("a",), ("a^-1",)))
    # projection on the first coordinate recovers the normal forms
    assert proj1(sync).equivalent(F1.normal_forms)


def test_graph_automaton_requires_rules():
    S = StackingStructure(
        F1.alphabet, F1.normal_forms, 1, func=lambda y, a: (a,))
    with pytest.raises(ValueError):
        S.graph_automaton()


def test_guard_coverage_error():
    # rules for only one letter: the machine cannot flow the other one
    nf = F2.normal_forms
    rules = [PiecewiseRule(nf, "a", ("a",))]
    S = StackingStructure(F2.alphabet, nf, 1, rules=rules)
    assert S.normalize(("a",)) == ("a",)  # tree steps never consult rules
    with pytest.raises(GuardCoverageError):
        S.stack((), "b") if not S.is_tree_edge((), "b") else S._stack_by_rules((), "b")


def test_budget_error_on_broken_structure():
    # stacking map that sends a non-tree edge to itself forever
    alpha = Alphabet.from_names(["a"])
    # normal forms: only the empty word and "a" (prefix-closed, finite)
    from autostack.fsa import word_language

    nf = word_language(alpha.letters, [(), ("a",)])
    # group is Z/1? irrelevant: the edge (a, a) is non-tree and loops
    S = StackingStructure(
        alpha, nf, 2, func=lambda y, a: ("a", "a^-1", a), relators=())
    with pytest.raises(FlowBudgetError):
        S.normalize_step(("a",), "a", budget=50)


def test_verify_flags_bad_bound():
    base = stallings_structure()
    S = StackingStructure(
        base.alphabet, base.normal_forms, 4, func=base.func,
        relators=base.relators, name="bad-bound")
    report = S.verify(2)
    assert not report.passed
    failed = {c.name for c in report.failed_checks()}
    assert "bounded" in failed
    bounded = [c for c in report.failed_checks() if c.name == "bounded"][0]
    assert bounded.witnesses


def test_verify_flags_corrupted_rule():
    base = stallings_structure()
    rules = list(base.rules)
    for i, rule in enumerate(rules):
        if rule.letter == "a" and rule.output == ("c^-1", "a", "c"):
            rules[i] = PiecewiseRule(rule.guard, rule.letter, ("c^-1", "a", "c^-1"))
            break
    S = StackingStructure(
        base.alphabet, base.normal_forms, 5, rules=rules,
        relators=base.relators, oracle=base.oracle, name="bad-rule")
    report = S.verify(2)
    assert not report.passed
    failed = {c.name for c in report.failed_checks()}
    assert "endpoints preserved" in failed
    witnesses = [c for c in report.failed_checks() if c.name == "endpoints preserved"][0].witnesses
    assert witnesses


def test_to_prefix_rules_shapes():
    S = stallings_structure()
    rules = S.to_prefix_rules(1)
    for r in rules:
        # bounded shape: lhs = w s, rhs = w t with l(s) + l(t) <= bound + 1
        i = 0
        while i < min(len(r.lhs), len(r.rhs)) and r.lhs[i] == r.rhs[i]:
            i += 1
        assert (len(r.lhs) - i) + (len(r.rhs) - i) <= S.bound + 1
        assert S.normalize(r.lhs) == S.normalize(r.rhs)
    displayed = [r for r in rules if not r.tree]
    assert any(r.display() == "c a -> a c" for r in displayed)


def test_descending_chain_length_free_group():
    ball = set(F1.ball(4))
    assert descending_chain_length(F1, ("a",), "a", ball) == 0


def test_psi_monotonicity_free_group_vacuous():
    report = check_psi_monotonicity(F1, 3)
    assert report.ok and report.checked == 0


def test_relabel_structure():
    S = relabel_structure(F1, {"a": "x", "a^-1": "x^-1"}, name="relabeled")
    assert S.normalize(parse_word("x x x^-1")) == ("x",)
    assert S.alphabet.inverse("x") == "x^-1"
    assert len(S.ball(2)) == 5


def test_structure_doc_roundtrip():
    S = stallings_structure()
    doc = S.to_doc()
    T = StackingStructure.from_doc(doc)
    assert T.bound == S.bound
    assert T.normal_forms.equivalent(S.normal_forms)
    # the loaded structure evaluates by rules and agrees with the original
    for w in [parse_word("s a b"), parse_word("c a"), parse_word("b a d s")]:
        assert T.normalize(w) == S.normalize(w)
    # oracle reference resolved through the registry
    assert T.oracle is not None
    assert T.oracle(parse_word("c a")) == ("a", "c")


def test_unknown_oracle_rejected():
    S = free_group(["a"])
    doc = S.to_doc()
    doc["oracle"] = "builtin:nonsense"
    with pytest.raises(ValueError):
        StackingStructure.from_doc(doc)
