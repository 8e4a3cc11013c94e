import itertools
import random

import pytest

from autostack.fsa import (
    Fsa,
    PAD,
    PaddedAlphabet,
    SyncAcceptor,
    all_words,
    empty_language,
    epsilon_language,
    letters_language,
    pad,
    product,
    proj1,
    relabel_fsa,
    suffix_language,
    union_many,
    unpad,
    well_formed_padding,
    word_language,
)

AB = ("a", "b")


def a_star():
    return Fsa(AB, 1, 0, {0}, [{"a": 0}])


def b_star():
    return Fsa(AB, 1, 0, {0}, [{"b": 0}])


def a_star_b():
    # a*b
    return Fsa(AB, 2, 0, {1}, [{"a": 0, "b": 1}, {}])


def words_up_to(symbols, n):
    for k in range(n + 1):
        yield from itertools.product(symbols, repeat=k)


def random_fsa(rng, symbols=AB, max_states=4):
    n = rng.randint(1, max_states)
    rows = []
    for _ in range(n):
        row = {}
        for s in symbols:
            if rng.random() < 0.8:
                row[s] = rng.randrange(n)
        rows.append(row)
    accepting = {q for q in range(n) if rng.random() < 0.5}
    return Fsa(symbols, n, 0, accepting, rows)


def language(f, n=4):
    return {w for w in words_up_to(f.symbols, n) if f.accepts(w)}


def test_union_intersect_examples():
    a = word_language(AB, [("a",)])
    b = word_language(AB, [("b",)])
    u = a.union(b)
    assert u.accepts(("a",)) and u.accepts(("b",)) and not u.accepts(("a", "b"))
    L = a_star()
    assert L.intersect(L.complement()).is_empty()


def test_concat_star_example():
    ab = word_language(AB, [("a", "b")])
    c = word_language(AB, [("b",)])
    abc_star = ab.concat(c).star()
    assert abc_star.accepts(())
    assert abc_star.accepts(("a", "b", "b", "a", "b", "b"))
    assert not abc_star.accepts(("a", "b"))


def test_alphabet_mismatch_errors():
    other = Fsa(("x",), 1, 0, {0}, [{"x": 0}])
    with pytest.raises(ValueError):
        a_star().union(other)
    with pytest.raises(ValueError):
        a_star().intersect(other)
    with pytest.raises(ValueError):
        a_star().concat(other)


def test_boolean_laws_on_random_machines():
    rng = random.Random(7)
    for _ in range(25):
        f, g = random_fsa(rng), random_fsa(rng)
        # De Morgan
        lhs = f.union(g).complement()
        rhs = f.complement().intersect(g.complement())
        assert lhs.equivalent(rhs)
        # L intersect A* == L
        assert f.intersect(all_words(AB)).equivalent(f)
        # double complement
        assert f.complement().complement().equivalent(f)
        # distributivity
        h = random_fsa(rng)
        assert f.intersect(g.union(h)).equivalent(
            f.intersect(g).union(f.intersect(h)))


def test_minus_matches_enumeration():
    rng = random.Random(11)
    for _ in range(15):
        f, g = random_fsa(rng), random_fsa(rng)
        assert language(f.minus(g)) == language(f) - language(g)


def test_hom_preimage_examples():
    # h(a) = a, h(b) = ">": preimage of a* >* over {a, b} is a* b*
    target = Fsa(("a", ">"), 2, 0, {0, 1}, [{"a": 0, ">": 1}, {">": 1}])
    pre = target.hom_preimage({"a": ("a",), "b": (">",)}, AB)
    astar_bstar = Fsa(AB, 2, 0, {0, 1}, [{"a": 0, "b": 1}, {"b": 1}])
    assert pre.equivalent(astar_bstar)
    # erasing homomorphism: preimage of any language containing epsilon is A*
    pre2 = a_star().hom_preimage({"a": (), "b": ()}, AB)
    assert pre2.equivalent(all_words(AB))
    # identity homomorphism preserves the language
    f = a_star_b()
    assert f.hom_preimage({"a": ("a",), "b": ("b",)}, AB).equivalent(f)


def test_quotient_examples():
    L = word_language(AB, [("a", "b")])
    assert language(L.quotient(("b",))) == {("a",)}
    f = a_star_b()
    assert f.quotient(()).equivalent(f)
    assert f.quotient(("b",)).equivalent(a_star())


def test_quotient_definition_by_enumeration():
    rng = random.Random(3)
    for _ in range(20):
        f = random_fsa(rng)
        w = tuple(rng.choice(AB) for _ in range(rng.randint(0, 3)))
        quot = f.quotient(w)
        want = {x for x in words_up_to(AB, 4) if f.accepts(x + w)}
        assert language(quot) == want
        # L subseteq (L.w)/w
        cat = f.concat(word_language(AB, [w]))
        assert language(f) <= language(cat.quotient(w))


def test_pad_examples():
    assert pad((("a", "b"), ("c",))) == (("a", "c"), ("b", PAD))
    assert pad((("x",), ("x",))) == (("x", "x"),)
    assert pad(((), ("a", "b"))) == ((PAD, "a"), (PAD, "b"))
    assert pad(((), ())) == ()
    assert unpad(pad((("a",), ("b", "b")))) == (("a",), ("b", "b"))


def test_padded_alphabet_size():
    padded = PaddedAlphabet(AB, 3)
    assert len(padded.symbols) == 3 ** 3 - 1
    with pytest.raises(ValueError):
        PaddedAlphabet(AB + (PAD,), 2)


def test_product_examples():
    p = product([a_star(), b_star()])
    assert p.accepts_tuple((("a", "a"), ("b",)))
    assert p.accepts(pad((("a", "a"), ("b",))))
    assert not p.accepts_tuple((("b",), ("b",)))
    # empty factor kills the product
    p2 = product([empty_language(AB), a_star()])
    assert p2.fsa.is_empty()
    # empty padded word accepted iff every factor accepts epsilon
    assert p.accepts_tuple(((), ()))
    p3 = product([a_star_b(), a_star()])
    assert not p3.accepts_tuple(((), ()))


def test_product_membership_exhaustive():
    f, g = a_star_b(), b_star()
    p = product([f, g])
    for u in words_up_to(AB, 4):
        for v in words_up_to(AB, 4):
            assert p.accepts_tuple((u, v)) == (f.accepts(u) and g.accepts(v))


def test_product_triple_membership():
    f, g, h = a_star(), b_star(), a_star_b()
    p = product([f, g, h])
    for u in words_up_to(AB, 2):
        for v in words_up_to(AB, 2):
            for w in words_up_to(AB, 2):
                want = f.accepts(u) and g.accepts(v) and h.accepts(w)
                assert p.accepts_tuple((u, v, w)) == want


def test_proj1_examples():
    p = product([a_star(), b_star()])
    assert proj1(p).equivalent(a_star())
    single = product([word_language(AB, [("a", "b")]), word_language(AB, [("b",)])])
    assert language(proj1(single)) == {("a", "b")}
    # first coordinate entirely padding projects to the empty word
    eps_first = product([epsilon_language(AB), word_language(AB, [("a",)])])
    assert language(proj1(eps_first)) == {()}


def test_proj1_of_product_is_first_factor():
    rng = random.Random(5)
    for _ in range(15):
        f, g = random_fsa(rng), random_fsa(rng)
        if g.is_empty():
            continue
        assert proj1(product([f, g])).equivalent(f.minimize())


def test_well_formed_padding_rejects_interior_pad():
    padded = PaddedAlphabet(AB, 2)
    wf = well_formed_padding(padded)
    assert wf.accepts((("a", PAD), ("a", PAD)))
    assert not wf.accepts((("a", PAD), ("a", "a")))


def test_sync_acceptor_enforces_well_formedness():
    padded = PaddedAlphabet(AB, 2)
    raw = all_words(padded.symbols)
    sync = SyncAcceptor(raw, padded)
    assert sync.accepts((("a", PAD),))
    assert not sync.accepts((("a", PAD), ("a", "a")))


def test_equivalent_examples():
    f = a_star()
    assert f.equivalent(f)
    g = f.union(word_language(AB, [("b",)]))
    assert not f.equivalent(g)
    assert f.complement().complement().equivalent(f)


def test_enumerate_examples():
    assert a_star().enumerate_words(2) == [(), ("a",), ("a", "a")]
    assert empty_language(AB).enumerate_words(5) == []
    assert word_language(AB, [("a", "b")]).enumerate_words(1) == []


def test_enumerate_matches_membership_and_order():
    rng = random.Random(9)
    for _ in range(10):
        f = random_fsa(rng)
        words = f.enumerate_words(4)
        assert set(words) == language(f)
        keys = [(len(w), tuple(AB.index(x) for x in w)) for w in words]
        assert keys == sorted(keys)


def test_union_many_matches_pairwise():
    rng = random.Random(13)
    fs = [random_fsa(rng) for _ in range(5)]
    many = union_many(fs)
    byhand = fs[0]
    for f in fs[1:]:
        byhand = byhand.union(f)
    assert many.equivalent(byhand)


def test_minimize_is_canonical_for_equal_languages():
    f = a_star_b()
    g = Fsa(AB, 4, 0, {2}, [{"a": 1, "b": 2}, {"a": 1, "b": 2}, {}, {"a": 3}])
    assert f.equivalent(g)
    assert f.minimize().to_doc() == g.minimize().to_doc()


def test_json_roundtrip():
    f = a_star_b()
    doc = f.to_doc()
    assert Fsa.from_doc(doc).equivalent(f)
    p = product([a_star(), b_star()])
    doc = p.to_doc()
    assert SyncAcceptor.from_doc(doc).fsa.equivalent(p.fsa)


def test_dot_export_smoke():
    text = a_star_b().to_dot("demo")
    assert text.startswith("digraph demo")
    assert "doublecircle" in text


def test_relabel():
    f = a_star_b()
    g = relabel_fsa(f, {"a": "x", "b": "y"})
    assert g.accepts(("x", "x", "y"))
    assert not g.accepts(("x",))


def test_suffix_and_letters_languages():
    ends_a = suffix_language(AB, ["a"])
    assert ends_a.accepts(("b", "a")) and not ends_a.accepts(("a", "b"))
    assert not ends_a.accepts(())
    singles = letters_language(AB, ["b"])
    assert language(singles) == {("b",)}
