import pytest
from hypothesis import given, strategies as st

from autostack.words import (
    Alphabet,
    formal_inverse,
    format_word,
    free_reduce,
    inverse_name,
    last_letter,
    max_suffix,
    parse_word,
)

ALPHA = Alphabet.from_names(["a", "b", "c", "d"])
words = st.lists(st.sampled_from(ALPHA.letters), max_size=10).map(tuple)


def test_inverse_name_toggles():
    assert inverse_name("a") == "a^-1"
    assert inverse_name("a^-1") == "a"


def test_alphabet_from_names_order_and_involution():
    assert ALPHA.letters == ("a", "a^-1", "b", "b^-1", "c", "c^-1", "d", "d^-1")
    for x in ALPHA:
        assert ALPHA.inverse(ALPHA.inverse(x)) == x


def test_self_inverse_letters_allowed():
    alpha = Alphabet.from_names(["r", "t"], self_inverse=["t"])
    assert alpha.inverse("t") == "t"
    assert alpha.inverse("r") == "r^-1"


def test_alphabet_rejects_bad_involution():
    with pytest.raises(ValueError):
        Alphabet(["a", "b"], {"a": "b", "b": "a^-1"})
    with pytest.raises(ValueError):
        Alphabet(["a", "a"], {"a": "a"})


def test_parse_format_roundtrip():
    assert parse_word("a b a^-1") == ("a", "b", "a^-1")
    assert parse_word("") == ()
    assert format_word(()) == ""
    assert format_word(("a", "c^-1")) == "a c^-1"


def test_formal_inverse_examples():
    assert formal_inverse(ALPHA, ()) == ()
    assert formal_inverse(ALPHA, ("a", "b")) == ("b^-1", "a^-1")
    w = parse_word("a c^-1 d")
    assert formal_inverse(ALPHA, formal_inverse(ALPHA, w)) == w


def test_last_letter_examples():
    assert last_letter(("a", "b")) == "b"
    assert last_letter(()) == ""
    assert last_letter(parse_word("s a^-1")) == "a^-1"


def test_max_suffix_examples():
    Z = {"c", "d", "c^-1", "d^-1"}
    assert max_suffix(parse_word("a b d c"), Z) == ("d", "c")
    assert max_suffix(parse_word("c a"), Z) == ()
    assert max_suffix((), Z) == ()


def test_free_reduce_examples():
    assert free_reduce(ALPHA, parse_word("a a^-1")) == ()
    assert free_reduce(ALPHA, parse_word("a b b^-1 a")) == ("a", "a")
    assert free_reduce(ALPHA, parse_word("b a^-1 a b^-1 c")) == ("c",)


@given(words)
def test_formal_inverse_is_involution(w):
    assert formal_inverse(ALPHA, formal_inverse(ALPHA, w)) == w


@given(words)
def test_free_reduce_shrinks_and_is_idempotent(w):
    r = free_reduce(ALPHA, w)
    assert len(r) <= len(w)
    assert free_reduce(ALPHA, r) == r


@given(words, st.sampled_from(ALPHA.letters))
def test_max_suffix_recurrence(w, x):
    Z = {"c", "d", "c^-1", "d^-1"}
    if x in Z:
        assert max_suffix(w + (x,), Z) == max_suffix(w, Z) + (x,)
    else:
        assert max_suffix(w + (x,), Z) == ()


@given(words)
def test_word_key_orders_by_length_first(w):
    key = ALPHA.word_key(w)
    assert key[0] == len(w)
