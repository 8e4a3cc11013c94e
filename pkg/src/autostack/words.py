"""Inverse-closed alphabets and word combinatorics.

Words are plain tuples of letter names; the empty word is the empty tuple.
Inverse letters follow the naming convention ``x`` / ``x^-1``.  A word
serializes as its letters joined by single spaces, so the empty word
serializes as the empty string.
"""

from __future__ import annotations

from typing import Iterable, Mapping

Word = tuple
EPSILON: Word = ()


def inverse_name(name: str) -> str:
    """Toggle the ``^-1`` suffix on a letter name."""
    if name.endswith("^-1"):
        return name[:-3]
    return name + "^-1"


class Alphabet:
    """Ordered finite letter set with an involutive inverse pairing.

    Letters are opaque strings; a letter may be declared as its own
    inverse.  Instances are immutable after construction and safe to
    share between threads.
    """

    __slots__ = ("letters", "_inv", "_index")

    def __init__(self, letters: Iterable[str], inverses: Mapping[str, str]):
        self.letters = tuple(letters)
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("alphabet letters must be pairwise distinct")
        if "" in self.letters:
            raise ValueError("the empty string is reserved for the empty word")
        index = {x: i for i, x in enumerate(self.letters)}
        inv = {}
        for x in self.letters:
            if x not in inverses:
                raise ValueError(f"no inverse declared for letter {x!r}")
            y = inverses[x]
            if y not in index:
                raise ValueError(f"inverse {y!r} of {x!r} is not a letter")
            inv[x] = y
        for x, y in inv.items():
            if inv[y] != x:
                raise ValueError(f"inverse pairing is not an involution at {x!r}")
        self._inv = inv
        self._index = index

    @classmethod
    def from_names(cls, names: Iterable[str], self_inverse: Iterable[str] = ()) -> "Alphabet":
        """Inverse closure of ``names``: each name ``x`` is paired with a fresh
        letter ``x^-1`` unless listed in ``self_inverse``."""
        self_inverse = set(self_inverse)
        letters = []
        inverses = {}
        for x in names:
            if x in self_inverse:
                letters.append(x)
                inverses[x] = x
            else:
                y = inverse_name(x)
                letters.extend((x, y))
                inverses[x] = y
                inverses[y] = x
        return cls(letters, inverses)

    def inverse(self, letter: str) -> str:
        return self._inv[letter]

    def index(self, letter: str) -> int:
        return self._index[letter]

    def inverse_map(self) -> dict:
        return dict(self._inv)

    def __contains__(self, letter) -> bool:
        return letter in self._index

    def __iter__(self):
        return iter(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Alphabet):
            return NotImplemented
        return self.letters == other.letters and self._inv == other._inv

    def __hash__(self) -> int:
        return hash((self.letters, tuple(sorted(self._inv.items()))))

    def __repr__(self) -> str:
        return f"Alphabet({list(self.letters)!r})"

    def word_key(self, word: Word):
        """Length-lexicographic sort key using the declared letter order."""
        return (len(word), tuple(self._index[x] for x in word))


def parse_word(text: str) -> Word:
    """Parse a whitespace-separated word; the empty string is the empty word."""
    return tuple(text.split())


def format_word(word: Word) -> str:
    return " ".join(word)


def formal_inverse(alphabet: Alphabet, word: Word) -> Word:
    """Letterwise-inverted reversal of ``word``."""
    return tuple(alphabet.inverse(x) for x in reversed(word))


def last_letter(word: Word) -> str:
    """Last letter of ``word``; the empty string stands for the empty word."""
    return word[-1] if word else ""


def max_suffix(word: Word, letters) -> Word:
    """Longest suffix of ``word`` whose letters all lie in ``letters``."""
    i = len(word)
    while i > 0 and word[i - 1] in letters:
        i -= 1
    return word[i:]


def free_reduce(alphabet: Alphabet, word: Word) -> Word:
    """Delete adjacent ``x x^-1`` factors until none remain.

    One left-to-right pass with a stack computes the (unique) freely
    reduced form.
    """
    out = []
    inv = alphabet.inverse
    for x in word:
        if out and out[-1] == inv(x):
            out.pop()
        else:
            out.append(x)
    return tuple(out)
