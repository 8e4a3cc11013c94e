"""Shipped structures: free groups, finite groups from multiplication
tables, small construction outputs, and the Stallings group.

The Stallings group is the HNN extension of F2 x F2 over its exponent-sum
zero subgroup, generated by a, b, c, d and the stable letter s:

    [a,c] = [a,d] = [b,c] = [b,d] = 1,
    [s, a b^-1] = [s, a c^-1] = [s, a d^-1] = 1.

Its normal forms are Britton-style: a freely reduced {a,b}-word, a freely
reduced {c,d}-word, then alternating stable-letter and a-power blocks.
The module ships the structure together with an independent normalizer
that runs the group's infinite complete rewriting system directly, for
cross-checking the flow solver.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .constructions import ExtensionData, GraphSpec, IndexData, extension, finite_index, graph_product
from .fsa import Fsa, all_words, letters_language, suffix_language, word_language
from .stacking import PiecewiseRule, PsiCertificate, StackingStructure, register_oracle
from .words import Alphabet, Word, formal_inverse, max_suffix


# ---------------------------------------------------------------------------
# free groups
# ---------------------------------------------------------------------------


def free_group(names) -> StackingStructure:
    """Free group on the given generator names: normal forms are the freely
    reduced words, and every Cayley-graph edge lies in the tree."""
    if isinstance(names, int):
        names = [chr(ord("a") + i) for i in range(names)]
    names = list(names)
    alphabet = Alphabet.from_names(names)
    letters = alphabet.letters
    # state 0 is the empty word; state i+1 means the word ends with letters[i]
    rows = [{x: letters.index(x) + 1 for x in letters}]
    for x in letters:
        row = {}
        for y in letters:
            if y != alphabet.inverse(x):
                row[y] = letters.index(y) + 1
        rows.append(row)
    nf = Fsa(letters, len(letters) + 1, 0, set(range(len(letters) + 1)), rows)
    rules = [PiecewiseRule(nf, x, (x,)) for x in letters]
    structure = StackingStructure(
        alphabet, nf, 1, rules=rules,
        func=lambda y, a: (a,),
        name=f"free({','.join(names)})",
    )
    structure.psi = PsiCertificate(2, lambda y, a: (0, 0))
    return structure


# ---------------------------------------------------------------------------
# finite groups from multiplication tables
# ---------------------------------------------------------------------------


def finite_group(elements, mult, generators, name: str = "") -> StackingStructure:
    """Structure for a finite group given by a multiplication table.

    ``elements`` lists the group elements (first one the identity),
    ``mult`` is a callable or nested dict with ``mult[g][h]``, and
    ``generators`` maps letters to elements; the letter set must be closed
    under inversion of the named elements.  Normal forms come from the
    breadth-first shortlex spanning tree, and a non-tree edge flows back
    through the basepoint: formal_inverse(y) followed by the target's
    normal form, which touches tree edges only.
    """
    elements = list(elements)
    identity = elements[0]
    op = mult if callable(mult) else (lambda g, h: mult[g][h])
    letters = tuple(generators)
    targets = {x: generators[x] for x in letters}
    inv_elem = {}
    for g in elements:
        for h in elements:
            if op(g, h) == identity and op(h, g) == identity:
                inv_elem[g] = h
    inverses = {}
    for x in letters:
        partners = [y for y in letters if targets[y] == inv_elem[targets[x]]]
        if not partners:
            raise ValueError(f"no letter for the inverse of {x!r}")
        inverses[x] = partners[0]
    alphabet = Alphabet(letters, inverses)

    nfs = {identity: ()}
    frontier = [identity]
    while frontier:
        nxt = []
        for g in frontier:
            for x in letters:
                h = op(g, targets[x])
                if h not in nfs:
                    nfs[h] = nfs[g] + (x,)
                    nxt.append(h)
        frontier = sorted(nxt, key=lambda h: alphabet.word_key(nfs[h]))
    if len(nfs) != len(elements):
        raise ValueError("the chosen generators do not generate the group")

    index = {g: i for i, g in enumerate(elements)}
    rows = [dict() for _ in elements]
    for g in elements:
        for x in letters:
            h = op(g, targets[x])
            if nfs[h] == nfs[g] + (x,):
                rows[index[g]][x] = index[h]
    nf = Fsa(letters, len(elements), index[identity], set(range(len(elements))), rows)

    def func(y: Word, a: str) -> Word:
        g = identity
        for x in y:
            g = op(g, targets[x])
        h = op(g, targets[a])
        if nfs[h] == y + (a,) or (y and y[-1] == alphabet.inverse(a)):
            return (a,)
        return formal_inverse(alphabet, y) + nfs[h]

    rules = []
    for g in elements:
        for x in letters:
            rules.append(PiecewiseRule(
                word_language(letters, [nfs[g]]), x, func(nfs[g], x)))
    bound = max(len(r.output) for r in rules)
    relators = []
    for g in elements:
        for x in letters:
            h = op(g, targets[x])
            if nfs[h] != nfs[g] + (x,):
                rho = nfs[g] + (x,) + formal_inverse(alphabet, nfs[h])
                if rho not in relators:
                    relators.append(rho)
    structure = StackingStructure(
        alphabet, nf, bound, rules=rules, func=func, relators=relators,
        name=name or "finite",
    )
    # every non-tree flow path backtracks to the basepoint and climbs the
    # tree, so nothing sits below any non-tree edge
    structure.psi = PsiCertificate(2, lambda y, a: (0, 0))
    return structure


def s3_structure() -> StackingStructure:
    """Symmetric group on three points, generated by a 3-cycle and a
    transposition."""
    perms = []
    for p in [(0, 1, 2), (1, 2, 0), (2, 0, 1), (1, 0, 2), (0, 2, 1), (2, 1, 0)]:
        perms.append(p)

    def op(p, q):
        return tuple(p[q[i]] for i in range(3))

    generators = {"r": (1, 2, 0), "r^-1": (2, 0, 1), "t": (1, 0, 2)}
    return finite_group(perms, op, generators, name="S3")


# ---------------------------------------------------------------------------
# the Stallings group
# ---------------------------------------------------------------------------

_STALLINGS_NAMES = ("a", "b", "c", "d", "s")
_AB = frozenset({"a", "a^-1", "b", "b^-1"})
_CD = frozenset({"c", "c^-1", "d", "d^-1"})
_B_ONLY = frozenset({"b", "b^-1"})
_A_ONLY = frozenset({"a", "a^-1"})
_S_ONLY = frozenset({"s", "s^-1"})
_BCD = frozenset(_B_ONLY | _CD)
_Z = frozenset(_AB | _CD)


def stallings_alphabet() -> Alphabet:
    return Alphabet.from_names(_STALLINGS_NAMES)


def stallings_nf_automaton() -> Fsa:
    """Normal-form acceptor built as the complement of the factor ideal of
    the rewriting system's left-hand sides: inverse pairs, a {c,d} letter
    before an {a,b} letter, and a stable letter followed by a signed
    a-power and a {b,c,d} letter."""
    alphabet = stallings_alphabet()
    letters = alphabet.letters
    pairs = word_language(letters, [(x, alphabet.inverse(x)) for x in letters])
    cd_ab = letters_language(letters, _CD).concat(letters_language(letters, _AB))
    a_runs = letters_language(letters, ["a"]).star().union(
        letters_language(letters, ["a^-1"]).star())
    s_block = letters_language(letters, _S_ONLY).concat(a_runs).concat(
        letters_language(letters, _BCD))
    factors = pairs.union(cd_ab).union(s_block)
    anywhere = all_words(letters).concat(factors).concat(all_words(letters))
    return anywhere.complement().minimize()


def _sign_letter(base: str, exponent: int) -> str:
    return base if exponent > 0 else base + "^-1"


def _a_power(exponent: int) -> Word:
    if exponent >= 0:
        return ("a",) * exponent
    return ("a^-1",) * (-exponent)


def _find_redex(word: list, inverse) -> Optional[tuple]:
    """Leftmost position where a rewriting rule applies.

    Returns (kind, i, j): "free" and "comm" rewrite word[i:i+2]; "s" rewrites
    word[i:j+1], the stable letter through its maximal signed a-power to the
    following {b,c,d} letter.
    """
    n = len(word)
    for i in range(n - 1):
        x, y = word[i], word[i + 1]
        if y == inverse(x):
            return ("free", i, i + 1)
        if x in _CD and y in _AB:
            return ("comm", i, i + 1)
        if x in _S_ONLY:
            j = i + 1
            if j < n and word[j] in _A_ONLY:
                block = word[j]
                while j < n and word[j] == block:
                    j += 1
            if j < n and word[j] in _BCD:
                return ("s", i, j)
    return None


def stallings_rewrite(word: Word, budget: int = 10**6) -> Word:
    """Independent normalizer: run the group's complete rewriting system
    (free reduction, commutations of {c,d} past {a,b}, and the two
    stable-letter rule families) to termination, leftmost first."""
    alphabet = stallings_alphabet()
    inverse = alphabet.inverse
    w = list(word)
    steps = 0
    while True:
        steps += 1
        if steps > budget:
            raise RuntimeError("rewriting budget exhausted")
        redex = _find_redex(w, inverse)
        if redex is None:
            return tuple(w)
        kind, i, j = redex
        if kind == "free":
            del w[i:j + 1]
            continue
        if kind == "comm":
            w[i], w[j] = w[j], w[i]
            continue
        eps = 1 if w[i] == "s" else -1
        block = w[i + 1:j]
        power = len(block) if (block and block[0] == "a") else -len(block)
        target = w[j]
        eta = 1 if target in ("b", "c", "d") else -1
        base = target[0]
        s_letter = _sign_letter("s", eps)
        if base == "b":
            # s^e a^i b^n -> a^i b^n a^(-n-i) s^e a^(n+i)
            repl = list(_a_power(power)) + [target] + list(_a_power(-eta - power)) \
                + [s_letter] + list(_a_power(eta + power))
        else:
            # s^e a^i y^n -> a^(-n) y^n s^e a^(n+i)
            repl = list(_a_power(-eta)) + [target] + [s_letter] + list(_a_power(eta + power))
        w[i:j + 1] = repl


def stallings_irreducible(word: Word) -> bool:
    """True when no rewriting rule applies, checked by the rule scanner."""
    return _find_redex(list(word), stallings_alphabet().inverse) is None


def _stallings_rules(alphabet: Alphabet, nf: Fsa) -> list:
    letters = alphabet.letters
    inv = alphabet.inverse
    z_star = Fsa(letters, 1, 0, {0}, [{x: 0 for x in letters if x not in _S_ONLY}])
    rules = []
    # tree edges: the normal form extends, or the edge backtracks
    for x in letters:
        guard = nf.quotient((x,)).union(nf.intersect(suffix_language(letters, [inv(x)])))
        rules.append(PiecewiseRule(guard, x, (x,)))
    # {a,b} letter after a {c,d} block: conjugate through the last letter
    for x in sorted(_AB):
        for z in sorted(_CD):
            guard = nf.intersect(z_star).intersect(suffix_language(letters, [z]))
            rules.append(PiecewiseRule(guard, x, (inv(z), x, z)))
    # {c,d} letter behind the a-power of a stable block
    for x in sorted(_CD):
        for z in sorted(_A_ONLY):
            guard = nf.intersect(suffix_language(letters, [z])).minus(z_star)
            rules.append(PiecewiseRule(guard, x, (inv(z), x, z)))
    # {b} letter behind the a-power of a stable block: conjugate by c
    for x in sorted(_B_ONLY):
        for eta in (1, -1):
            z = _sign_letter("a", eta)
            guard = nf.intersect(suffix_language(letters, [z])).minus(z_star)
            rules.append(PiecewiseRule(
                guard, x, (_sign_letter("c", -eta), x, _sign_letter("c", eta))))
    # {b,c,d} letter directly after a stable letter
    for eta in (1, -1):
        for base in ("b", "c", "d"):
            x = _sign_letter(base, eta)
            for z in sorted(_S_ONLY):
                guard = nf.intersect(suffix_language(letters, [z]))
                rules.append(PiecewiseRule(
                    guard, x, (inv(z), x) + _a_power(-eta) + (z,) + _a_power(eta)))
    return rules


def _stallings_func(alphabet: Alphabet, nf: Fsa):
    inv = alphabet.inverse

    def func(y: Word, x: str) -> Word:
        if nf.accepts(y + (x,)) or (y and y[-1] == inv(x)):
            return (x,)
        last = y[-1]
        in_z = all(l not in _S_ONLY for l in y)
        if x in _AB and in_z and last in _CD:
            return (inv(last), x, last)
        if x in _CD and not in_z and last in _A_ONLY:
            return (inv(last), x, last)
        if x in _B_ONLY and not in_z and last in _A_ONLY:
            eta = 1 if last == "a" else -1
            return (_sign_letter("c", -eta), x, _sign_letter("c", eta))
        if x in _BCD and last in _S_ONLY:
            eta = 1 if x in ("b", "c", "d") else -1
            return (inv(last), x) + _a_power(-eta) + (last,) + _a_power(eta)
        raise AssertionError(f"unclassified edge ({y}, {x})")

    return func


def stallings_psi(structure: StackingStructure) -> PsiCertificate:
    """Triple-valued certificate: stable-letter count, trailing a-power,
    and a flag separating the b-conjugation case."""

    def fn(y: Word, x: str) -> tuple:
        if structure.is_tree_edge(y, x):
            return (0, 0, 0)
        in_z = all(l not in _S_ONLY for l in y)
        if x in _AB and in_z:
            return (0, 0, len(max_suffix(y, _CD)))
        n_s = sum(1 for l in y if l in _S_ONLY)
        if x in _CD and not in_z:
            return (n_s, len(max_suffix(y, _A_ONLY)), 0)
        if x in _B_ONLY and not in_z:
            return (n_s, len(max_suffix(y, _A_ONLY)), 1)
        raise AssertionError(f"unclassified non-tree edge ({y}, {x})")

    return PsiCertificate(3, fn)


def stallings_structure() -> StackingStructure:
    alphabet = stallings_alphabet()
    nf = stallings_nf_automaton()
    inv = alphabet.inverse

    def comm(x, y):
        return (x, y, inv(x), inv(y))

    relators = [
        comm("a", "c"), comm("a", "d"), comm("b", "c"), comm("b", "d"),
        ("s", "a", "b^-1", "s^-1", "b", "a^-1"),
        ("s", "a", "c^-1", "s^-1", "c", "a^-1"),
        ("s", "a", "d^-1", "s^-1", "d", "a^-1"),
    ]
    structure = StackingStructure(
        alphabet, nf, 5,
        rules=_stallings_rules(alphabet, nf),
        func=_stallings_func(alphabet, nf),
        relators=relators,
        oracle=stallings_rewrite,
        oracle_name="builtin:stallings_rewrite",
        name="stallings",
    )
    structure.psi = stallings_psi(structure)
    return structure


register_oracle("builtin:stallings_rewrite", stallings_rewrite)


# ---------------------------------------------------------------------------
# construction outputs shipped as instances
# ---------------------------------------------------------------------------


def z2_structure() -> StackingStructure:
    """Z x Z as the graph product of two infinite cyclic groups on an
    edge."""
    return graph_product(
        GraphSpec(2, {(1, 2)}),
        [free_group(["a"]), free_group(["b"])],
        name="Z2",
    )


def f2xf2_structure() -> StackingStructure:
    """F2 x F2, the direct product of free groups on {a,b} and {c,d}."""
    return graph_product(
        GraphSpec(2, {(1, 2)}),
        [free_group(["a", "b"]), free_group(["c", "d"])],
        name="F2xF2",
    )


def heisenberg_structure() -> StackingStructure:
    """Integral Heisenberg group as a central extension of Z (letter b)
    acting on Z^2 (letters a1, a2): conjugation by b sends a2 to a1 a2 and
    fixes the central a1."""
    K = graph_product(
        GraphSpec(2, {(1, 2)}),
        [free_group(["a1"]), free_group(["a2"])],
        name="Z2(a1,a2)",
    )
    Q = free_group(["b"])
    conj = {
        ("b", "a1"): ("a1",),
        ("b", "a1^-1"): ("a1^-1",),
        ("b", "a2"): ("a1", "a2"),
        ("b", "a2^-1"): ("a1^-1", "a2^-1"),
        ("b^-1", "a1"): ("a1",),
        ("b^-1", "a1^-1"): ("a1^-1",),
        ("b^-1", "a2"): ("a1^-1", "a2"),
        ("b^-1", "a2^-1"): ("a1", "a2^-1"),
    }
    corr = {("b", ("b",)): (), ("b^-1", ("b^-1",)): ()}
    return extension(
        ExtensionData(K, Q, conj, corr), name="heisenberg")


HEISENBERG_GENERATOR_MATRICES = {
    # upper unitriangular coordinates (x, y, z):
    # (x1,y1,z1) * (x2,y2,z2) = (x1+x2, y1+y2, z1 + z2 + x1*y2)
    "a1": (0, 0, 1),
    "a1^-1": (0, 0, -1),
    "a2": (1, 0, 0),
    "a2^-1": (-1, 0, 0),
    "b": (0, -1, 0),
    "b^-1": (0, 1, 0),
}


def heisenberg_matrix(word: Word) -> tuple:
    """3x3 integer-matrix value of a word, in upper unitriangular
    coordinates; the independent oracle for the Heisenberg instance."""
    x, y, z = 0, 0, 0
    for letter in word:
        dx, dy, dz = HEISENBERG_GENERATOR_MATRICES[letter]
        x, y, z = x + dx, y + dy, z + dz + x * dy
    return (x, y, z)


def index2z_structure() -> StackingStructure:
    """Z embedded with index 2 in Z: the subgroup is generated by h, the
    supergroup by g with g^2 = h."""
    H = free_group(["h"])
    table1 = {"g^-1": (("h^-1",), "g")}
    table2 = {
        ("g", "h"): (("h",), "g"),
        ("g", "h^-1"): (("h^-1",), "g"),
        ("g", "g"): (("h",), ""),
        ("g", "g^-1"): ((), ""),
        ("g^-1", "h"): ((), "g"),
        ("g^-1", "h^-1"): (("h^-1", "h^-1"), "g"),
        ("g^-1", "g"): ((), ""),
        ("g^-1", "g^-1"): (("h^-1",), ""),
    }
    return finite_index(
        IndexData(H, ("g",), table1, table2), name="index2z")


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

_BUILDERS = {
    "free1": lambda: free_group(["a"]),
    "free2": lambda: free_group(["a", "b"]),
    "z": lambda: free_group(["a"]),
    "z2": z2_structure,
    "f2xf2": f2xf2_structure,
    "heisenberg": heisenberg_structure,
    "index2z": index2z_structure,
    "s3": s3_structure,
    "stallings": stallings_structure,
}

_CACHE: dict = {}


def builtin_names() -> list:
    return sorted(_BUILDERS)


def builtin(name: str) -> StackingStructure:
    """Named, pre-verified structures; see :func:`builtin_names`."""
    key = name.lower().replace("-", "").replace("_", "")
    if key not in _BUILDERS:
        raise KeyError(f"unknown builtin structure {name!r}")
    if key not in _CACHE:
        _CACHE[key] = _BUILDERS[key]()
    return _CACHE[key]
