"""Closure constructions: graph products, extensions, finite-index
supergroups.

Each construction consumes verified stacking structures and emits a new
one whose stacking map is given both as a fast callable and, when every
input carries piecewise-regular rules, as piecewise-regular rules; a
certificate witnessing well-foundedness is attached.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .fsa import Fsa, letters_language, relabel_fsa, suffix_language, union_many, word_language
from .stacking import (
    ChainExitsBall,
    PiecewiseRule,
    PsiCertificate,
    StackingStructure,
    descending_chain_length,
)
from .words import Alphabet, Word, formal_inverse, max_suffix

MARK_SKIP = "$"
MARK_HIGH = ">"


# ---------------------------------------------------------------------------
# graph products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GraphSpec:
    """Finite simplicial graph on vertices 1..n; vertex order is the integer
    order."""

    n: int
    edges: frozenset

    def __init__(self, n: int, edges):
        object.__setattr__(self, "n", n)
        norm = set()
        for i, j in edges:
            if i == j:
                raise ValueError("no loops allowed")
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError("vertex out of range")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def complete(cls, n: int) -> "GraphSpec":
        return cls(n, {(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)})

    @classmethod
    def discrete(cls, n: int) -> "GraphSpec":
        return cls(n, set())

    def adjacent(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def neighbors(self, i: int) -> frozenset:
        return frozenset(
            j for j in range(1, self.n + 1) if j != i and self.adjacent(i, j))


def _letter_owner(alphabets: Sequence[Alphabet]) -> dict:
    owner = {}
    for k, alpha in enumerate(alphabets, start=1):
        for x in alpha.letters:
            if x in owner:
                raise ValueError(f"vertex alphabets are not disjoint at {x!r}")
            if x in (MARK_SKIP, MARK_HIGH):
                raise ValueError(f"letter {x!r} collides with a marker symbol")
            owner[x] = k
    return owner


def _pi_letter_map(i: int, spec: GraphSpec, alphabets: Sequence[Alphabet]) -> dict:
    """Letter-to-word map realizing the vertex projection: own letters stay,
    higher adjacent letters become the high marker, lower adjacent letters
    vanish, non-adjacent letters become the skip marker."""
    them = spec.neighbors(i)
    table = {}
    for k, alpha in enumerate(alphabets, start=1):
        for x in alpha.letters:
            if k == i:
                table[x] = (x,)
            elif k in them and k > i:
                table[x] = (MARK_HIGH,)
            elif k in them and k < i:
                table[x] = ()
            else:
                table[x] = (MARK_SKIP,)
    return table


def pi(i: int, spec: GraphSpec, alphabets: Sequence[Alphabet], word: Word) -> Word:
    """Vertex projection of a word over the union alphabet."""
    table = _pi_letter_map(i, spec, alphabets)
    out = []
    for x in word:
        if x not in table:
            raise ValueError(f"letter {x!r} belongs to no vertex alphabet")
        out.extend(table[x])
    return tuple(out)


def _marked_block_star(nf: Fsa) -> tuple:
    """Over C_i = A_i + markers: returns ((N >* $)*, (N >* $)* N >*)."""
    ci = nf.symbols + (MARK_SKIP, MARK_HIGH)
    n_lifted = nf.with_symbols(ci)
    high_star = letters_language(ci, [MARK_HIGH]).star()
    skip = letters_language(ci, [MARK_SKIP])
    block = n_lifted.concat(high_star).concat(skip)
    prefix = block.star()
    full = prefix.concat(n_lifted).concat(high_star)
    return prefix, full


def product_normal_forms(spec: GraphSpec, structures: Sequence[StackingStructure]) -> Fsa:
    """Normal forms of the graph product: the intersection over vertices of
    the projection preimages of blockwise component normal forms."""
    if spec.n != len(structures):
        raise ValueError("one structure per vertex required")
    alphabets = [s.alphabet for s in structures]
    _letter_owner(alphabets)
    union_letters = tuple(x for a in alphabets for x in a.letters)
    result = None
    for i, s in enumerate(structures, start=1):
        _, full = _marked_block_star(s.normal_forms)
        table = _pi_letter_map(i, spec, alphabets)
        piece = full.hom_preimage(table, union_letters)
        result = piece if result is None else result.intersect(piece)
    return result.minimize()


def _pi_ends_high(i: int, owner: dict, spec: GraphSpec, word: Word) -> bool:
    """Does the vertex projection of ``word`` end with the high marker,
    i.e. is the last non-erased letter owned by a higher adjacent vertex?"""
    them = spec.neighbors(i)
    for x in reversed(word):
        k = owner[x]
        if k == i:
            return False
        if k in them:
            if k > i:
                return True
            continue  # lower adjacent letters are erased
        return False  # non-adjacent letters project to the skip marker
    return False


def graph_product(
    spec: GraphSpec,
    structures: Sequence[StackingStructure],
    chi_radius: int = 8,
    name: str = "",
) -> StackingStructure:
    """Stacking structure for the graph product of the given vertex
    structures over the union of their alphabets."""
    if spec.n != len(structures):
        raise ValueError("one structure per vertex required")
    alphabets = [s.alphabet for s in structures]
    owner = _letter_owner(alphabets)
    letters = tuple(x for a in alphabets for x in a.letters)
    inverses = {}
    for a in alphabets:
        for x in a.letters:
            inverses[x] = a.inverse(x)
    alphabet = Alphabet(letters, inverses)
    nf = product_normal_forms(spec, structures)

    comp = list(structures)
    letter_sets = [set(a.letters) for a in alphabets]

    def func(y: Word, a: str) -> Word:
        k = owner[a]
        if _pi_ends_high(k, owner, spec, y):
            b = y[-1]
            return (alphabet.inverse(b), a, b)
        return comp[k - 1].stack(max_suffix(y, letter_sets[k - 1]), a)

    rules = []
    if all(s.rules for s in structures):
        for k, s in enumerate(structures, start=1):
            prefix_ci, _ = _marked_block_star(s.normal_forms)
            table = _pi_letter_map(k, spec, alphabets)
            prefix_lang = prefix_ci.hom_preimage(table, letters)
            ci = s.normal_forms.symbols + (MARK_SKIP, MARK_HIGH)
            ends_high_ci = Fsa(ci, 1, 0, {0}, [{c: 0 for c in ci}]).concat(
                letters_language(ci, [MARK_HIGH]))
            ends_high = ends_high_ci.hom_preimage(table, letters)
            by_out = {}
            for r in s.rules:
                by_out.setdefault((r.letter, r.output), []).append(r.guard)
            for a in s.alphabet.letters:
                for (letter, output), guards in sorted(
                        by_out.items(), key=lambda kv: (kv[0][0], kv[0][1])):
                    if letter != a:
                        continue
                    n_kax = union_many(guards) if len(guards) > 1 else guards[0]
                    guard = nf.intersect(
                        prefix_lang.concat(n_kax.with_symbols(letters)))
                    if guard.is_empty():
                        continue
                    rules.append(PiecewiseRule(guard, a, output))
                for j in sorted(spec.neighbors(k)):
                    for b in structures[j - 1].alphabet.letters:
                        guard = nf.intersect(ends_high).intersect(
                            suffix_language(letters, [b]))
                        if guard.is_empty():
                            continue
                        rules.append(PiecewiseRule(
                            guard, a, (alphabet.inverse(b), a, b)))

    bound = max([3] + [s.bound for s in structures])
    relators = []
    for s in structures:
        relators.extend(s.relators)
    for (i, j) in sorted(spec.edges):
        for x in structures[i - 1].alphabet.letters:
            for y in structures[j - 1].alphabet.letters:
                relators.append((x, y, alphabet.inverse(x), alphabet.inverse(y)))

    structure = StackingStructure(
        alphabet, nf, bound, rules=rules, func=func, relators=relators,
        name=name or f"graph_product(n={spec.n})",
    )

    balls = [None] * len(comp)
    memos = [dict() for _ in comp]

    def psi_fn(y: Word, a: str) -> Optional[tuple]:
        k = owner[a]
        if _pi_ends_high(k, owner, spec, y):
            return (len(y), 0)
        v = max_suffix(y, letter_sets[k - 1])
        if balls[k - 1] is None:
            balls[k - 1] = set(comp[k - 1].ball(chi_radius))
        try:
            chi = descending_chain_length(comp[k - 1], v, a, balls[k - 1], memos[k - 1])
        except ChainExitsBall:
            return None
        return (0, chi)

    structure.psi = PsiCertificate(2, psi_fn)
    return structure


# ---------------------------------------------------------------------------
# extensions
# ---------------------------------------------------------------------------


@dataclass
class ExtensionData:
    """Input data for an extension of ``kernel`` by ``quotient``.

    ``hat`` renames quotient letters to fresh letters of the extension
    (identity names by default).  ``conj`` maps ``(c, a)``, for a hat letter
    ``c`` and a kernel letter ``a``, to the kernel normal form of
    ``c a c^-1``.  ``corr`` maps ``(c, z)``, for each word ``z`` in the
    per-letter image of the quotient stacking map, to the kernel normal
    form of ``c * hat(z)^-1``.  When the quotient carries relators, their
    kernel normal forms must be supplied in ``q_relator_images``.
    """

    kernel: StackingStructure
    quotient: StackingStructure
    conj: dict
    corr: dict
    hat: Optional[dict] = None
    q_relator_images: dict = field(default_factory=dict)


def _per_letter_outputs(structure: StackingStructure) -> dict:
    """Outputs of the stacking map grouped by edge letter, read off the
    rules (the image is finite because the flow function is bounded)."""
    if not structure.rules:
        raise ValueError("per-letter image requires piecewise-regular rules")
    out = {}
    for r in structure.rules:
        out.setdefault(r.letter, [])
        if r.output not in out[r.letter]:
            out[r.letter].append(r.output)
    return out


def extension(data: ExtensionData, chi_radius: int = 8, name: str = "") -> StackingStructure:
    K, Q = data.kernel, data.quotient
    hat = dict(data.hat) if data.hat else {b: b for b in Q.alphabet.letters}
    if set(hat) != set(Q.alphabet.letters):
        raise ValueError("hat must be defined exactly on the quotient letters")
    if len(set(hat.values())) != len(hat):
        raise ValueError("hat must be injective")
    unhat = {v: k for k, v in hat.items()}
    for b in Q.alphabet.letters:
        if hat[Q.alphabet.inverse(b)] != _hat_inverse_name(hat, Q, b):
            raise ValueError("hat must be inverse-compatible")
    for c in hat.values():
        if c in K.alphabet:
            raise ValueError(f"hat letter {c!r} collides with a kernel letter")

    a_letters = K.alphabet.letters
    hat_letters = tuple(hat[b] for b in Q.alphabet.letters)
    letters = a_letters + hat_letters
    inverses = {x: K.alphabet.inverse(x) for x in a_letters}
    for b in Q.alphabet.letters:
        inverses[hat[b]] = hat[Q.alphabet.inverse(b)]
    alphabet = Alphabet(letters, inverses)

    conj = {k: tuple(v) for k, v in data.conj.items()}
    for c in hat_letters:
        for a in a_letters:
            if (c, a) not in conj:
                raise ValueError(f"conj table misses ({c!r}, {a!r})")
            if not K.is_normal_form(conj[(c, a)]):
                raise ValueError(f"conj({c!r}, {a!r}) is not a kernel normal form")
    corr = {(c, tuple(z)): tuple(u) for (c, z), u in data.corr.items()}
    q_out = _per_letter_outputs(Q) if Q.rules else None
    if q_out is not None:
        for c in hat_letters:
            for z in q_out.get(unhat[c], ()):
                if (c, z) not in corr:
                    raise ValueError(f"corr table misses ({c!r}, {z})")
    for (c, z), u in corr.items():
        if not K.is_normal_form(u):
            raise ValueError(f"corr({c!r}, {z}) is not a kernel normal form")
        if z == (unhat[c],) and u != ():
            raise ValueError(f"corr({c!r}, {z}) must be empty on tree edges")
    if Q.relators:
        for rho in Q.relators:
            if tuple(rho) not in data.q_relator_images:
                raise ValueError("kernel images of quotient relators are required")

    hat_q_nf = relabel_fsa(Q.normal_forms, hat)
    nf = K.normal_forms.with_symbols(letters).concat(
        hat_q_nf.with_symbols(letters)).minimize()

    hat_set = set(hat_letters)

    def q_part(y: Word) -> Word:
        t_hat = max_suffix(y, hat_set)
        return tuple(unhat[x] for x in t_hat)

    def func(y: Word, c: str) -> Word:
        if c in hat_set:
            z = Q.stack(q_part(y), unhat[c])
            u = corr.get((c, z))
            if u is None:
                raise KeyError(f"corr table misses ({c!r}, {z})")
            return u + tuple(hat[x] for x in z)
        if not y or y[-1] not in hat_set:
            return K.stack(y, c)
        b = y[-1]
        return (alphabet.inverse(b),) + conj[(b, c)] + (b,)

    rules = []
    if K.rules and Q.rules:
        k_nf_lifted = K.normal_forms.with_symbols(letters)
        k_by_out = {}
        for r in K.rules:
            k_by_out.setdefault((r.letter, r.output), []).append(r.guard)
        for c in a_letters:
            for (letter, output), guards in sorted(
                    k_by_out.items(), key=lambda kv: (kv[0][0], kv[0][1])):
                if letter != c:
                    continue
                g = union_many(guards) if len(guards) > 1 else guards[0]
                guard = g.with_symbols(letters)
                if guard.is_empty():
                    continue
                rules.append(PiecewiseRule(guard, c, output))
            for b in hat_letters:
                guard = nf.intersect(suffix_language(letters, [b]))
                if guard.is_empty():
                    continue
                rules.append(PiecewiseRule(
                    guard, c, (alphabet.inverse(b),) + conj[(b, c)] + (b,)))
        q_by_out = {}
        for r in Q.rules:
            q_by_out.setdefault((r.letter, r.output), []).append(r.guard)
        for c in hat_letters:
            for (letter, output), guards in sorted(
                    q_by_out.items(), key=lambda kv: (kv[0][0], kv[0][1])):
                if letter != unhat[c]:
                    continue
                g = union_many(guards) if len(guards) > 1 else guards[0]
                tail = relabel_fsa(g, hat).with_symbols(letters)
                guard = k_nf_lifted.concat(tail).minimize()
                if guard.is_empty():
                    continue
                rules.append(PiecewiseRule(
                    guard, c, corr[(c, output)] + tuple(hat[x] for x in output)))

    big_m = max((len(v) for v in conj.values()), default=0)
    small_m = max((len(u) for u in corr.values()), default=0)
    bound = max(K.bound, 2 + big_m, Q.bound + small_m)

    relators = list(K.relators)
    for b in hat_letters:
        for a in a_letters:
            relators.append(
                (b, a, alphabet.inverse(b)) + formal_inverse(K.alphabet, conj[(b, a)]))
    for rho in Q.relators:
        image = tuple(data.q_relator_images[tuple(rho)])
        relators.append(
            tuple(hat[x] for x in rho) + formal_inverse(K.alphabet, image))

    structure = StackingStructure(
        alphabet, nf, bound, rules=rules, func=func, relators=relators,
        name=name or f"extension({K.name or 'K'} by {Q.name or 'Q'})",
    )

    state = {"k_ball": None, "q_ball": None}
    k_memo: dict = {}
    q_memo: dict = {}

    def psi_fn(y: Word, c: str) -> Optional[tuple]:
        if c in hat_set:
            if state["q_ball"] is None:
                state["q_ball"] = set(Q.ball(chi_radius))
            try:
                chi = descending_chain_length(
                    Q, q_part(y), unhat[c], state["q_ball"], q_memo)
            except ChainExitsBall:
                return None
            return (3, chi)
        if y and y[-1] in hat_set:
            return (2, len(max_suffix(y, hat_set)))
        if state["k_ball"] is None:
            state["k_ball"] = set(K.ball(chi_radius))
        try:
            chi = descending_chain_length(K, y, c, state["k_ball"], k_memo)
        except ChainExitsBall:
            return None
        return (1, chi)

    structure.psi = PsiCertificate(2, psi_fn)
    return structure


def _hat_inverse_name(hat: dict, Q: StackingStructure, b: str) -> str:
    """The hat letter that must serve as the inverse of hat(b)."""
    return hat[Q.alphabet.inverse(b)]


# ---------------------------------------------------------------------------
# finite-index supergroups
# ---------------------------------------------------------------------------


@dataclass
class IndexData:
    """Input data for a supergroup containing ``subgroup`` with finite
    index.

    ``transversal`` lists fresh letters for the nontrivial coset
    representatives (the identity representative is implicit).  ``table1``
    maps each non-representative letter ``x`` to the normal form
    ``(u_x, t_x)`` of the element ``x``; ``table2`` maps every pair
    ``(x, y)`` with ``x`` a coset letter or its inverse and ``y`` any
    generator to the normal form ``(u, t)`` of the product ``x y``.  In
    both tables ``u`` is a subgroup normal form and ``t`` is a transversal
    letter or the empty string.
    """

    subgroup: StackingStructure
    transversal: tuple
    table1: dict
    table2: dict
    self_inverse: tuple = ()


def finite_index(data: IndexData, chi_radius: int = 8, name: str = "") -> StackingStructure:
    H = data.subgroup
    trans = tuple(data.transversal)
    if not trans:
        raise ValueError("transversal must contain a nontrivial representative")
    for t in trans:
        if t in H.alphabet:
            raise ValueError(f"transversal letter {t!r} collides with a subgroup letter")
    trans_alpha = Alphabet.from_names(trans, self_inverse=data.self_inverse)
    b_letters = trans_alpha.letters
    letters = H.alphabet.letters + b_letters
    inverses = {x: H.alphabet.inverse(x) for x in H.alphabet.letters}
    for x in b_letters:
        inverses[x] = trans_alpha.inverse(x)
    alphabet = Alphabet(letters, inverses)

    s_set = set(trans)
    b_set = set(b_letters)
    table1 = {x: (tuple(u), t) for x, (u, t) in data.table1.items()}
    table2 = {(x, y): (tuple(u), t) for (x, y), (u, t) in data.table2.items()}
    for x in b_letters:
        if x in s_set:
            continue
        if x not in table1:
            raise ValueError(f"table1 misses {x!r}")
    for x in b_letters:
        for y in letters:
            if (x, y) not in table2:
                raise ValueError(f"table2 misses ({x!r}, {y!r})")
        back = table2[(x, alphabet.inverse(x))]
        if back != ((), ""):
            raise ValueError(f"table2[{x!r}, inverse] must be trivial")
    for (u, t) in list(table1.values()) + list(table2.values()):
        if not H.is_normal_form(u):
            raise ValueError("table entry u is not a subgroup normal form")
        if t and t not in s_set:
            raise ValueError("table entry t must be a transversal letter or empty")

    def nf_word(u: Word, t: str) -> Word:
        return u + ((t,) if t else ())

    def rep_word(c: str) -> Word:
        # normal form of the single generator c from the transversal side
        if c in s_set:
            return (c,)
        u, t = table1[c]
        return nf_word(u, t)

    h_nf_lifted = H.normal_forms.with_symbols(letters)
    nf = h_nf_lifted.union(
        h_nf_lifted.concat(letters_language(letters, trans))).minimize()

    def func(y: Word, c: str) -> Word:
        if not y or y[-1] not in b_set:
            if c in b_set:
                return rep_word(c)
            return H.stack(y, c)
        x = y[-1]
        u, t = table2[(x, c)]
        return (alphabet.inverse(x),) + nf_word(u, t)

    rules = []
    if H.rules:
        h_by_out = {}
        for r in H.rules:
            h_by_out.setdefault((r.letter, r.output), []).append(r.guard)
        for c in H.alphabet.letters:
            for (letter, output), guards in sorted(
                    h_by_out.items(), key=lambda kv: (kv[0][0], kv[0][1])):
                if letter != c:
                    continue
                g = union_many(guards) if len(guards) > 1 else guards[0]
                guard = g.with_symbols(letters)
                if guard.is_empty():
                    continue
                rules.append(PiecewiseRule(guard, c, output))
        for c in b_letters:
            rules.append(PiecewiseRule(h_nf_lifted, c, rep_word(c)))
        for c in letters:
            for s in trans:
                guard = h_nf_lifted.concat(word_language(letters, [(s,)]))
                u, t = table2[(s, c)]
                rules.append(PiecewiseRule(
                    guard, c, (alphabet.inverse(s),) + nf_word(u, t)))

    used_lengths = [len(nf_word(*table2[(s, c)])) + 1 for s in trans for c in letters]
    rep_lengths = [len(rep_word(c)) for c in b_letters]
    bound = max([H.bound] + rep_lengths + used_lengths)

    relators = list(H.relators)
    for x in b_letters:
        if x not in s_set:
            relators.append((x,) + formal_inverse(alphabet, rep_word(x)))
    for x in b_letters:
        for y in letters:
            u, t = table2[(x, y)]
            relators.append((x, y) + formal_inverse(alphabet, nf_word(u, t)))

    structure = StackingStructure(
        alphabet, nf, bound, rules=rules, func=func, relators=relators,
        name=name or f"finite_index({H.name or 'H'})",
    )

    state = {"h_ball": None}
    h_memo: dict = {}

    def psi_fn(y: Word, c: str) -> Optional[tuple]:
        if y and y[-1] in b_set:
            return (1, 1)
        if c in b_set:
            return (1, 0)
        if state["h_ball"] is None:
            state["h_ball"] = set(H.ball(chi_radius))
        try:
            chi = descending_chain_length(H, y, c, state["h_ball"], h_memo)
        except ChainExitsBall:
            return None
        return (0, chi)

    structure.psi = PsiCertificate(2, psi_fn)
    return structure
