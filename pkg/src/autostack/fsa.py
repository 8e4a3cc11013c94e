"""Deterministic finite-state acceptors and padded-tuple machinery.

Acceptors are stored sparsely: a transition absent from the table is an
implicit, absorbing, non-accepting dead state.  This keeps machines over
large tuple alphabets (padded n-tuple alphabets grow like (|A|+1)^n)
small, while every operation still treats the transition function as
total.  Nondeterminism appears only transiently inside concatenation,
star, many-way union and first-coordinate projection, and is determinized
immediately.

All operations are pure and return new acceptors; instances are immutable
after construction and safe to share between concurrent tasks.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product as _iterproduct
from typing import Callable, Iterable, Sequence

DEAD = -1
PAD = "$"


def _freeze_symbol(sym):
    if isinstance(sym, list):
        return tuple(_freeze_symbol(s) for s in sym)
    return sym


class Fsa:
    """Deterministic acceptor over an ordered symbol set."""

    __slots__ = ("symbols", "n_states", "start", "accepting", "delta", "_rank")

    def __init__(self, symbols, n_states: int, start: int, accepting, delta):
        self.symbols = tuple(symbols)
        self._rank = {s: i for i, s in enumerate(self.symbols)}
        if len(self._rank) != len(self.symbols):
            raise ValueError("duplicate symbols")
        self.n_states = int(n_states)
        if not (0 <= start < self.n_states):
            raise ValueError("start state out of range")
        self.start = start
        self.accepting = frozenset(accepting)
        if not all(0 <= q < self.n_states for q in self.accepting):
            raise ValueError("accepting state out of range")
        rows = []
        for q in range(self.n_states):
            row = delta[q] if q < len(delta) else {}
            items = sorted(row.items(), key=lambda kv: self._rank[kv[0]])
            for sym, t in items:
                if not (0 <= t < self.n_states):
                    raise ValueError("transition target out of range")
            rows.append(dict(items))
        self.delta = tuple(rows)

    # -- membership ---------------------------------------------------

    def step(self, state: int, symbol) -> int:
        if state == DEAD:
            return DEAD
        return self.delta[state].get(symbol, DEAD)

    def run(self, word, state: int | None = None) -> int:
        q = self.start if state is None else state
        for sym in word:
            if q == DEAD:
                return DEAD
            q = self.delta[q].get(sym, DEAD)
        return q

    def accepts(self, word) -> bool:
        return self.run(word) in self.accepting

    # -- boolean algebra ----------------------------------------------

    def _require_same_alphabet(self, other: "Fsa"):
        if set(self.symbols) != set(other.symbols):
            raise ValueError("acceptors are over different alphabets")

    def _pairs(self, other: "Fsa", mode: str):
        """Crawl the reachable product of two sparse machines.

        ``mode`` picks which symbols to explore from a pair: intersection
        only needs moves defined on both sides, difference only those of
        the left side, union needs either.
        """
        index = {(self.start, other.start): 0}
        order = [(self.start, other.start)]
        rows = []
        i = 0
        while i < len(order):
            p, q = order[i]
            prow = self.delta[p] if p != DEAD else {}
            qrow = other.delta[q] if q != DEAD else {}
            if mode == "intersect":
                syms = [s for s in prow if s in qrow]
            elif mode == "diff":
                syms = list(prow)
            else:
                syms = list(prow) + [s for s in qrow if s not in prow]
            syms.sort(key=self._rank.__getitem__)
            row = {}
            for s in syms:
                np_, nq = prow.get(s, DEAD), qrow.get(s, DEAD)
                if mode == "intersect" and (np_ == DEAD or nq == DEAD):
                    continue
                if mode == "diff" and np_ == DEAD:
                    continue
                if np_ == DEAD and nq == DEAD:
                    continue
                key = (np_, nq)
                if key not in index:
                    index[key] = len(order)
                    order.append(key)
                row[s] = index[key]
            rows.append(row)
            i += 1
        return index, order, rows

    def _combine(self, other: "Fsa", mode: str, accept: Callable[[bool, bool], bool]) -> "Fsa":
        self._require_same_alphabet(other)
        index, order, rows = self._pairs(other, mode)
        accepting = {
            i
            for i, (p, q) in enumerate(order)
            if accept(p != DEAD and p in self.accepting, q != DEAD and q in other.accepting)
        }
        return Fsa(self.symbols, len(order), 0, accepting, rows).minimize()

    def union(self, other: "Fsa") -> "Fsa":
        return self._combine(other, "union", lambda a, b: a or b)

    def intersect(self, other: "Fsa") -> "Fsa":
        return self._combine(other, "intersect", lambda a, b: a and b)

    def minus(self, other: "Fsa") -> "Fsa":
        return self._combine(other, "diff", lambda a, b: a and not b)

    def complement(self) -> "Fsa":
        """Complement relative to the full alphabet's A*.

        The implicit dead state must be materialized since it becomes
        accepting.
        """
        dead = self.n_states
        rows = []
        for q in range(self.n_states):
            rows.append({s: self.delta[q].get(s, dead) for s in self.symbols})
        rows.append({s: dead for s in self.symbols})
        accepting = {q for q in range(self.n_states + 1) if q not in self.accepting}
        return Fsa(self.symbols, self.n_states + 1, self.start, accepting, rows).minimize()

    def concat(self, other: "Fsa") -> "Fsa":
        self._require_same_alphabet(other)
        n = self.n_states
        moves = {}
        for q in range(self.n_states):
            for s, t in self.delta[q].items():
                moves.setdefault((q, s), set()).add(t)
        for q in range(other.n_states):
            for s, t in other.delta[q].items():
                moves.setdefault((n + q, s), set()).add(n + t)
        eps = {q: {n + other.start} for q in self.accepting}
        nfa = _Nfa(self.symbols, n + other.n_states, {self.start},
                   {n + q for q in other.accepting}, moves, eps)
        return nfa.determinize().minimize()

    def star(self) -> "Fsa":
        # A fresh accepting hub state avoids the classical (b*ab)* pitfall
        # of looping final states straight back to the initial state.
        hub = self.n_states
        moves = {}
        for q in range(self.n_states):
            for s, t in self.delta[q].items():
                moves.setdefault((q, s), set()).add(t)
        eps = {hub: {self.start}}
        for q in self.accepting:
            eps.setdefault(q, set()).add(hub)
        nfa = _Nfa(self.symbols, self.n_states + 1, {hub}, {hub}, moves, eps)
        return nfa.determinize().minimize()

    # -- language operations --------------------------------------------

    def quotient(self, word) -> "Fsa":
        """Acceptor of ``L/w = {x : xw in L}``: re-target acceptance to the
        states from which ``word`` reaches acceptance."""
        accepting = {q for q in range(self.n_states) if self.run(word, q) in self.accepting}
        return Fsa(self.symbols, self.n_states, self.start, accepting, self.delta).minimize()

    def hom_preimage(self, hom: dict, symbols) -> "Fsa":
        """Acceptor over ``symbols`` of ``{w : h(w) in L}`` where ``h`` maps
        each symbol to a word over this acceptor's alphabet (extended as a
        monoid homomorphism)."""
        symbols = tuple(symbols)
        for s in symbols:
            if s not in hom:
                raise ValueError(f"homomorphism undefined on {s!r}")
        rows = []
        for q in range(self.n_states):
            row = {}
            for s in symbols:
                t = self.run(hom[s], q)
                if t != DEAD:
                    row[s] = t
            rows.append(row)
        return Fsa(symbols, self.n_states, self.start, self.accepting, rows).minimize()

    def with_symbols(self, symbols) -> "Fsa":
        """Same machine over an enlarged symbol set; new symbols are dead."""
        symbols = tuple(symbols)
        missing = [s for row in self.delta for s in row if s not in symbols]
        if missing:
            raise ValueError("with_symbols may only enlarge the alphabet")
        return Fsa(symbols, self.n_states, self.start, self.accepting, self.delta)

    # -- decision procedures --------------------------------------------

    def useful(self) -> frozenset:
        """States from which an accepting state is reachable."""
        back = {q: set() for q in range(self.n_states)}
        for q in range(self.n_states):
            for t in self.delta[q].values():
                back[t].add(q)
        seen = set(self.accepting)
        stack = list(self.accepting)
        while stack:
            q = stack.pop()
            for p in back[q]:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return frozenset(seen)

    def is_empty(self) -> bool:
        return self.start not in self.useful()

    def equivalent(self, other: "Fsa") -> bool:
        """Exact language equality via product crawl."""
        self._require_same_alphabet(other)
        index = {(self.start, other.start)}
        stack = [(self.start, other.start)]
        while stack:
            p, q = stack.pop()
            pa = p != DEAD and p in self.accepting
            qa = q != DEAD and q in other.accepting
            if pa != qa:
                return False
            prow = self.delta[p] if p != DEAD else {}
            qrow = other.delta[q] if q != DEAD else {}
            for s in set(prow) | set(qrow):
                key = (prow.get(s, DEAD), qrow.get(s, DEAD))
                if key != (DEAD, DEAD) and key not in index:
                    index.add(key)
                    stack.append(key)
        return True

    def minimize(self) -> "Fsa":
        """Trim to useful states, merge equivalent ones, renumber by a
        breadth-first crawl in symbol order (so equal languages give
        identical tables up to symbol order)."""
        reach = {self.start}
        stack = [self.start]
        while stack:
            q = stack.pop()
            for t in self.delta[q].values():
                if t not in reach:
                    reach.add(t)
                    stack.append(t)
        keep = reach & self.useful()
        if self.start not in keep:
            return empty_language(self.symbols)
        # Moore partition refinement; an entry leading out of ``keep`` is
        # identical to an absent (dead) entry and is dropped from signatures.
        cls = {q: int(q in self.accepting) for q in keep}
        while True:
            sigs = {}
            for q in keep:
                items = tuple(sorted(
                    (self._rank[s], cls[t])
                    for s, t in self.delta[q].items()
                    if t in keep
                ))
                sigs[q] = (cls[q], items)
            relabel = {}
            new_cls = {}
            for q in sorted(keep):
                sig = sigs[q]
                if sig not in relabel:
                    relabel[sig] = len(relabel)
                new_cls[q] = relabel[sig]
            if len(set(new_cls.values())) == len(set(cls.values())):
                cls = new_cls
                break
            cls = new_cls
        # breadth-first canonical numbering of classes
        rep = {}
        for q in sorted(keep):
            rep.setdefault(cls[q], q)
        order = [cls[self.start]]
        number = {cls[self.start]: 0}
        i = 0
        while i < len(order):
            c = order[i]
            q = rep[c]
            for s, t in self.delta[q].items():
                if t in keep:
                    ct = cls[t]
                    if ct not in number:
                        number[ct] = len(order)
                        order.append(ct)
            i += 1
        rows = []
        accepting = set()
        for c in order:
            q = rep[c]
            if q in self.accepting:
                accepting.add(number[c])
            rows.append({s: number[cls[t]] for s, t in self.delta[q].items() if t in keep})
        return Fsa(self.symbols, len(order), 0, accepting, rows)

    # -- enumeration -----------------------------------------------------

    def enumerate_words(self, max_len: int) -> list:
        """Accepted words of length <= max_len in length-lexicographic order
        of the declared symbol order."""
        useful = self.useful()
        out = []
        if self.start not in useful:
            return out
        frontier = [((), self.start)]
        if self.start in self.accepting:
            out.append(())
        for _ in range(max_len):
            nxt = []
            for word, q in frontier:
                for s, t in self.delta[q].items():
                    if t in useful:
                        w = word + (s,)
                        nxt.append((w, t))
                        if t in self.accepting:
                            out.append(w)
            frontier = nxt
        return out

    # -- serialization ----------------------------------------------------

    def to_doc(self) -> dict:
        sym = [list(s) if isinstance(s, tuple) else s for s in self.symbols]
        transitions = []
        for q in range(self.n_states):
            for s, t in self.delta[q].items():
                transitions.append([q, list(s) if isinstance(s, tuple) else s, t])
        return {
            "alphabet": sym,
            "states": self.n_states,
            "start": self.start,
            "accepting": sorted(self.accepting),
            "transitions": transitions,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Fsa":
        symbols = [_freeze_symbol(s) for s in doc["alphabet"]]
        rows = [dict() for _ in range(doc["states"])]
        for q, s, t in doc["transitions"]:
            rows[q][_freeze_symbol(s)] = t
        return cls(symbols, doc["states"], doc["start"], doc["accepting"], rows)

    def to_dot(self, name: str = "fsa") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;", '  hidden [shape=none, label=""];']
        for q in range(self.n_states):
            shape = "doublecircle" if q in self.accepting else "circle"
            lines.append(f"  q{q} [shape={shape}, label=\"{q}\"];")
        lines.append(f"  hidden -> q{self.start};")
        for q in range(self.n_states):
            for s, t in self.delta[q].items():
                label = ",".join(s) if isinstance(s, tuple) else str(s)
                lines.append(f'  q{q} -> q{t} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"<Fsa {self.n_states} states over {len(self.symbols)} symbols>"


# -- small constructors ---------------------------------------------------


def empty_language(symbols) -> Fsa:
    return Fsa(symbols, 1, 0, (), [{}])


def epsilon_language(symbols) -> Fsa:
    return Fsa(symbols, 1, 0, {0}, [{}])


def all_words(symbols) -> Fsa:
    symbols = tuple(symbols)
    return Fsa(symbols, 1, 0, {0}, [{s: 0 for s in symbols}])


def letters_language(symbols, letters) -> Fsa:
    """Acceptor of the single-letter words drawn from ``letters``."""
    symbols = tuple(symbols)
    letters = [s for s in symbols if s in set(letters)]
    return Fsa(symbols, 2, 0, {1}, [{s: 1 for s in letters}, {}])


def word_language(symbols, words: Iterable) -> Fsa:
    """Trie acceptor of a finite set of words."""
    symbols = tuple(symbols)
    rows = [{}]
    accepting = set()
    for word in words:
        q = 0
        for s in word:
            t = rows[q].get(s)
            if t is None:
                t = len(rows)
                rows.append({})
                rows[q][s] = t
            q = t
        accepting.add(q)
    return Fsa(symbols, len(rows), 0, accepting, rows).minimize()


def suffix_language(symbols, letters) -> Fsa:
    """Acceptor of nonempty words whose last letter lies in ``letters``."""
    symbols = tuple(symbols)
    chosen = set(letters)
    row = {s: (1 if s in chosen else 0) for s in symbols}
    return Fsa(symbols, 2, 0, {1}, [dict(row), dict(row)])


# -- nondeterministic machinery (internal) --------------------------------


class _Nfa:
    """Sparse NFA with epsilon moves; exists only to be determinized."""

    def __init__(self, symbols, n_states, starts, accepting, moves, eps=None):
        self.symbols = tuple(symbols)
        self._rank = {s: i for i, s in enumerate(self.symbols)}
        self.n_states = n_states
        self.starts = set(starts)
        self.accepting = set(accepting)
        self.moves = moves  # (state, symbol) -> set of states
        self.eps = eps or {}  # state -> set of states
        bystate = {}
        for (p, s) in self.moves:
            bystate.setdefault(p, []).append(s)
        self._bystate = bystate

    def _closure(self, states) -> frozenset:
        out = set(states)
        stack = list(states)
        while stack:
            q = stack.pop()
            for t in self.eps.get(q, ()):
                if t not in out:
                    out.add(t)
                    stack.append(t)
        return frozenset(out)

    def determinize(self) -> Fsa:
        start = self._closure(self.starts)
        index = {start: 0}
        order = [start]
        rows = []
        i = 0
        while i < len(order):
            subset = order[i]
            symmoves = {}
            for q in subset:
                for s in self._bystate.get(q, ()):
                    symmoves.setdefault(s, set()).update(self.moves[(q, s)])
            row = {}
            for s in sorted(symmoves, key=self._rank.__getitem__):
                target = self._closure(symmoves[s])
                if not target:
                    continue
                if target not in index:
                    index[target] = len(order)
                    order.append(target)
                row[s] = index[target]
            rows.append(row)
            i += 1
        accepting = {i for i, subset in enumerate(order) if subset & self.accepting}
        return Fsa(self.symbols, len(order), 0, accepting, rows)


def union_many(fsas: Sequence[Fsa]) -> Fsa:
    """Union of arbitrarily many acceptors in one determinization pass."""
    if not fsas:
        raise ValueError("union of nothing")
    symbols = fsas[0].symbols
    for f in fsas[1:]:
        if set(f.symbols) != set(symbols):
            raise ValueError("acceptors are over different alphabets")
    moves = {}
    accepting = set()
    starts = set()
    offset = 0
    for f in fsas:
        starts.add(offset + f.start)
        accepting.update(offset + q for q in f.accepting)
        for q in range(f.n_states):
            for s, t in f.delta[q].items():
                moves.setdefault((offset + q, s), set()).add(offset + t)
        offset += f.n_states
    nfa = _Nfa(symbols, offset, starts, accepting, moves)
    return nfa.determinize().minimize()


# -- padded tuple alphabets and synchronous acceptors ----------------------


class PaddedAlphabet:
    """All n-tuples over ``base + {$}`` except the all-padding tuple."""

    __slots__ = ("base", "arity", "symbols")

    def __init__(self, base, arity: int):
        self.base = tuple(base)
        if PAD in self.base:
            raise ValueError("padding symbol collides with base alphabet")
        if arity < 1:
            raise ValueError("arity must be at least 1")
        self.arity = arity
        cols = self.base + (PAD,)
        self.symbols = tuple(
            t for t in _iterproduct(*(cols for _ in range(arity)))
            if any(c != PAD for c in t)
        )

    def __eq__(self, other):
        if not isinstance(other, PaddedAlphabet):
            return NotImplemented
        return self.base == other.base and self.arity == other.arity

    def __hash__(self):
        return hash((self.base, self.arity))

    def __repr__(self):
        return f"PaddedAlphabet(base={len(self.base)} symbols, arity={self.arity})"


def pad(words) -> tuple:
    """Zip a tuple of words into a padded word; every coordinate is
    right-padded with ``$`` to the maximum length."""
    words = tuple(tuple(w) for w in words)
    m = max((len(w) for w in words), default=0)
    return tuple(
        tuple(w[i] if i < len(w) else PAD for w in words)
        for i in range(m)
    )


def unpad(padded_word) -> tuple:
    """Inverse of :func:`pad` on well-formed padded words."""
    if not padded_word:
        return ()
    arity = len(padded_word[0])
    out = []
    for i in range(arity):
        letters = []
        for sym in padded_word:
            if sym[i] == PAD:
                break
            letters.append(sym[i])
        out.append(tuple(letters))
    return tuple(out)


@lru_cache(maxsize=None)
def well_formed_padding(padded: PaddedAlphabet) -> Fsa:
    """Acceptor of well-formed padded words: in each coordinate, padding
    occurs only as a suffix."""
    n = padded.arity
    subsets = []
    index = {}
    for bits in _iterproduct((False, True), repeat=n):
        index[bits] = len(subsets)
        subsets.append(bits)
    rows = [dict() for _ in subsets]
    for bits in subsets:
        q = index[bits]
        for sym in padded.symbols:
            newbits = tuple(c == PAD for c in sym)
            if all(b <= nb for b, nb in zip(bits, newbits)):
                rows[q][sym] = index[newbits]
    start = index[tuple(False for _ in range(n))]
    return Fsa(padded.symbols, len(subsets), start, set(range(len(subsets))), rows).minimize()


class SyncAcceptor:
    """Acceptor for a synchronously regular n-tuple relation: a DFA over a
    padded tuple alphabet, kept inside the well-formed padded words."""

    __slots__ = ("fsa", "padded")

    def __init__(self, fsa: Fsa, padded: PaddedAlphabet):
        if set(fsa.symbols) != set(padded.symbols):
            raise ValueError("acceptor alphabet does not match the padded alphabet")
        self.padded = padded
        self.fsa = fsa.intersect(well_formed_padding(padded))

    def accepts(self, padded_word) -> bool:
        return self.fsa.accepts(padded_word)

    def accepts_tuple(self, words) -> bool:
        if len(words) != self.padded.arity:
            raise ValueError("tuple arity mismatch")
        return self.fsa.accepts(pad(words))

    def union(self, other: "SyncAcceptor") -> "SyncAcceptor":
        if self.padded != other.padded:
            raise ValueError("padded alphabets differ")
        return SyncAcceptor(self.fsa.union(other.fsa), self.padded)

    def intersect(self, other: "SyncAcceptor") -> "SyncAcceptor":
        if self.padded != other.padded:
            raise ValueError("padded alphabets differ")
        return SyncAcceptor(self.fsa.intersect(other.fsa), self.padded)

    def to_doc(self) -> dict:
        doc = self.fsa.to_doc()
        doc["padded"] = {"base": list(self.padded.base), "arity": self.padded.arity}
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "SyncAcceptor":
        padded = PaddedAlphabet(tuple(doc["padded"]["base"]), doc["padded"]["arity"])
        return cls(Fsa.from_doc(doc), padded)

    def __repr__(self):
        return f"<SyncAcceptor arity={self.padded.arity} {self.fsa.n_states} states>"


def product(fsas: Sequence[Fsa]) -> SyncAcceptor:
    """Acceptor of ``pad(L_1 x ... x L_n)`` for components over one base
    alphabet.

    Each coordinate runs its component until it switches to padding, which
    is only allowed from an accepting component state.
    """
    if not fsas:
        raise ValueError("product of nothing")
    base = fsas[0].symbols
    for f in fsas[1:]:
        if f.symbols != base:
            raise ValueError("product components must share one base alphabet")
    padded = PaddedAlphabet(base, len(fsas))
    start = tuple(f.start for f in fsas)
    index = {start: 0}
    order = [start]
    rows = []
    i = 0
    while i < len(order):
        state = order[i]
        options = []
        for f, q in zip(fsas, state):
            if q is None:
                options.append([(PAD, None)])
            else:
                opts = [(s, t) for s, t in f.delta[q].items()]
                if q in f.accepting:
                    opts.append((PAD, None))
                options.append(opts)
        row = {}
        for combo in _iterproduct(*options):
            sym = tuple(c for c, _ in combo)
            if all(c == PAD for c in sym):
                continue
            target = tuple(t for _, t in combo)
            if target not in index:
                index[target] = len(order)
                order.append(target)
            row[sym] = index[target]
        rows.append(row)
        i += 1
    accepting = set()
    for state, j in index.items():
        if all(q is None or q in f.accepting for f, q in zip(fsas, state)):
            accepting.add(j)
    raw = Fsa(padded.symbols, len(order), 0, accepting, rows).minimize()
    return SyncAcceptor(raw, padded)


def proj1(sync: SyncAcceptor) -> Fsa:
    """Projection of a synchronous relation on its first coordinate.

    Transition symbols whose first coordinate is padding contribute
    epsilon moves; the rest read their first coordinate.
    """
    base = sync.padded.base
    f = sync.fsa
    moves = {}
    eps = {}
    for q in range(f.n_states):
        for sym, t in f.delta[q].items():
            if sym[0] == PAD:
                eps.setdefault(q, set()).add(t)
            else:
                moves.setdefault((q, sym[0]), set()).add(t)
    nfa = _Nfa(base, f.n_states, {f.start}, set(f.accepting), moves, eps)
    return nfa.determinize().minimize()


def relabel_fsa(f: Fsa, mapping: dict) -> Fsa:
    """Rename symbols bijectively."""
    symbols = tuple(mapping[s] for s in f.symbols)
    rows = [{mapping[s]: t for s, t in f.delta[q].items()} for q in range(f.n_states)]
    return Fsa(symbols, f.n_states, f.start, f.accepting, rows)
