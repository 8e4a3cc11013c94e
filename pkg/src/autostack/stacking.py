"""Stacking structures: bounded flow functions on Cayley graphs.

A :class:`StackingStructure` packages a prefix-closed normal form language
with a stacking map, the word-level form of a flow function.  Directed
edges of the Cayley graph that lie in the spanning tree determined by the
normal forms are fixed; every other edge is sent to a path of length at
most the declared bound.  Iterating the map rewrites any word to the
normal form of the element it represents, so the structure carries a
solution of the word problem, executed here as a bounded prefix-rewriting
machine.

Structures are immutable after construction.  The word-problem machine
keeps a memo cache of resolved edges; it is a pure cache (same key, same
value), so concurrent use is safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

from .fsa import DEAD, Fsa, PaddedAlphabet, SyncAcceptor, product, relabel_fsa, union_many, word_language
from .words import Alphabet, Word, format_word, formal_inverse, free_reduce, parse_word


class FlowBudgetError(RuntimeError):
    """The rewriting machine exceeded its step budget.

    On a valid structure this never happens; it is the diagnostic for a
    flow function whose ordering is not well founded.
    """


class GuardCoverageError(ValueError):
    """No piecewise rule (or more than one) applies to an edge."""


class ChainExitsBall(Exception):
    """A descending chain left the working ball; its length is unknown."""


class DirectedEdge(NamedTuple):
    source: Word
    letter: str


@dataclass(frozen=True)
class PiecewiseRule:
    """One piece of a piecewise-regular stacking map: on normal forms
    accepted by ``guard``, the edge labeled ``letter`` flows along the
    constant word ``output``."""

    guard: Fsa
    letter: str
    output: Word


@dataclass(frozen=True)
class PrefixRule:
    """A prefix-rewriting rule ``lhs -> rhs``; ``reduced rhs`` is the freely
    reduced display form."""

    lhs: Word
    rhs: Word
    tree: bool
    reduced_rhs: Word

    def display(self) -> str:
        return f"{format_word(self.lhs)} -> {format_word(self.reduced_rhs)}"


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: str = ""
    witnesses: list = field(default_factory=list)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        text = f"[{tag}] {self.name}"
        if self.details:
            text += f": {self.details}"
        for w in self.witnesses[:5]:
            text += f"\n       witness: {w}"
        return text


@dataclass
class VerificationReport:
    radius: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_checks(self) -> list:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> str:
        lines = [c.line() for c in self.checks]
        verdict = "all checks passed" if self.passed else "FAILURES PRESENT"
        lines.append(f"radius {self.radius}: {verdict}")
        return "\n".join(lines)

    def to_doc(self) -> dict:
        return {
            "radius": self.radius,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "details": c.details,
                    "witnesses": [str(w) for w in c.witnesses[:10]],
                }
                for c in self.checks
            ],
        }


@dataclass
class PsiCertificate:
    """Tuple-valued edge function witnessing well-foundedness: along the
    flow path of a non-tree edge, every non-tree edge gets a lexicographically
    smaller value.  ``None`` means the value is indeterminate because a
    descending chain left the working ball."""

    dimension: int
    fn: Callable[[Word, str], Optional[tuple]]

    def value(self, source: Word, letter: str) -> Optional[tuple]:
        return self.fn(source, letter)


ORACLE_REGISTRY: dict = {}


def register_oracle(name: str, fn: Callable[[Word], Word]):
    ORACLE_REGISTRY[name] = fn


class StackingStructure:
    """Normal forms plus a bounded stacking map for one group presentation.

    The stacking map may be given as piecewise-regular rules, as an opaque
    callable, or both; when both are present they must agree (``verify``
    checks this on a ball).  Structures with only a callable support
    everything except :meth:`graph_automaton`.
    """

    def __init__(
        self,
        alphabet: Alphabet,
        normal_forms: Fsa,
        bound: int,
        rules: Sequence[PiecewiseRule] = (),
        func: Optional[Callable[[Word, str], Word]] = None,
        relators: Sequence[Word] = (),
        oracle: Optional[Callable[[Word], Word]] = None,
        oracle_name: str = "",
        psi: Optional[PsiCertificate] = None,
        name: str = "",
    ):
        self.alphabet = alphabet
        self.normal_forms = normal_forms
        self.bound = int(bound)
        self.rules = tuple(rules)
        self.func = func
        self.relators = tuple(tuple(r) for r in relators)
        self.oracle = oracle
        self.oracle_name = oracle_name
        self.psi = psi
        self.name = name
        if normal_forms.symbols != alphabet.letters:
            raise ValueError("normal form acceptor must run over the structure alphabet")
        if not normal_forms.accepts(()):
            raise ValueError("the empty word must be a normal form")
        if not self.rules and func is None:
            raise ValueError("a stacking map is required (rules, callable, or both)")
        self._by_letter = {}
        for rule in self.rules:
            if rule.letter not in alphabet:
                raise ValueError(f"rule letter {rule.letter!r} not in alphabet")
            if len(rule.output) > self.bound:
                raise ValueError("rule output exceeds the declared bound")
            if rule.guard.symbols != alphabet.letters:
                raise ValueError("rule guards must run over the structure alphabet")
            self._by_letter.setdefault(rule.letter, []).append(rule)
        self._step_cache: dict = {}

    # -- basic predicates ---------------------------------------------

    def is_normal_form(self, word: Word) -> bool:
        return self.normal_forms.accepts(word)

    def _require_normal_form(self, word: Word):
        if not self.is_normal_form(word):
            raise ValueError(f"not a normal form: {format_word(word)!r}")

    def is_tree_edge(self, source: Word, letter: str) -> bool:
        """True when the undirected edge under ``(source, letter)`` lies in
        the spanning tree: the edge either extends the normal form or
        backtracks along its last letter."""
        self._require_normal_form(source)
        if self.normal_forms.accepts(source + (letter,)):
            return True
        return bool(source) and source[-1] == self.alphabet.inverse(letter)

    # -- the stacking map ----------------------------------------------

    def _stack_by_rules(self, source: Word, letter: str) -> Word:
        matches = [r for r in self._by_letter.get(letter, ()) if r.guard.accepts(source)]
        if len(matches) != 1:
            raise GuardCoverageError(
                f"{len(matches)} guards match edge ({format_word(source)!r}, {letter!r})"
            )
        return matches[0].output

    def _stack_fast(self, source: Word, letter: str) -> Word:
        if self.func is not None:
            return self.func(source, letter)
        return self._stack_by_rules(source, letter)

    def stack(self, source: Word, letter: str) -> Word:
        """Value of the stacking map on the directed edge ``(source, letter)``."""
        self._require_normal_form(source)
        if letter not in self.alphabet:
            raise ValueError(f"unknown letter {letter!r}")
        return self._stack_fast(source, letter)

    # -- the word-problem machine ----------------------------------------

    def _default_budget(self, scale: int) -> int:
        # 10 * k^(scale) steps; generous for valid structures, finite so
        # broken inputs fail fast.
        return 10 * max(2, self.bound) ** scale

    def _machine(self, start: Word, letters: Word, budget: int) -> Word:
        """Run the bounded prefix-rewriting machine: apply ``letters`` to the
        normal form ``start``.  Tree steps extend or backtrack; a non-tree
        step replaces the pending letter by the stacking-map word."""
        nf = self.normal_forms
        acc = nf.accepting
        inv = self.alphabet.inverse
        cache = self._step_cache
        cur = list(start)
        states = [nf.start]
        for x in cur:
            states.append(nf.delta[states[-1]][x])
        work: list = [("L", x) for x in reversed(letters)]
        steps = 0
        while work:
            tag, payload = work.pop()
            if tag == "M":
                cache[payload] = tuple(cur)
                continue
            x = payload
            steps += 1
            if steps > budget:
                raise FlowBudgetError(
                    f"step budget {budget} exhausted; the flow ordering is "
                    f"not well founded at desk scale"
                )
            key = (tuple(cur), x)
            hit = cache.get(key)
            if hit is not None:
                cur = list(hit)
                states = [nf.start]
                for y in cur:
                    states.append(nf.delta[states[-1]][y])
                continue
            nxt = nf.delta[states[-1]].get(x, DEAD)
            if nxt != DEAD and nxt in acc:
                cur.append(x)
                states.append(nxt)
                cache[key] = tuple(cur)
                continue
            if cur and cur[-1] == inv(x):
                cur.pop()
                states.pop()
                cache[key] = tuple(cur)
                continue
            out = self._stack_fast(tuple(cur), x)
            work.append(("M", key))
            for y in reversed(out):
                work.append(("L", y))
        return tuple(cur)

    def normalize_step(self, source: Word, letter: str, budget: Optional[int] = None) -> Word:
        """Normal form of the element ``source * letter``."""
        self._require_normal_form(source)
        if budget is None:
            budget = self._default_budget(len(source) + 3)
        return self._machine(source, (letter,), budget)

    def normalize(self, word: Word, budget: Optional[int] = None) -> Word:
        """Normal form of the element represented by ``word``."""
        word = tuple(word)
        if budget is None:
            budget = self._default_budget(len(word) + 2)
        return self._machine((), word, budget)

    def normalize_from(self, source: Word, word: Word, budget: Optional[int] = None) -> Word:
        """Fold the machine over ``word`` starting at the normal form
        ``source``."""
        self._require_normal_form(source)
        if budget is None:
            budget = self._default_budget(len(source) + len(word) + 2)
        return self._machine(source, tuple(word), budget)

    # -- exploration ------------------------------------------------------

    def ball(self, radius: int, budget: Optional[int] = None) -> list:
        """Normal forms of all elements at word-metric distance at most
        ``radius``, in length-lexicographic order."""
        seen = {()}
        frontier = [()]
        for _ in range(radius):
            nxt = []
            for y in frontier:
                for a in self.alphabet.letters:
                    z = self.normalize_step(y, a, budget)
                    if z not in seen:
                        seen.add(z)
                        nxt.append(z)
            frontier = nxt
        return sorted(seen, key=self.alphabet.word_key)

    def flow_path(self, source: Word, letter: str, budget: Optional[int] = None) -> list:
        """Directed edges along the flow path of the edge ``(source,
        letter)``: the path from ``source`` labeled by the stacking-map
        word."""
        out = self.stack(source, letter)
        edges = []
        cur = source
        for x in out:
            edges.append(DirectedEdge(cur, x))
            cur = self.normalize_step(cur, x, budget)
        return edges

    # -- the stacking-map graph as a synchronous acceptor ------------------

    def graph_automaton(self) -> SyncAcceptor:
        """Acceptor of the padded triples ``(y, a, stack(y, a))``, assembled
        as the union over rules of ``product(guard, {a}, {output})``."""
        if not self.rules:
            raise ValueError("graph automaton requires piecewise-regular rules")
        base = self.alphabet.letters
        pieces = []
        for rule in self.rules:
            piece = product([
                rule.guard,
                word_language(base, [(rule.letter,)]),
                word_language(base, [rule.output]),
            ])
            pieces.append(piece.fsa)
        combined = union_many(pieces)
        return SyncAcceptor(combined, PaddedAlphabet(base, 3))

    # -- verification -------------------------------------------------------

    def verify(
        self,
        radius: int,
        budget: Optional[int] = None,
        oracle_len: int = 2,
        samples: int = 0,
        max_len: int = 12,
        seed: int = 0,
    ) -> VerificationReport:
        """Check the flow-function axioms over every edge whose source lies
        in the ball of the given radius.

        Checks: guard partition and coverage (with exact pairwise guard
        disjointness when rules are present), boundedness, tree edges fixed,
        endpoint preservation (against the oracle too, when present),
        termination plus acyclicity of the non-tree dependency relation
        restricted to the ball, prefix closure of the normal form language,
        and closure of all relators at every ball vertex.
        """
        if budget is None:
            budget = self._default_budget(radius + 2)
        checks: list = []
        letters = self.alphabet.letters
        try:
            ball = self.ball(radius, budget)
        except (FlowBudgetError, GuardCoverageError) as exc:
            checks.append(CheckResult("solver", False, f"ball enumeration failed: {exc}"))
            return VerificationReport(radius, checks)

        # normal-form language sanity: empty word, ball membership, prefix closure
        bad = []
        if not self.is_normal_form(()):
            bad.append("empty word rejected")
        for y in ball:
            if not self.is_normal_form(y):
                bad.append(f"ball word not accepted: {format_word(y)}")
            for i in range(len(y)):
                if not self.is_normal_form(y[:i]):
                    bad.append(f"prefix not accepted: {format_word(y[:i])}")
        for w in self.normal_forms.enumerate_words(radius):
            for i in range(len(w)):
                if not self.is_normal_form(w[:i]):
                    bad.append(f"prefix not accepted: {format_word(w[:i])}")
        checks.append(CheckResult(
            "normal-forms prefix-closed", not bad,
            f"{len(ball)} ball words checked", bad))

        # guard partition / coverage / agreement with the callable
        if self.rules:
            bad = []
            for y in ball:
                for a in letters:
                    matches = [r for r in self._by_letter.get(a, ()) if r.guard.accepts(y)]
                    if len(matches) != 1:
                        bad.append(f"{len(matches)} guards match ({format_word(y)}, {a})")
                    elif self.func is not None and self.func(y, a) != matches[0].output:
                        bad.append(f"callable disagrees with rules at ({format_word(y)}, {a})")
            for a in letters:
                group = self._by_letter.get(a, ())
                for i in range(len(group)):
                    for j in range(i + 1, len(group)):
                        if not group[i].guard.intersect(group[j].guard).is_empty():
                            bad.append(f"guards {i} and {j} for letter {a} overlap")
            checks.append(CheckResult(
                "guard partition", not bad,
                f"{len(self.rules)} rules, exact pairwise disjointness", bad))
        else:
            checks.append(CheckResult(
                "guard partition", True, "opaque callable only; nothing to check"))

        edges = [(y, a) for y in ball for a in letters]
        budget_failures: list = []

        # boundedness and tree edges fixed
        bad_bound = []
        bad_tree = []
        stack_values = {}
        for y, a in edges:
            try:
                out = self._stack_fast(y, a)
            except GuardCoverageError as exc:
                bad_bound.append(str(exc))
                continue
            stack_values[(y, a)] = out
            if len(out) > self.bound:
                bad_bound.append(
                    f"|stack({format_word(y)}, {a})| = {len(out)} > {self.bound}")
            if self.is_tree_edge(y, a) and out != (a,):
                bad_tree.append(f"tree edge ({format_word(y)}, {a}) moved to {format_word(out)}")
        checks.append(CheckResult(
            "bounded", not bad_bound, f"bound {self.bound} over {len(edges)} edges", bad_bound))
        checks.append(CheckResult("tree edges fixed", not bad_tree, "", bad_tree))

        # endpoint preservation, from scratch on both sides
        bad = []
        for y, a in edges:
            out = stack_values.get((y, a))
            if out is None:
                continue
            try:
                lhs = self.normalize(y + out, budget)
                rhs = self.normalize(y + (a,), budget)
            except FlowBudgetError as exc:
                budget_failures.append(f"({format_word(y)}, {a}): {exc}")
                continue
            if lhs != rhs:
                bad.append(
                    f"({format_word(y)}, {a}): {format_word(lhs)} != {format_word(rhs)}")
            if self.oracle is not None:
                want = tuple(self.oracle(y + (a,)))
                if rhs != want:
                    bad.append(
                        f"oracle disagrees at ({format_word(y)}, {a}): "
                        f"{format_word(rhs)} vs {format_word(want)}")
        checks.append(CheckResult(
            "endpoints preserved", not bad,
            "normal form of y*stack(y,a) equals normal form of y*a", bad))

        # well-foundedness at scale: termination within budget plus
        # acyclicity of the non-tree dependency relation inside the ball.
        # The relation lives on directed edges; only the non-tree condition
        # refers to the underlying undirected edge (which is reversal
        # invariant).  Identifying an edge with its reversal instead would
        # create spurious two-step cycles on valid structures.
        ballset = set(ball)
        nontree = {
            (y, a) for y, a in edges
            if (y, a) in stack_values and not self.is_tree_edge(y, a)
        }
        graph: dict = {}
        exits = 0
        for y, a in sorted(nontree):
            deps = graph.setdefault((y, a), set())
            try:
                for e in self.flow_path(y, a, budget):
                    if e.source not in ballset:
                        exits += 1
                        continue
                    if (e.source, e.letter) in nontree:
                        deps.add((e.source, e.letter))
            except FlowBudgetError as exc:
                budget_failures.append(f"({format_word(y)}, {a}): {exc}")
        cycle = _find_cycle(graph)
        bad = list(budget_failures)
        if cycle:
            bad.append("dependency cycle: " + " -> ".join(
                f"({format_word(y)}, {a})" for y, a in cycle))
        detail = (f"{len(graph)} non-tree edges, acyclic within ball"
                  + (f", {exits} path vertices left the ball" if exits else ""))
        checks.append(CheckResult("well-founded at scale", not bad, detail, bad))

        # relators close up at every vertex
        bad = []
        for y in ball:
            for rho in self.relators:
                try:
                    z = self.normalize_from(y, rho, budget)
                except FlowBudgetError as exc:
                    bad.append(f"budget at ({format_word(y)}, relator {format_word(rho)}): {exc}")
                    continue
                if z != y:
                    bad.append(
                        f"relator {format_word(rho)} at {format_word(y)} "
                        f"lands on {format_word(z)}")
        checks.append(CheckResult(
            "relators close", not bad,
            f"{len(self.relators)} relators at {len(ball)} vertices", bad))

        # independent oracle agreement on short and sampled words
        if self.oracle is not None:
            bad = []
            count = 0
            words = [()]
            for _ in range(oracle_len):
                words = [w + (a,) for w in words for a in letters]
                for w in words:
                    count += 1
                    if self.normalize(w, budget) != tuple(self.oracle(w)):
                        bad.append(format_word(w))
            if samples:
                import random

                rng = random.Random(seed)
                for _ in range(samples):
                    w = tuple(rng.choice(letters) for _ in range(rng.randint(0, max_len)))
                    count += 1
                    if self.normalize(w, budget) != tuple(self.oracle(w)):
                        bad.append(format_word(w))
            checks.append(CheckResult(
                "oracle agreement", not bad, f"{count} words", bad))

        return VerificationReport(radius, checks)

    # -- prefix-rewriting view ----------------------------------------------

    def to_prefix_rules(self, radius: int, budget: Optional[int] = None) -> list:
        """Truncation to the ball of the bounded complete prefix-rewriting
        system induced by the structure: non-tree edges contribute
        ``y a -> y stack(y, a)``; tree edges contribute their trivial tree
        rewrites."""
        out = []
        for y in self.ball(radius, budget):
            for a in self.alphabet.letters:
                lhs = y + (a,)
                if self.is_tree_edge(y, a):
                    rhs = self.normalize_step(y, a, budget)
                    tree = True
                else:
                    rhs = y + self._stack_fast(y, a)
                    tree = False
                out.append(PrefixRule(lhs, rhs, tree, free_reduce(self.alphabet, rhs)))
        return out

    # -- serialization --------------------------------------------------------

    def to_doc(self) -> dict:
        return {
            "alphabet": list(self.alphabet.letters),
            "inverses": {x: self.alphabet.inverse(x) for x in self.alphabet.letters},
            "normal_forms": self.normal_forms.to_doc(),
            "rules": [
                {
                    "guard": r.guard.to_doc(),
                    "letter": r.letter,
                    "output": format_word(r.output),
                }
                for r in self.rules
            ],
            "bound": self.bound,
            "relators": [format_word(r) for r in self.relators],
            "oracle": self.oracle_name or "none",
            "name": self.name,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "StackingStructure":
        alphabet = Alphabet(doc["alphabet"], doc["inverses"])
        rules = [
            PiecewiseRule(
                Fsa.from_doc(r["guard"]), r["letter"], parse_word(r["output"]))
            for r in doc.get("rules", [])
        ]
        oracle_name = doc.get("oracle", "none")
        oracle = None
        if oracle_name and oracle_name != "none":
            if oracle_name not in ORACLE_REGISTRY:
                raise ValueError(f"unknown oracle {oracle_name!r}")
            oracle = ORACLE_REGISTRY[oracle_name]
        return cls(
            alphabet,
            Fsa.from_doc(doc["normal_forms"]),
            doc["bound"],
            rules=rules,
            relators=[parse_word(r) for r in doc.get("relators", [])],
            oracle=oracle,
            oracle_name=oracle_name if oracle else "",
            name=doc.get("name", ""),
        )

    def __repr__(self) -> str:
        label = self.name or "?"
        return f"<StackingStructure {label}: {len(self.alphabet)} letters, bound {self.bound}>"


def _find_cycle(graph: dict):
    """Iterative three-color DFS; returns one cycle as a list of nodes, or
    None."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {u: WHITE for u in graph}
    for root in graph:
        if color[root] != WHITE:
            continue
        stack = [(root, iter(sorted(graph.get(root, ()))))]
        color[root] = GRAY
        path = [root]
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in color:
                    continue
                if color[nxt] == GRAY:
                    i = path.index(nxt)
                    return path[i:] + [nxt]
                if color[nxt] == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, iter(sorted(graph.get(nxt, ())))))
                    path.append(nxt)
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
                path.pop()
    return None


def descending_chain_length(
    structure: StackingStructure,
    source: Word,
    letter: str,
    ball: Optional[set] = None,
    memo: Optional[dict] = None,
) -> int:
    """Maximum length of a strictly descending chain of non-tree edges under
    the flow order, starting at ``(source, letter)``.

    Tree edges have chain length 0.  When ``ball`` is given, a chain
    reaching a source outside it raises :class:`ChainExitsBall`.
    """
    if memo is None:
        memo = {}
    IN_PROGRESS = object()

    def go(y: Word, a: str) -> int:
        if ball is not None and y not in ball:
            raise ChainExitsBall(format_word(y))
        key = (y, a)
        got = memo.get(key)
        if got is IN_PROGRESS:
            raise FlowBudgetError("flow order has a cycle; not well founded")
        if got is not None:
            return got
        if structure.is_tree_edge(y, a):
            memo[key] = 0
            return 0
        memo[key] = IN_PROGRESS
        best = 0
        for e in structure.flow_path(y, a):
            if not structure.is_tree_edge(e.source, e.letter):
                best = max(best, 1 + go(e.source, e.letter))
        memo[key] = best
        return best

    return go(source, letter)


@dataclass
class MonotonicityReport:
    checked: int
    indeterminate: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def check_psi_monotonicity(
    structure: StackingStructure, radius: int, budget: Optional[int] = None
) -> MonotonicityReport:
    """Exhaustively check, over all non-tree edges with source in the ball,
    that every non-tree edge on the flow path gets a strictly smaller
    certificate value (lexicographically)."""
    if structure.psi is None:
        raise ValueError("structure carries no certificate")
    psi = structure.psi
    checked = 0
    indeterminate = 0
    violations = []
    for y in structure.ball(radius, budget):
        for a in structure.alphabet.letters:
            if structure.is_tree_edge(y, a):
                continue
            ve = psi.value(y, a)
            if ve is None:
                indeterminate += 1
                continue
            for e in structure.flow_path(y, a, budget):
                if structure.is_tree_edge(e.source, e.letter):
                    continue
                vp = psi.value(e.source, e.letter)
                checked += 1
                if vp is None:
                    indeterminate += 1
                    continue
                if not vp < ve:
                    violations.append(
                        f"psi({format_word(e.source)}, {e.letter}) = {vp} not below "
                        f"psi({format_word(y)}, {a}) = {ve}")
    return MonotonicityReport(checked, indeterminate, violations)


def relabel_structure(structure: StackingStructure, mapping: dict, name: str = "") -> StackingStructure:
    """Bijectively rename the letters of a structure, wrapping the callable
    pieces so they translate in and out."""
    inverse_mapping = {v: k for k, v in mapping.items()}
    alphabet = Alphabet(
        [mapping[x] for x in structure.alphabet.letters],
        {mapping[x]: mapping[structure.alphabet.inverse(x)] for x in structure.alphabet.letters},
    )
    rules = [
        PiecewiseRule(
            relabel_fsa(r.guard, mapping), mapping[r.letter],
            tuple(mapping[x] for x in r.output))
        for r in structure.rules
    ]
    func = None
    if structure.func is not None:
        def func(y, a, _f=structure.func):
            out = _f(tuple(inverse_mapping[x] for x in y), inverse_mapping[a])
            return tuple(mapping[x] for x in out)
    oracle = None
    if structure.oracle is not None:
        def oracle(w, _o=structure.oracle):
            out = _o(tuple(inverse_mapping[x] for x in w))
            return tuple(mapping[x] for x in out)
    psi = None
    if structure.psi is not None:
        def psi_fn(y, a, _p=structure.psi):
            return _p.value(tuple(inverse_mapping[x] for x in y), inverse_mapping[a])
        psi = PsiCertificate(structure.psi.dimension, psi_fn)
    return StackingStructure(
        alphabet,
        relabel_fsa(structure.normal_forms, mapping),
        structure.bound,
        rules=rules,
        func=func,
        relators=[tuple(mapping[x] for x in r) for r in structure.relators],
        oracle=oracle,
        psi=psi,
        name=name or structure.name,
    )
