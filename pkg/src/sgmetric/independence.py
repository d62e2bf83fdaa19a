"""The shortest-path independence relation and randomized axiom checks on fragments.

``A`` is independent from ``B`` over ``C`` when every cross distance
``d(a, b)`` equals ``inf_c d(a, c) + d(c, b)`` (the maximum when ``C`` is
empty).  Types are identified with induced distance matrices; a passing
randomized report is evidence about the limit structure, not a proof.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from ._seeds import derive_seed, rng_for
from .errors import AmalgamationError, InputError, MissingInfimumError, TriangleError
from .semigroup import ZERO, PosetSemigroup
from .space import (
    UNDEF,
    LabelledGraph,
    MetricSpace,
    amalgamate,
    complete_shortest_path,
    fresh_labels,
    induced,
    relabelled,
    same_type_over,
)

Relation = Callable[[MetricSpace, Sequence[int], Sequence[int], Sequence[int]], bool]


def pair_bound(s: MetricSpace, a: int, C: Iterable[int], b: int) -> int:
    """``inf_c d(a, c) + d(c, b)`` over ``C``, with the zero conventions; maximum for empty ``C``."""
    M = s.semigroup
    rows = s.rows
    C = list(C)
    if not C:
        return M.require_maximum()
    ra, rb = rows[a], rows[b]
    v = M.ext_infimum({M.add(ra[c], rb[c]) for c in C})
    if v is None:
        raise MissingInfimumError(
            f"no infimum of the paths from {s.vertices[a]} to {s.vertices[b]} through C",
            witness=(s.vertices[a], s.vertices[b]),
        )
    return v


def indep(s: MetricSpace, A: Iterable[int], C: Iterable[int], B: Iterable[int]) -> bool:
    C = list(C)
    rows = s.rows
    return all(rows[a][b] == pair_bound(s, a, C, b) for a in A for b in B)


def corrupted_indep(s: MetricSpace, A: Iterable[int], C: Iterable[int], B: Iterable[int]) -> bool:
    """Deliberately wrong relation for harness self-tests.

    The infimum is replaced by the first element strictly below it, when
    one exists.
    """
    M = s.semigroup
    C = list(C)
    rows = s.rows
    for a in A:
        for b in B:
            t = pair_bound(s, a, C, b)
            if t != ZERO:
                lower = [x for x in range(M.size) if M.lt(x, t)]
                if lower:
                    t = lower[0]
            if rows[a][b] != t:
                return False
    return True


# -- supports --------------------------------------------------------------------


def support_sets(s: MetricSpace, a: int, C: Sequence[int], b: int, k: int) -> list[tuple[int, ...]]:
    """All subsets of ``C`` with at most ``k`` elements over which ``a`` and ``b`` stay independent.

    Support is decided from distances inside the given finite space only;
    no ambient set beyond ``s`` is consulted.
    """
    C = sorted(set(C))
    if not indep(s, [a], C, [b]):
        raise InputError("a is not independent from b over C")
    out = []
    for size in range(0, min(k, len(C)) + 1):
        for sub in itertools.combinations(C, size):
            if indep(s, [a], sub, [b]):
                out.append(sub)
    return out


def min_support(s: MetricSpace, a: int, C: Sequence[int], b: int) -> int:
    C = sorted(set(C))
    for size in range(0, len(C) + 1):
        if any(indep(s, [a], sub, [b]) for sub in itertools.combinations(C, size)):
            return size
    raise InputError("a is not independent from b over C")


@dataclass
class SupportBudget:
    max_vertices: int = 5
    trials: int = 50
    seed: int = 0


@dataclass
class SupportWitness:
    space: MetricSpace
    a: int
    C: tuple[int, ...]
    b: int

    def to_json(self) -> dict:
        v = self.space.vertices
        return {"space": self.space.to_json(), "a": v[self.a], "b": v[self.b], "C": [v[c] for c in self.C]}


def _unsupported(s: MetricSpace, a: int, C: Sequence[int], b: int, k: int) -> bool:
    try:
        if not indep(s, [a], C, [b]):
            return False
        return not any(indep(s, [a], sub, [b]) for size in range(k + 1)
                       for sub in itertools.combinations(C, size))
    except MissingInfimumError:
        return False


def _exhaustive_witness(M: PosetSemigroup, k: int, max_vertices: int) -> SupportWitness | None:
    op = M.op
    decomp: dict[int, list[tuple[int, int]]] = {}
    for x in range(M.size):
        for y in range(M.size):
            decomp.setdefault(op[x][y], []).append((x, y))
    sums = sorted(decomp)
    for j in range(k + 1, max_vertices - 1):
        for combo in itertools.combinations(sums, j):
            t = M.infimum(combo)
            if t is None:
                continue
            if any(M.infimum(sub) == t for size in range(k + 1) for sub in itertools.combinations(combo, size)):
                continue
            # the sum values fix d(a, b) = t; choose distances realising each sum
            options = [
                [(x, y) for x, y in decomp[sv] if M.le(x, op[t][y]) and M.le(y, op[t][x])]
                for sv in combo
            ]
            if any(not o for o in options):
                continue
            n = j + 2
            labels = ["a", "b"] + [f"c{i + 1}" for i in range(j)]
            for choice in itertools.product(*options):
                d = np.full((n, n), UNDEF, dtype=np.int64)
                np.fill_diagonal(d, ZERO)
                d[0, 1] = d[1, 0] = t
                for i, (x, y) in enumerate(choice):
                    d[0, i + 2] = d[i + 2, 0] = x
                    d[1, i + 2] = d[i + 2, 1] = y
                try:
                    s = complete_shortest_path(LabelledGraph(M, labels, d))
                except (TriangleError, MissingInfimumError):
                    continue
                C = tuple(range(2, n))
                if _unsupported(s, 0, C, 1, k):
                    return SupportWitness(s, 0, C, 1)
    return None


def find_unsupported_witness(M: PosetSemigroup, k: int, budget: SupportBudget | None = None) -> SupportWitness | None:
    """A query independent over ``C`` but over no subset of size at most ``k``.

    Small configurations ``a, b, c_1..c_j`` are searched exhaustively by the
    sums ``d(a, c) + d(c, b)`` they realise, then seeded random spaces are
    scanned.  ``None`` means nothing was found within the budget.
    """
    from .fraisse import random_space

    budget = budget or SupportBudget()
    if k < 1:
        raise InputError("k must be >= 1")
    M.require_maximum()
    found = _exhaustive_witness(M, k, budget.max_vertices)
    if found is not None:
        return found
    for t in range(budget.trials):
        rng = rng_for(budget.seed, "support", t)
        try:
            s = random_space(M, budget.max_vertices, derive_seed(budget.seed, "support-space", t))
        except AmalgamationError:
            continue
        for a, b in itertools.permutations(range(s.n), 2):
            others = [v for v in range(s.n) if v not in (a, b)]
            for size in range(k + 1, len(others) + 1):
                subsets = list(itertools.combinations(others, size))
                if len(subsets) > 20:
                    subsets = rng.sample(subsets, 20)
                for C in subsets:
                    if _unsupported(s, a, C, b, k):
                        return SupportWitness(s, a, tuple(C), b)
    return None


def sample_support_sizes(M: PosetSemigroup, queries: int, max_vertices: int = 12, seed=0,
                         fragments_per: int = 10) -> list[int]:
    """Minimal support sizes of seeded random independent singleton queries ``a | C | b``.

    Fragments alternate between generic builds and random spaces; ``C``
    avoids ``a`` and ``b`` so the query is not trivially supported.
    """
    from .fraisse import build_generic, random_space

    sizes: list[int] = []
    frag_no = 0
    while len(sizes) < queries:
        sub = derive_seed(seed, "support-fragment", frag_no)
        if frag_no % 2 == 0:
            s = build_generic(M, 3, 2, max_vertices, sub)
        else:
            s = random_space(M, max_vertices, sub)
        rng = rng_for(seed, "support-queries", frag_no)
        frag_no += 1
        got = 0
        tries = 0
        while got < fragments_per and len(sizes) < queries and tries < 50 * fragments_per:
            tries += 1
            a, b = rng.sample(range(s.n), 2)
            others = [v for v in range(s.n) if v not in (a, b)]
            if not others:
                break
            C = rng.sample(others, rng.randint(1, len(others)))
            if indep(s, [a], C, [b]):
                sizes.append(min_support(s, a, C, b))
                got += 1
    return sizes


# -- axiom reports ---------------------------------------------------------------


@dataclass
class QueryBounds:
    max_a: int = 3
    max_b: int = 3
    max_c: int = 4


@dataclass
class AxiomResult:
    axiom: str
    seed: int
    trials: int = 0
    applicable: int = 0
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "passed": self.passed,
            "trials": self.trials,
            "applicable": self.applicable,
            "seed": self.seed,
            "counterexample": self.counterexample,
        }


@dataclass
class AxiomReport:
    suite: str
    semigroup: str
    seed: int
    trials: int
    fragments: int
    results: list[AxiomResult] = field(default_factory=list)
    partial: bool = False
    note: str = "randomized checks on finite fragments: evidence, not proof"

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results) and not self.partial

    def counterexamples(self) -> int:
        return sum(not r.passed for r in self.results)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "semigroup": self.semigroup,
            "seed": self.seed,
            "trials": self.trials,
            "fragments": self.fragments,
            "partial": self.partial,
            "passed": self.passed,
            "note": self.note,
            "results": [r.to_json() for r in self.results],
        }


class _Counterexample(Exception):
    def __init__(self, space, detail, **sets):
        super().__init__(detail)
        self.payload = {"detail": detail, "space": space.to_json()}
        for name, vs in sets.items():
            self.payload[name] = [space.vertices[v] for v in vs]


class _Skip(Exception):
    """Hypotheses of the implication did not hold on this instance."""


def _subset(rng: random.Random, pool: Sequence[int], lo: int, hi: int) -> list[int]:
    hi = min(hi, len(pool))
    if hi < lo:
        return []
    return sorted(rng.sample(list(pool), rng.randint(lo, hi)))


def adjoin_copy(s: MetricSpace, A: Sequence[int], C: Sequence[int], prefix: str = "x") -> tuple[MetricSpace, list[int]]:
    """Add a copy ``A'`` of ``A`` with the same type over ``C``, independent from everything over ``C``.

    Members of ``A`` that lie in ``C`` are kept as themselves.  Returns the
    new space and the indices of ``A'`` in ``A``'s order.
    """
    C = sorted(set(C))
    movers = [a for a in A if a not in C]
    fresh = fresh_labels(s.vertices, prefix, len(movers))
    mapping = {s.vertices[a]: f for a, f in zip(movers, fresh)}
    part = relabelled(induced(s, movers + C), mapping)
    out = amalgamate(s, part, [s.vertices[c] for c in C])
    # s is a prefix of out, so kept vertices keep their indices
    return out, [out.index(mapping[s.vertices[a]]) if a in movers else a for a in A]


class _Checker:
    """Shared trial loop; each axiom is a method returning normally, raising _Skip or _Counterexample."""

    suite = ""
    axioms: tuple[str, ...] = ()

    def __init__(self, M: PosetSemigroup, frags: list[MetricSpace], seed: int,
                 bounds: QueryBounds, relation: Relation):
        self.M = M
        self.frags = frags
        self.seed = seed
        self.bounds = bounds
        self.rel = relation

    def run(self, trials: int) -> AxiomReport:
        report = AxiomReport(self.suite, self.M.name or "", self.seed, trials, len(self.frags))
        # no fragments means nothing was checked
        report.partial = not self.frags
        for axiom in self.axioms:
            res = AxiomResult(axiom, self.seed)
            check = getattr(self, "check_" + axiom)
            if self.frags:
                for t in range(trials):
                    rng = rng_for(self.seed, self.suite, axiom, t)
                    frag = self.frags[t % len(self.frags)]
                    res.trials += 1
                    try:
                        check(frag, rng)
                        res.applicable += 1
                    except _Skip:
                        pass
                    except _Counterexample as ce:
                        res.applicable += 1
                        res.counterexample = {"trial": t, **ce.payload}
                        break
                    except MissingInfimumError as exc:
                        res.counterexample = {"trial": t, "detail": f"relation undefined: {exc}"}
                        break
            report.results.append(res)
        return report

    def sets(self, s: MetricSpace, rng: random.Random, *, c_lo: int = 0):
        V = range(s.n)
        b = self.bounds
        return (
            _subset(rng, V, 1, b.max_a),
            _subset(rng, V, c_lo, b.max_c),
            _subset(rng, V, 1, b.max_b),
        )

    def copy_over(self, s, A, C, prefix="x"):
        try:
            return adjoin_copy(s, A, C, prefix)
        except AmalgamationError as exc:
            raise _Counterexample(s, f"amalgamation over C failed: {exc}", A=A, C=C) from exc


class _SIRChecker(_Checker):
    suite = "sir"
    axioms = ("invariance", "symmetry", "monotonicity", "existence", "transitivity",
              "stationarity", "base_absorption", "pairwise_free")

    def check_invariance(self, s, rng):
        A, C, B = self.sets(s, rng)
        support = sorted(set(A) | set(B) | set(C))
        order = support[:]
        rng.shuffle(order)
        labels = fresh_labels([], "w", len(order))
        sub = MetricSpace(s.semigroup, labels, s.dist[[[i] for i in order], order])
        pos = {v: i for i, v in enumerate(order)}
        if self.rel(s, A, C, B) != self.rel(sub, [pos[a] for a in A], [pos[c] for c in C], [pos[b] for b in B]):
            raise _Counterexample(s, "relation differs on an isomorphic copy", A=A, C=C, B=B)

    def check_symmetry(self, s, rng):
        A, C, B = self.sets(s, rng)
        if rng.random() < 0.5:
            s, A = self.copy_over(s, A, C)
        if self.rel(s, A, C, B) != self.rel(s, B, C, A):
            raise _Counterexample(s, "relation is not symmetric", A=A, C=C, B=B)

    def check_monotonicity(self, s, rng):
        A, C, BD = self.sets(s, rng)
        s2, A2 = self.copy_over(s, A, C)
        if not self.rel(s2, A2, C, BD):
            raise _Skip
        cut = rng.randint(0, len(BD))
        B, D = BD[:cut], BD[cut:]
        if not self.rel(s2, A2, C, B):
            raise _Counterexample(s2, "A|C BD but not A|C B", A=A2, C=C, B=B, D=D)
        if not self.rel(s2, A2, sorted(set(B) | set(C)), D):
            raise _Counterexample(s2, "A|C BD but not A|BC D", A=A2, C=C, B=B, D=D)

    def check_existence(self, s, rng):
        A, C, B = self.sets(s, rng)
        s2, A2 = self.copy_over(s, A, C)
        if not same_type_over(s2, A, A2, C):
            raise _Counterexample(s2, "copy does not realise the type of A over C", A=A, C=C)
        if not self.rel(s2, A2, C, B):
            raise _Counterexample(s2, "canonical copy A' of A over C is not independent from B", A=A2, C=C, B=B)

    def check_transitivity(self, s, rng):
        A, C, B = self.sets(s, rng)
        B2 = _subset(rng, range(s.n), 1, self.bounds.max_b)
        s1, A1 = self.copy_over(s, A, C)
        BC = sorted(set(B) | set(C))
        s2, A2 = self.copy_over(s1, A1, BC, prefix="y")
        if not (self.rel(s2, A2, C, B) and self.rel(s2, A2, BC, B2)):
            raise _Skip
        if not self.rel(s2, A2, C, B2):
            raise _Counterexample(s2, "A|C B and A|BC B' but not A|C B'", A=A2, C=C, B=B, B2=B2)

    def check_stationarity(self, s, rng):
        A, C, B = self.sets(s, rng)
        s1, A1 = self.copy_over(s, A, C)
        s2, A2 = self.copy_over(s1, A, C, prefix="y")
        if not (same_type_over(s2, A1, A2, C) and self.rel(s2, A1, C, B) and self.rel(s2, A2, C, B)):
            raise _Skip
        if not same_type_over(s2, A1, A2, sorted(set(B) | set(C))):
            raise _Counterexample(s2, "two independent realisations differ over BC", A=A1, A2=A2, C=C, B=B)

    def check_base_absorption(self, s, rng):
        A, C, B = self.sets(s, rng)
        s2, A2 = self.copy_over(s, A, C)
        if not self.rel(s2, A2, C, B):
            raise _Skip
        if not self.rel(s2, A2, C, sorted(set(B) | set(C))):
            raise _Counterexample(s2, "A|C B but not A|C BC", A=A2, C=C, B=B)

    def check_pairwise_free(self, s, rng):
        if rng.random() < 0.5:
            s, (a,) = self.copy_over(s, [rng.randrange(s.n)], [])
        else:
            a = rng.randrange(s.n)
        free = [x for x in range(s.n) if x != a and self.rel(s, [a], [], [x])]
        if not free:
            raise _Skip
        X = _subset(rng, free, 1, len(free))
        if not self.rel(s, [a], [], X):
            raise _Counterexample(s, "a free from each x but not from X", A=[a], B=X)


class _MetricLikeChecker(_Checker):
    suite = "metric-like"
    axioms = ("self_dependence", "dependent_pair", "perfect_triviality")

    def check_self_dependence(self, s, rng):
        a = rng.randrange(s.n)
        A = _subset(rng, [v for v in range(s.n) if v != a], 0, self.bounds.max_c)
        if self.rel(s, [a], A, [a]):
            raise _Counterexample(s, "a independent from itself over A not containing a", A=[a], C=A)

    def check_dependent_pair(self, s, rng):
        M = s.semigroup
        a = rng.randrange(s.n)
        if any(b != a and not self.rel(s, [a], [], [b]) for b in range(s.n)):
            return
        top = M.require_maximum()
        for m in range(M.size):
            if m == top:
                continue
            (label,) = fresh_labels(s.vertices, "x", 1)
            pair = MetricSpace(M, [s.vertices[a], label], [[ZERO, m], [m, ZERO]])
            try:
                s2 = amalgamate(s, pair, [s.vertices[a]])
            except AmalgamationError:
                continue
            if not self.rel(s2, [a], [], [s2.n - 1]):
                return
        raise _Counterexample(s, "no b with a dependent from b over the empty set", A=[a])

    def check_perfect_triviality(self, s, rng):
        A, C, B = self.sets(s, rng)
        if rng.random() < 0.7:
            s, A = self.copy_over(s, A, C)
        if not self.rel(s, A, C, B):
            raise _Skip
        extra = _subset(rng, [v for v in range(s.n) if v not in C], 0, self.bounds.max_c)
        C2 = sorted(set(C) | set(extra))
        if not self.rel(s, A, C2, B):
            raise _Counterexample(s, "A|C B but not A|C' B for C contained in C'", A=A, C=C, C2=C2, B=B)


class _DerivedChecker(_Checker):
    suite = "derived"
    axioms = ("metricity", "triviality")

    def check_metricity(self, s, rng):
        b = self.bounds
        C1 = _subset(rng, range(s.n), 0, 2)
        D = _subset(rng, range(s.n), 0, 2)
        s1, C1c = self.copy_over(s, C1, D, prefix="y") if C1 else (s, [])
        C2 = _subset(rng, range(s.n), 0, 2)
        A = _subset(rng, range(s1.n), 1, b.max_a)
        s2, A2 = self.copy_over(s1, A, sorted(set(C1c) | set(C2)))
        B = _subset(rng, range(s.n), 1, b.max_b)
        if not (self.rel(s2, A2, sorted(set(C1c) | set(C2)), B) and self.rel(s2, C1c, D, B)):
            raise _Skip
        if not self.rel(s2, A2, sorted(set(C2) | set(D)), B):
            raise _Counterexample(s2, "A|C1C2 B and C1|D B but not A|C2D B", A=A2, C1=C1c, C2=C2, D=D, B=B)

    def check_triviality(self, s, rng):
        A, B, _ = self.sets(s, rng)
        if rng.random() < 0.7:
            s, A = self.copy_over(s, A, B)
        C = _subset(rng, range(s.n), 1, self.bounds.max_b)
        D = _subset(rng, range(s.n), 1, self.bounds.max_b)
        if not (self.rel(s, A, B, C) and self.rel(s, A, B, D)):
            raise _Skip
        if not self.rel(s, A, B, sorted(set(C) | set(D))):
            raise _Counterexample(s, "A|B C and A|B D but not A|B CD", A=A, B=B, C=C, D=D)


def _run(checker_cls, M, fragments, trials, seed, bounds, relation, max_fragments):
    frags = []
    for f in fragments:
        frags.append(f)
        if len(frags) >= max_fragments:
            break
    checker = checker_cls(M, frags, seed, bounds or QueryBounds(), relation)
    return checker.run(trials)


def check_sir_axioms(M: PosetSemigroup, fragments: Iterable[MetricSpace], trials: int = 1000, seed: int = 0,
                     bounds: QueryBounds | None = None, relation: Relation = indep,
                     max_fragments: int = 16) -> AxiomReport:
    """Invariance, Symmetry, Monotonicity, Existence, Transitivity and Stationarity.

    Each axiom gets ``trials`` seeded trials spread round-robin over up to
    ``max_fragments`` spaces drawn from ``fragments``.  Existence and
    Stationarity are checked through the canonical amalgam: a copy of
    ``A`` over ``C`` glued into the fragment.  Also covered: independence
    over ``C`` extends to ``B`` together with ``C``, and pairwise freeness
    over the empty set gives joint freeness.
    """
    return _run(_SIRChecker, M, fragments, trials, seed, bounds, relation, max_fragments)


def check_metric_like(M: PosetSemigroup, fragments: Iterable[MetricSpace], trials: int = 1000, seed: int = 0,
                      bounds: QueryBounds | None = None, relation: Relation = indep,
                      max_fragments: int = 16) -> AxiomReport:
    return _run(_MetricLikeChecker, M, fragments, trials, seed, bounds, relation, max_fragments)


def check_derived(M: PosetSemigroup, fragments: Iterable[MetricSpace], trials: int = 1000, seed: int = 0,
                  bounds: QueryBounds | None = None, relation: Relation = indep,
                  max_fragments: int = 16) -> AxiomReport:
    """Metricity and Triviality on constructed and sampled configurations (empty sets included)."""
    return _run(_DerivedChecker, M, fragments, trials, seed, bounds, relation, max_fragments)


SUITES = {"sir": check_sir_axioms, "metric-like": check_metric_like, "derived": check_derived}
