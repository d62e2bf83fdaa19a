"""Finite partially ordered commutative semigroups.

A semigroup is stored as index tables over a carrier ``0..m-1``: ``op`` is
the addition table and ``leq`` the order relation.  The zero symbol (the
distance of a vertex to itself) is not a carrier element.  Where it has to
travel through the same code paths as carrier indices it is the integer
``ZERO == -1``; the extended numpy tables put its row and column last, so
``xop[ZERO, x]`` indexes correctly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import AxiomViolation, InputError, NoMaximumError, NonAssociativeError

ZERO = -1
NOMEET = -3

ENUMERATION_CAP = 4

AXIOMS = (
    "commutativity",
    "associativity",
    "reflexivity",
    "antisymmetry",
    "transitivity",
    "absorption",
    "monotonicity",
)


@dataclass
class ValidationReport:
    violations: list[tuple[str, tuple[str, ...]]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "violations": [{"axiom": name, "witness": list(w)} for name, w in self.violations],
        }


def _check_shape(elements, op, leq) -> tuple[tuple[str, ...], list[list[int]], list[list[bool]]]:
    elements = tuple(str(e) for e in elements)
    m = len(elements)
    if m == 0:
        raise InputError("carrier must be nonempty")
    if len(set(elements)) != m:
        raise InputError("element labels must be distinct")
    if "0" in elements:
        raise InputError('"0" is reserved for the zero symbol and cannot label an element')
    if len(op) != m or any(len(row) != m for row in op):
        raise InputError(f"op table must be {m}x{m}")
    if len(leq) != m or any(len(row) != m for row in leq):
        raise InputError(f"leq table must be {m}x{m}")
    op_rows = []
    for row in op:
        out = []
        for v in row:
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or not 0 <= v < m:
                raise InputError(f"op entry {v!r} is not an element index in 0..{m - 1}")
            out.append(int(v))
        op_rows.append(out)
    leq_rows = []
    for row in leq:
        out = []
        for v in row:
            if v not in (0, 1, True, False):
                raise InputError(f"leq entry {v!r} is not boolean")
            out.append(bool(v))
        leq_rows.append(out)
    return elements, op_rows, leq_rows


def validate(elements: Sequence, op: Sequence[Sequence[int]], leq: Sequence[Sequence]) -> ValidationReport:
    """Check every axiom and report the lexicographically first witness of each failure.

    Raises ``InputError`` for tables that are not square or not index-closed;
    an axiom failure is never an exception here.
    """
    elements, op, leq = _check_shape(elements, op, leq)
    m = len(elements)
    rng = range(m)
    found: dict[str, tuple[int, ...]] = {}

    def note(name, *idx):
        found.setdefault(name, idx)

    for a, b in itertools.product(rng, rng):
        if op[a][b] != op[b][a]:
            note("commutativity", a, b)
        if not leq[a][op[a][b]]:
            note("absorption", a, b)
        if a != b and leq[a][b] and leq[b][a]:
            note("antisymmetry", a, b)
    for a in rng:
        if not leq[a][a]:
            note("reflexivity", a)
    for a, b, c in itertools.product(rng, rng, rng):
        if op[op[a][b]][c] != op[a][op[b][c]]:
            note("associativity", a, b, c)
        if leq[a][b] and leq[b][c] and not leq[a][c]:
            note("transitivity", a, b, c)
        if leq[b][c] and not leq[op[a][b]][op[a][c]]:
            note("monotonicity", a, b, c)
    violations = [
        (name, tuple(elements[i] for i in found[name])) for name in AXIOMS if name in found
    ]
    return ValidationReport(violations)


@dataclass(frozen=True)
class PosetSemigroup:
    """``(M, +, <=)`` on carrier indices.  Only constructible from valid data."""

    elements: tuple[str, ...]
    op: tuple[tuple[int, ...], ...]
    leq: tuple[tuple[bool, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        report = validate(self.elements, self.op, self.leq)
        if not report.passed:
            if any(name == "associativity" for name, _ in report.violations):
                raise NonAssociativeError(report)
            raise AxiomViolation(report)
        object.__setattr__(self, "elements", tuple(str(e) for e in self.elements))
        object.__setattr__(self, "op", tuple(tuple(int(v) for v in row) for row in self.op))
        object.__setattr__(self, "leq", tuple(tuple(bool(v) for v in row) for row in self.leq))

    # -- basic access --------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def size(self) -> int:
        return len(self.elements)

    def index(self, label) -> int:
        try:
            return self._label_index[str(label)]
        except KeyError:
            raise InputError(f"{label!r} is not an element of the semigroup") from None

    def label(self, x: int) -> str:
        return "0" if x == ZERO else self.elements[x]

    @cached_property
    def _label_index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.elements)}

    def add(self, x: int, y: int) -> int:
        """``x + y`` where either side may be ``ZERO``."""
        if x == ZERO:
            return y
        if y == ZERO:
            return x
        return self.op[x][y]

    def le(self, x: int, y: int) -> bool:
        if x == ZERO:
            return True
        if y == ZERO:
            return False
        return self.leq[x][y]

    def lt(self, x: int, y: int) -> bool:
        return x != y and self.le(x, y)

    def fold(self, values: Iterable[int]) -> int:
        it = iter(values)
        try:
            acc = next(it)
        except StopIteration:
            raise InputError("cannot fold an empty sequence (zero is not a carrier element)") from None
        for v in it:
            acc = self.add(acc, v)
        return acc

    # -- derived quantities ----------------------------------------------

    def n_times(self, a: int, n: int) -> int:
        if n < 1:
            raise InputError("n_times needs n >= 1")
        if a == ZERO:
            raise InputError("n_times is defined on carrier elements only")
        acc = a
        for _ in range(n - 1):
            nxt = self.op[acc][a]
            if nxt == acc:
                break
            acc = nxt
        return acc

    def stable_power(self, a: int) -> int:
        return self.n_times(a, self.size)

    def is_archimedean(self) -> tuple[bool, tuple[int, int] | None]:
        """Return ``(True, None)`` or ``(False, (a, b))`` with no power of ``a`` above ``b``.

        Powers of ``a`` form a nondecreasing chain, so ``|M|`` steps reach
        the stable value.
        """
        for a in range(self.size):
            p = self.stable_power(a)
            for b in range(self.size):
                if not self.leq[b][p]:
                    return False, (a, b)
        return True, None

    def identity(self) -> int | None:
        """Element ``e`` with ``e + x == x`` for every ``x``, if there is one."""
        for e in range(self.size):
            if all(self.op[e][x] == x for x in range(self.size)):
                return e
        return None

    @cached_property
    def _maximum(self) -> int | None:
        for x in range(self.size):
            if all(self.leq[y][x] for y in range(self.size)):
                return x
        return None

    def maximum(self) -> int | None:
        return self._maximum

    def require_maximum(self) -> int:
        top = self._maximum
        if top is None:
            raise NoMaximumError(f"semigroup {self.name or self.elements} has no maximum")
        return top

    @cached_property
    def _down(self) -> tuple[int, ...]:
        return tuple(
            sum(1 << y for y in range(self.size) if self.leq[y][x]) for x in range(self.size)
        )

    @cached_property
    def _inf_cache(self) -> dict[int, int | None]:
        return {}

    def infimum(self, elements: Iterable[int]) -> int | None:
        """Greatest lower bound of a set of carrier elements, ``None`` if absent.

        The empty set has the maximum as infimum.
        """
        mask = 0
        for e in elements:
            mask |= 1 << e
        cache = self._inf_cache
        if mask in cache:
            return cache[mask]
        lower = (1 << self.size) - 1
        rest = mask
        while rest:
            low = rest & -rest
            lower &= self._down[low.bit_length() - 1]
            rest ^= low
        result = None
        for x in range(self.size):
            if lower >> x & 1 and self._down[x] & lower == lower:
                result = x
                break
        cache[mask] = result
        return result

    def ext_infimum(self, values: Iterable[int]) -> int | None:
        """Infimum over carrier elements and ``ZERO`` (the global minimum)."""
        values = set(values)
        if ZERO in values:
            return ZERO
        return self.infimum(values)

    @cached_property
    def meet_table(self) -> np.ndarray:
        """Binary infima over the extended carrier; ``NOMEET`` where none exists."""
        m = self.size
        t = np.full((m + 1, m + 1), NOMEET, dtype=np.int64)
        for x in range(m):
            for y in range(m):
                v = self.infimum((x, y))
                t[x, y] = NOMEET if v is None else v
        t[m, :] = ZERO
        t[:, m] = ZERO
        t.setflags(write=False)
        return t

    @cached_property
    def has_binary_infima(self) -> bool:
        return bool((self.meet_table[: self.size, : self.size] != NOMEET).all())

    @cached_property
    def xop(self) -> np.ndarray:
        m = self.size
        t = np.empty((m + 1, m + 1), dtype=np.int64)
        t[:m, :m] = np.asarray(self.op, dtype=np.int64)
        t[m, :m] = np.arange(m)
        t[:m, m] = np.arange(m)
        t[m, m] = ZERO
        t.setflags(write=False)
        return t

    @cached_property
    def xleq(self) -> np.ndarray:
        m = self.size
        t = np.zeros((m + 1, m + 1), dtype=bool)
        t[:m, :m] = np.asarray(self.leq, dtype=bool)
        t[m, :] = True
        t.setflags(write=False)
        return t

    # -- encodings ---------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "elements": list(self.elements),
            "op": [list(row) for row in self.op],
            "leq": [list(row) for row in self.leq],
        }

    @classmethod
    def from_json(cls, data: dict, name: str = "") -> "PosetSemigroup":
        try:
            elements, op, leq = data["elements"], data["op"], data["leq"]
        except (KeyError, TypeError):
            raise InputError('semigroup JSON needs "elements", "op" and "leq"') from None
        return cls(tuple(elements), tuple(map(tuple, op)), tuple(map(tuple, leq)), name=name)

    def relabel(self, perm: Sequence[int], labels: Sequence[str] | None = None) -> "PosetSemigroup":
        """Isomorphic copy where old element ``i`` becomes index ``perm[i]``."""
        m = self.size
        op = [[0] * m for _ in range(m)]
        leq = [[False] * m for _ in range(m)]
        for i in range(m):
            for j in range(m):
                op[perm[i]][perm[j]] = perm[self.op[i][j]]
                leq[perm[i]][perm[j]] = self.leq[i][j]
        if labels is None:
            labels = [None] * m
            for i in range(m):
                labels[perm[i]] = self.elements[i]
        return PosetSemigroup(tuple(labels), tuple(map(tuple, op)), tuple(map(tuple, leq)), name=self.name)


# -- constructors ------------------------------------------------------------


def path_semigroup(n: int) -> PosetSemigroup:
    """``{1..n}`` with addition capped at ``n`` and the usual order."""
    if n < 1:
        raise InputError("path_semigroup needs n >= 1")
    elements = tuple(str(i) for i in range(1, n + 1))
    op = tuple(tuple(min(n, a + b) - 1 for b in range(1, n + 1)) for a in range(1, n + 1))
    leq = tuple(tuple(a <= b for b in range(n)) for a in range(n))
    return PosetSemigroup(elements, op, leq, name=f"path:{n}")


def product_capped(n: int, k: int) -> PosetSemigroup:
    """``{1..n}^k`` with componentwise capped addition and the product order."""
    if n < 3 or k < 1:
        raise InputError("product_capped needs n >= 3 and k >= 1")
    tuples = list(itertools.product(range(1, n + 1), repeat=k))
    pos = {t: i for i, t in enumerate(tuples)}
    elements = tuple("(" + ",".join(map(str, t)) + ")" for t in tuples)
    op = tuple(
        tuple(pos[tuple(min(n, x + y) for x, y in zip(s, t))] for t in tuples) for s in tuples
    )
    leq = tuple(tuple(all(x <= y for x, y in zip(s, t)) for t in tuples) for s in tuples)
    return PosetSemigroup(elements, op, leq, name=f"product:{n},{k}")


def _fraction(value) -> Fraction:
    if isinstance(value, float):
        raise InputError("use exact rationals (int, Fraction or 'p/q' strings), not floats")
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise InputError(f"{value!r} is not a rational number") from None


def sauer_semigroup(values: Iterable) -> PosetSemigroup:
    """``(S, +_S, <=)`` with ``a +_S b = max{x in S : x <= a + b}``, in exact arithmetic.

    Raises ``NonAssociativeError`` (carrying a witness triple) when ``+_S``
    is not associative.
    """
    s = sorted({_fraction(v) for v in values})
    if not s:
        raise InputError("S must be nonempty")
    if s[0] <= 0:
        raise InputError("S must contain positive values only")
    m = len(s)
    op = []
    for a in s:
        row = []
        for b in s:
            below = [i for i, x in enumerate(s) if x <= a + b]
            # a + b > a >= min(S), so the candidate set is never empty
            assert below, "empty candidate set for positive S"
            row.append(below[-1])
        op.append(tuple(row))
    leq = tuple(tuple(i <= j for j in range(m)) for i in range(m))
    labels = tuple(str(x) for x in s)
    return PosetSemigroup(labels, tuple(op), leq, name="sauer:" + ",".join(labels))


def parse_semigroup_spec(spec: str) -> PosetSemigroup:
    """Inline constructors: ``path:4``, ``product:3,2``, ``sauer:1,3/2,2``."""
    kind, _, args = spec.partition(":")
    parts = [p.strip() for p in args.split(",") if p.strip()]
    try:
        if kind == "path" and len(parts) == 1:
            return path_semigroup(int(parts[0]))
        if kind == "product" and len(parts) == 2:
            return product_capped(int(parts[0]), int(parts[1]))
    except ValueError:
        raise InputError(f"bad integer in semigroup spec {spec!r}") from None
    if kind == "sauer" and parts:
        return sauer_semigroup(parts)
    raise InputError(f"unknown semigroup spec {spec!r} (expected path:n, product:n,k or sauer:s1,s2,...)")


# -- canonical forms and enumeration -----------------------------------------


def _relabelled_key(op, leq, perm) -> tuple[tuple[int, ...], tuple[int, ...]]:
    m = len(perm)
    inv = [0] * m
    for i, p in enumerate(perm):
        inv[p] = i
    op_key = tuple(perm[op[inv[i]][inv[j]]] for i in range(m) for j in range(m))
    leq_key = tuple(int(leq[inv[i]][inv[j]]) for i in range(m) for j in range(m))
    return op_key, leq_key


def canonical_form(op, leq) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Lexicographically least ``(op, leq)`` over all relabellings of the carrier."""
    m = len(op)
    return min(_relabelled_key(op, leq, perm) for perm in itertools.permutations(range(m)))


def canonical_key(sg: PosetSemigroup) -> str:
    op_key, leq_key = canonical_form(sg.op, sg.leq)
    return f"{sg.size}:{''.join(map(str, op_key))}:{''.join(map(str, leq_key))}"


def _from_key(m, op_key, leq_key) -> PosetSemigroup:
    op = tuple(tuple(op_key[i * m : (i + 1) * m]) for i in range(m))
    leq = tuple(tuple(bool(v) for v in leq_key[i * m : (i + 1) * m]) for i in range(m))
    labels = tuple("abcdefgh"[i] for i in range(m))
    sg = PosetSemigroup(labels, op, leq)
    object.__setattr__(sg, "name", canonical_key(sg))
    return sg


def _partial_orders(m: int) -> list[tuple[tuple[bool, ...], ...]]:
    """One representative partial order per isomorphism class."""
    pairs = [(i, j) for i in range(m) for j in range(m) if i != j]
    reps = {}
    for bits in itertools.product((False, True), repeat=len(pairs)):
        rel = [[i == j for j in range(m)] for i in range(m)]
        for (i, j), bit in zip(pairs, bits):
            rel[i][j] = bit
        if any(rel[i][j] and rel[j][i] for i, j in pairs):
            continue
        if any(
            rel[i][j] and rel[j][k] and not rel[i][k]
            for i in range(m)
            for j in range(m)
            for k in range(m)
        ):
            continue
        key = min(
            tuple(rel[p.index(i)][p.index(j)] for i in range(m) for j in range(m))
            for p in itertools.permutations(range(m))
        )
        reps.setdefault(key, tuple(tuple(r) for r in rel))
    return [reps[k] for k in sorted(reps)]


def _op_tables(leq) -> Iterator[list[list[int]]]:
    """Commutative tables with ``a + b`` above both ``a`` and ``b``; other axioms checked later."""
    m = len(leq)
    cells = [(a, b) for a in range(m) for b in range(a, m)]
    choices = [[c for c in range(m) if leq[a][c] and leq[b][c]] for a, b in cells]
    if any(not ch for ch in choices):
        return
    for combo in itertools.product(*choices):
        table = [[0] * m for _ in range(m)]
        for (a, b), v in zip(cells, combo):
            table[a][b] = table[b][a] = v
        yield table


def _is_pocs(op, leq) -> bool:
    m = len(op)
    r = range(m)
    for a, b, c in itertools.product(r, r, r):
        if op[op[a][b]][c] != op[a][op[b][c]]:
            return False
        if leq[b][c] and not leq[op[a][b]][op[a][c]]:
            return False
    return True


def enumerate_pocs(max_size: int, cap: int = ENUMERATION_CAP) -> Iterator[PosetSemigroup]:
    """Every partially ordered commutative semigroup with at most ``max_size`` elements.

    Each isomorphism class appears once, in canonical form, ordered by
    ``(size, canonical op table, canonical order)``.  Sizes above ``cap``
    are refused.
    """
    if max_size > cap:
        raise InputError(f"max_size {max_size} exceeds the enumeration cap {cap}")
    if max_size < 1:
        return
    for m in range(1, max_size + 1):
        keys = set()
        for leq in _partial_orders(m):
            for op in _op_tables(leq):
                if _is_pocs(op, leq):
                    keys.add(canonical_form(op, leq))
        for op_key, leq_key in sorted(keys):
            yield _from_key(m, op_key, leq_key)
