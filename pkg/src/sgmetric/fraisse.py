"""Amalgamation checks, finite approximations of generic structures, and triangle constraints."""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from ._seeds import derive_seed, rng_for
from .errors import AmalgamationError, GenericBuildError, InputError, MissingInfimumError, TriangleError
from .semigroup import ZERO, PosetSemigroup, canonical_key, enumerate_pocs
from .space import MetricSpace, amalgamate, canonical_matrix, point

AMALGAMATION_CAP = 3


# -- forbidden triangles -------------------------------------------------------


@dataclass(frozen=True)
class TriangleFamily:
    """Forbidden distance triples over an integer-labelled carrier, stored sorted."""

    name: str
    forbidden: frozenset
    K1: int | None = None
    delta: int | None = None

    def forbids(self, x: int, y: int, z: int) -> bool:
        return tuple(sorted((x, y, z))) in self.forbidden

    def values(self, M: PosetSemigroup) -> list[int]:
        """Integer value of each carrier index."""
        try:
            vals = [int(e) for e in M.elements]
        except ValueError:
            raise InputError(f"family {self.name!r} needs integer-labelled distances") from None
        if self.delta is not None and sorted(vals) != list(range(1, self.delta + 1)):
            raise InputError(f"family {self.name!r} expects distances 1..{self.delta}")
        return vals

    def to_json(self) -> dict:
        if self.K1 is not None:
            return {"name": "cherlin_odd_perimeter", "K1": self.K1, "delta": self.delta}
        return {"name": self.name, "forbidden_triples": [list(t) for t in sorted(self.forbidden)]}

    @classmethod
    def from_json(cls, data: dict) -> "TriangleFamily":
        if not isinstance(data, dict) or "name" not in data:
            raise InputError('family JSON needs a "name"')
        if data["name"] == "cherlin_odd_perimeter":
            try:
                return cherlin_odd_perimeter(int(data["K1"]), int(data["delta"]))
            except (KeyError, TypeError, ValueError):
                raise InputError("cherlin_odd_perimeter needs integer K1 and delta") from None
        triples = data.get("forbidden_triples")
        if not isinstance(triples, list) or any(
            not isinstance(t, list) or len(t) != 3 or not all(isinstance(v, int) for v in t)
            for t in triples
        ):
            raise InputError("forbidden_triples must be a list of integer triples")
        return cls(str(data["name"]), frozenset(tuple(sorted(t)) for t in triples))

    @classmethod
    def load(cls, path) -> "TriangleFamily":
        try:
            return cls.from_json(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read family {path}: {exc}") from None


def cherlin_odd_perimeter(K1: int, delta: int) -> TriangleFamily:
    """Triangles with distances in ``1..delta`` and odd perimeter below ``2*K1``."""
    if K1 < 0 or delta < 1:
        raise InputError("need K1 >= 0 and delta >= 1")
    bad = frozenset(
        t
        for t in itertools.combinations_with_replacement(range(1, delta + 1), 3)
        if sum(t) % 2 == 1 and sum(t) < 2 * K1
    )
    return TriangleFamily(f"cherlin_odd_perimeter(K1={K1},delta={delta})", bad, K1=K1, delta=delta)


def check_forbidden(s: MetricSpace, family: TriangleFamily) -> list[dict]:
    """Every vertex triple whose distance triple the family forbids."""
    vals = family.values(s.semigroup)
    d = s.dist
    out = []
    for a, b, c in itertools.combinations(range(s.n), 3):
        x, y, z = vals[d[a, b]], vals[d[a, c]], vals[d[b, c]]
        if family.forbids(x, y, z):
            out.append({"vertices": [s.vertices[a], s.vertices[b], s.vertices[c]], "distances": [x, y, z]})
    return out


def _forbidden_with(s: MetricSpace, family: TriangleFamily | None, v: int) -> list:
    """Forbidden triangles through vertex ``v``."""
    if family is None:
        return []
    vals = family.values(s.semigroup)
    d = s.dist
    others = [u for u in range(s.n) if u != v]
    for a, b in itertools.combinations(others, 2):
        if family.forbids(vals[d[v, a]], vals[d[v, b]], vals[d[a, b]]):
            return [s.vertices[v], s.vertices[a], s.vertices[b]]
    return []


# -- one-point extensions ------------------------------------------------------


def extension_vectors(M: PosetSemigroup, base_dist, family: TriangleFamily | None = None) -> list[tuple[int, ...]]:
    """All distance vectors from a new point to a base space that keep it a valid space.

    ``base_dist`` is the base's distance matrix as nested lists.
    """
    n = len(base_dist)
    vals = family.values(M) if family is not None else None
    op, leq = M.op, M.leq
    out = []
    for vec in itertools.product(range(M.size), repeat=n):
        ok = True
        for i in range(n):
            vi = vec[i]
            for j in range(i + 1, n):
                vj, dij = vec[j], base_dist[i][j]
                if not (leq[vi][op[vj][dij]] and leq[vj][op[vi][dij]] and leq[dij][op[vi][vj]]):
                    ok = False
                    break
                if vals is not None and family.forbids(vals[vi], vals[vj], vals[dij]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(vec)
    return out


def _extension_space(s: MetricSpace, base: Sequence[int], vec: Sequence[int], label: str) -> MetricSpace:
    k = len(base)
    d = np.empty((k + 1, k + 1), dtype=np.int64)
    d[:k, :k] = s.dist[np.ix_(base, base)]
    d[k, :k] = d[:k, k] = vec
    d[k, k] = ZERO
    return MetricSpace(s.semigroup, [s.vertices[i] for i in base] + [label], d)


def adjoin(s: MetricSpace, base: Sequence[int], vec: Sequence[int], label: str,
           family: TriangleFamily | None = None) -> MetricSpace:
    """Add ``label`` with distances ``vec`` to ``base`` by shortest-path amalgamation over the base."""
    ext = _extension_space(s, base, vec, label)
    out = amalgamate(s, ext, [s.vertices[i] for i in base])
    bad = _forbidden_with(out, family, out.n - 1)
    if bad:
        raise AmalgamationError("amalgam contains a forbidden triangle",
                                witness={"reason": "forbidden triangle", "vertices": bad})
    return out


# -- random and generic fragments ----------------------------------------------


def random_space(M: PosetSemigroup, n: int, seed=0, family: TriangleFamily | None = None,
                 max_retries: int = 200) -> MetricSpace:
    """``n``-point space grown by random one-point shortest-path extensions.

    Each new point picks a random base among the existing points and random
    distances to it; invalid choices are retried.
    """
    if n < 1:
        raise InputError("random_space needs n >= 1")
    rng = rng_for(seed, "random_space")
    s = point(M)
    for i in range(1, n):
        for _ in range(max_retries):
            k = rng.randint(1, s.n)
            base = sorted(rng.sample(range(s.n), k))
            vec = [rng.randrange(M.size) for _ in base]
            try:
                s = adjoin(s, base, vec, f"v{i}", family)
                break
            except (AmalgamationError, MissingInfimumError, TriangleError):
                continue
        else:
            raise GenericBuildError(f"no valid extension found after {max_retries} tries at point {i}")
    return s


def build_generic(M: PosetSemigroup, rounds: int, max_base: int, max_vertices: int, seed=0,
                  family: TriangleFamily | None = None) -> MetricSpace:
    """Finite approximation of the generic structure by extension-property saturation.

    Each round lists the one-point extension types over every vertex subset
    of size ``1..max_base`` that the fragment does not yet realise, shuffles
    them with the seeded generator, and adjoins them one by one until
    ``max_vertices`` is reached.
    """
    if rounds < 1 or max_base < 1 or max_vertices < 1:
        raise InputError("rounds, max_base and max_vertices must be positive")
    rng = rng_for(seed, "build_generic")
    s = point(M)
    ext_cache: dict[tuple, list] = {}
    counter = 1
    for _ in range(rounds):
        if s.n >= max_vertices:
            break
        todo = []
        for size in range(1, max_base + 1):
            for base in itertools.combinations(range(s.n), size):
                sub = s.dist[np.ix_(base, base)].tolist()
                key = tuple(map(tuple, sub))
                if key not in ext_cache:
                    ext_cache[key] = extension_vectors(M, sub, family)
                realised = {tuple(s.dist[y, list(base)].tolist()) for y in range(s.n) if y not in base}
                todo.extend((base, vec) for vec in ext_cache[key] if vec not in realised)
        if not todo:
            break
        rng.shuffle(todo)
        for base, vec in todo:
            if s.n >= max_vertices:
                break
            cols = list(base)
            if any(tuple(s.dist[y, cols].tolist()) == vec for y in range(s.n) if y not in base):
                continue
            try:
                s = adjoin(s, base, vec, f"v{counter}", family)
            except (AmalgamationError, MissingInfimumError) as exc:
                raise GenericBuildError(
                    "shortest-path amalgamation failed while building the fragment",
                    witness={
                        "base": [s.vertices[i] for i in base],
                        "extension": [M.label(v) for v in vec],
                        "detail": getattr(exc, "witness", None),
                    },
                ) from exc
            counter += 1
    return s


def fragments(M: PosetSemigroup, count: int, seed=0, kind: str = "mixed", size: int = 10,
              rounds: int = 3, max_base: int = 2, family: TriangleFamily | None = None) -> Iterator[MetricSpace]:
    """Seeded stream of test fragments: generic builds, random spaces, or alternating."""
    if kind not in ("generic", "random", "mixed"):
        raise InputError(f"unknown fragment kind {kind!r}")
    for i in range(count):
        sub = derive_seed(seed, "fragment", i)
        use_generic = kind == "generic" or (kind == "mixed" and i % 2 == 0)
        if use_generic:
            yield build_generic(M, rounds, max_base, size, sub, family)
        else:
            yield random_space(M, size, sub, family)


# -- amalgamation check --------------------------------------------------------


@dataclass
class AmalgamationReport:
    semigroup: str
    base_bound: int
    passed: bool
    bases_checked: int = 0
    pairs_checked: int = 0
    witness: dict | None = None
    family: dict | None = None

    def to_json(self) -> dict:
        return {
            "semigroup": self.semigroup,
            "base_bound": self.base_bound,
            "family": self.family,
            "passed": self.passed,
            "bases_checked": self.bases_checked,
            "pairs_checked": self.pairs_checked,
            "witness": self.witness,
        }


def base_spaces(M: PosetSemigroup, size: int, family: TriangleFamily | None = None) -> list[MetricSpace]:
    """All ``size``-point spaces up to isomorphism, in canonical order."""
    labels = [f"c{i}" for i in range(size)]
    if size == 0:
        return [MetricSpace(M, [], [])]
    pairs = list(itertools.combinations(range(size), 2))
    found = {}
    for combo in itertools.product(range(M.size), repeat=len(pairs)):
        d = np.full((size, size), ZERO, dtype=np.int64)
        for (i, j), v in zip(pairs, combo):
            d[i, j] = d[j, i] = v
        try:
            s = MetricSpace(M, labels, d)
        except TriangleError:
            continue
        if family is not None and check_forbidden(s, family):
            continue
        key = canonical_matrix(s)
        if key not in found:
            found[key] = MetricSpace(M, labels, np.array(key, dtype=np.int64).reshape(size, size))
    return [found[k] for k in sorted(found)]


def _check_base(M: PosetSemigroup, base: MetricSpace, family: TriangleFamily | None):
    """Amalgamate every pair of one-point extensions of ``base``; return (pairs, failure)."""
    sub = base.dist.tolist()
    exts = extension_vectors(M, sub, family)
    vals = family.values(M) if family is not None else None
    top = M.require_maximum()
    op, leq = M.op, M.leq
    pairs = 0
    for i, e1 in enumerate(exts):
        for e2 in exts[i:]:
            pairs += 1
            if e1:
                cross = M.infimum(op[x][y] for x, y in zip(e1, e2))
            else:
                cross = top
            reason = None
            if cross is None:
                reason = "missing infimum"
            else:
                for c, (x, y) in enumerate(zip(e1, e2)):
                    if not (leq[x][op[cross][y]] and leq[y][op[cross][x]]):
                        reason = f"triangle through c{c}"
                        break
                    if vals is not None and family.forbids(vals[cross], vals[x], vals[y]):
                        reason = f"forbidden triangle through c{c}"
                        break
            if reason:
                return pairs, {
                    "reason": reason,
                    "base": base.to_json(),
                    "ext1": [M.label(v) for v in e1],
                    "ext2": [M.label(v) for v in e2],
                    "d_x1_x2": None if cross is None else M.label(cross),
                }
    return pairs, None


def _check_base_job(args):
    M, base, family = args
    return _check_base(M, base, family)


def check_amalgamation(M: PosetSemigroup, base_bound: int, family: TriangleFamily | None = None,
                       cap: int = AMALGAMATION_CAP, jobs: int = 1) -> AmalgamationReport:
    """Exhaustively amalgamate pairs of one-point extensions over every small base.

    A failure is a result, reported with the first witness in canonical order.
    """
    if base_bound > cap:
        raise InputError(f"base_bound {base_bound} exceeds the cap {cap}")
    if base_bound < 0:
        raise InputError("base_bound must be >= 0")
    M.require_maximum()
    report = AmalgamationReport(M.name or canonical_key(M), base_bound, True,
                                family=family.to_json() if family else None)
    bases = [b for size in range(base_bound + 1) for b in base_spaces(M, size, family)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_check_base_job, [(M, b, family) for b in bases]))
    else:
        results = (_check_base(M, b, family) for b in bases)
    for pairs, failure in results:
        report.bases_checked += 1
        report.pairs_checked += pairs
        if failure is not None:
            report.passed = False
            report.witness = failure
            break
    return report


# -- classification ------------------------------------------------------------


def _classify_row(M: PosetSemigroup, base_bound: int, budget) -> dict:
    from .geodesics import compute_bound
    from .independence import find_unsupported_witness

    arch, _ = M.is_archimedean()
    top = M.maximum()
    row = {
        "key": canonical_key(M),
        "size": M.size,
        "semigroup": M.to_json(),
        "valid": True,
        "archimedean": arch,
        "has_maximum": top is not None,
        "binary_infima": M.has_binary_infima,
        "amalgamation": None,
        "bound": None,
        "one_supported": None,
    }
    if top is None:
        return row
    row["amalgamation"] = "pass" if check_amalgamation(M, base_bound).passed else "fail"
    row["bound"] = compute_bound(M, max_len=2 * M.size + 2)
    try:
        row["one_supported"] = find_unsupported_witness(M, 1, budget) is None
    except MissingInfimumError:
        row["one_supported"] = None
    return row


def _classify_job(args):
    return _classify_row(*args)


def classify_semigroups(max_size: int, base_bound: int, jobs: int = 1, budget=None) -> list[dict]:
    """Flags for every enumerated semigroup of size at most ``max_size``, sorted by key.

    ``budget`` bounds the 1-supportedness search (an ``independence.SupportBudget``).
    """
    from .independence import SupportBudget

    budget = budget or SupportBudget()
    sgs = list(enumerate_pocs(max_size))
    args = [(M, base_bound, budget) for M in sgs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_classify_job, args))
    else:
        rows = [_classify_row(*a) for a in args]
    rows.sort(key=lambda r: (r["size"], r["key"]))
    return rows
