"""Edge-labelled graphs and metric spaces over a partially ordered commutative semigroup.

Distances are a dense symmetric integer matrix: carrier indices off the
diagonal, ``ZERO`` on it, ``UNDEF`` for a missing edge (graphs only).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import AmalgamationError, InputError, MissingInfimumError, TriangleError
from .semigroup import NOMEET, ZERO, PosetSemigroup

UNDEF = -2


class LabelledGraph:
    """Complete or partial ``M``-edge-labelled graph on labelled vertices."""

    complete_required = False

    def __init__(self, semigroup: PosetSemigroup, vertices: Sequence[str], dist):
        vertices = tuple(str(v) for v in vertices)
        if len(set(vertices)) != len(vertices):
            raise InputError("vertex labels must be distinct")
        n = len(vertices)
        d = np.array(dist, dtype=np.int64).reshape(n, n) if n else np.zeros((0, 0), dtype=np.int64)
        if d.shape != (n, n):
            raise InputError(f"distance matrix must be {n}x{n}")
        if n and not (np.diag(d) == ZERO).all():
            raise InputError("diagonal entries must be the zero symbol")
        if not (d == d.T).all():
            raise InputError("distance matrix must be symmetric")
        off = ~np.eye(n, dtype=bool)
        vals = d[off]
        ok = (vals >= 0) & (vals < semigroup.size)
        if not self.complete_required:
            ok |= vals == UNDEF
        if not ok.all():
            what = "carrier element" if self.complete_required else "carrier element or undefined"
            raise InputError(f"off-diagonal entries must be a {what}")
        d.setflags(write=False)
        self.semigroup = semigroup
        self.vertices = vertices
        self.dist = d
        self._index = {v: i for i, v in enumerate(vertices)}

    # -- access --------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise InputError(f"unknown vertex {label!r}") from None

    def indices(self, labels: Iterable) -> list[int]:
        return [self.index(v) for v in labels]

    @cached_property
    def rows(self) -> list[list[int]]:
        """Distances as nested lists, for scalar-heavy loops."""
        return self.dist.tolist()

    def d(self, u: int, v: int) -> int | None:
        x = int(self.dist[u, v])
        return None if x == UNDEF else x

    def is_complete(self) -> bool:
        return not (self.dist == UNDEF).any()

    def __eq__(self, other):
        if not isinstance(other, LabelledGraph):
            return NotImplemented
        return (
            self.semigroup == other.semigroup
            and self.vertices == other.vertices
            and np.array_equal(self.dist, other.dist)
        )

    def __hash__(self):
        return hash((self.vertices, self.dist.tobytes()))

    def __repr__(self):
        return f"{type(self).__name__}({self.n} vertices over {self.semigroup.name or self.semigroup.size})"

    # -- serialisation -----------------------------------------------------

    def to_json(self, semigroup_ref=None) -> dict:
        M = self.semigroup
        rows = [
            [None if x == UNDEF else M.label(int(x)) for x in row] for row in self.dist.tolist()
        ]
        return {
            "semigroup": semigroup_ref if semigroup_ref is not None else M.to_json(),
            "vertices": list(self.vertices),
            "d": rows,
        }

    @classmethod
    def from_json(cls, data: dict, base_dir: Path | None = None, semigroup: PosetSemigroup | None = None):
        try:
            vertices = data["vertices"]
            rows = data["d"]
        except (KeyError, TypeError):
            raise InputError('space JSON needs "vertices" and "d"') from None
        if semigroup is None:
            semigroup = load_semigroup_ref(data.get("semigroup"), base_dir)
        n = len(vertices)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise InputError(f"distance matrix must be {n}x{n}")
        d = [
            [UNDEF if x is None else ZERO if str(x) == "0" else semigroup.index(x) for x in row]
            for row in rows
        ]
        return cls(semigroup, vertices, d)


def load_semigroup_ref(ref, base_dir: Path | None = None) -> PosetSemigroup:
    """Semigroup from inline JSON, an inline constructor spec, or a file path."""
    from .semigroup import parse_semigroup_spec

    if isinstance(ref, dict):
        return PosetSemigroup.from_json(ref)
    if isinstance(ref, str):
        if ":" in ref and not Path(ref).exists():
            return parse_semigroup_spec(ref)
        path = Path(ref)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read semigroup {ref!r}: {exc}") from None
        return PosetSemigroup.from_json(data, name=str(ref))
    raise InputError('space JSON needs a "semigroup" object, spec string or file path')


@dataclass
class TriangleReport:
    violations: list[tuple[int, int, int, int, int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self, g: LabelledGraph) -> list[dict]:
        M = g.semigroup
        return [
            {
                "vertices": [g.vertices[a], g.vertices[b], g.vertices[c]],
                "d_ab": M.label(dab),
                "d_ac": M.label(dac),
                "d_cb": M.label(dcb),
            }
            for a, b, c, dab, dac, dcb in self.violations
        ]


def _path_sums(M: PosetSemigroup, d: np.ndarray) -> np.ndarray:
    """``sums[a, c, b] = d(a, c) + d(c, b)``."""
    return M.xop[d[:, :, None], d[None, :, :]]


def check_triangles(g: LabelledGraph) -> TriangleReport:
    """Every defined triple ``(a, b, c)`` (with ``a < b``) where ``d(a,b) <= d(a,c) + d(c,b)`` fails."""
    M = g.semigroup
    d = g.dist
    n = g.n
    if n < 3:
        return TriangleReport()
    defined = d != UNDEF
    dd = np.where(defined, d, ZERO)
    sums = _path_sums(M, dd)
    ok = M.xleq[dd[:, None, :], sums]
    relevant = defined[:, None, :] & defined[:, :, None] & defined.T[None, :, :]
    bad = np.argwhere(relevant & ~ok)
    out = []
    for a, c, b in bad.tolist():
        if a < b:
            out.append((a, b, c, int(d[a, b]), int(d[a, c]), int(d[c, b])))
    out.sort()
    return TriangleReport(out)


class MetricSpace(LabelledGraph):
    """Complete graph satisfying the triangle inequality; checked on construction."""

    complete_required = True

    def __init__(self, semigroup: PosetSemigroup, vertices: Sequence[str], dist):
        super().__init__(semigroup, vertices, dist)
        report = check_triangles(self)
        if not report.ok:
            a, b, c = report.violations[0][:3]
            raise TriangleError(
                f"triangle inequality fails on {self.vertices[a]},{self.vertices[b]},{self.vertices[c]}",
                witness=report.to_json(self)[0],
            )

    @classmethod
    def from_graph(cls, g: LabelledGraph) -> "MetricSpace":
        return cls(g.semigroup, g.vertices, g.dist)


def point(M: PosetSemigroup, label: str = "v0") -> MetricSpace:
    return MetricSpace(M, [label], [[ZERO]])


def from_labels(M: PosetSemigroup, vertices: Sequence[str], rows, complete: bool = True):
    """Build a space from a matrix of element labels (``"0"``/``None`` as in JSON)."""
    cls = MetricSpace if complete else LabelledGraph
    return cls.from_json({"vertices": list(vertices), "d": rows}, semigroup=M)


def from_edges(M: PosetSemigroup, vertices: Sequence[str], edges: dict, complete: bool = True):
    """Build from ``{(u, v): element label}``; missing pairs are undefined."""
    idx = {v: i for i, v in enumerate(vertices)}
    n = len(vertices)
    d = np.full((n, n), UNDEF, dtype=np.int64)
    np.fill_diagonal(d, ZERO)
    for (u, v), lab in edges.items():
        x = M.index(lab)
        d[idx[u], idx[v]] = d[idx[v], idx[u]] = x
    cls = MetricSpace if complete else LabelledGraph
    return cls(M, vertices, d)


# -- completion ----------------------------------------------------------------


def _relax(M: PosetSemigroup, d: np.ndarray) -> np.ndarray:
    """One synchronous round of ``d(a,b) := inf_c (d(a,c) + d(c,b))``; ``c`` ranges over all vertices."""
    sums = _path_sums(M, d)
    n = d.shape[0]
    if M.has_binary_infima:
        out = sums[:, 0, :].copy()
        for c in range(1, n):
            out = M.meet_table[out, sums[:, c, :]]
        return out
    out = d.copy()
    for a in range(n):
        for b in range(a + 1, n):
            v = M.ext_infimum(sums[a, :, b].tolist())
            if v is None:
                raise MissingInfimumError(
                    f"no infimum for the paths between vertices {a} and {b}", witness=(a, b)
                )
            out[a, b] = out[b, a] = v
    return out


def complete_shortest_path(g: LabelledGraph) -> MetricSpace:
    """Fill undefined edges by shortest paths, iterating to a fixpoint.

    Undefined edges start at the maximum and relaxation only ever lowers a
    value, so the iteration terminates.  A defined edge that relaxation
    would lower means the input already violates the triangle inequality
    along some path, and is reported as ``TriangleError``.
    """
    M = g.semigroup
    report = check_triangles(g)
    if not report.ok:
        raise TriangleError("input graph violates the triangle inequality", witness=report.to_json(g)[0])
    top = M.require_maximum()
    defined = g.dist != UNDEF
    d = np.where(defined, g.dist, top)
    while True:
        nxt = _relax(M, d)
        if (nxt == NOMEET).any():
            a, b = map(int, np.argwhere(nxt == NOMEET)[0])
            raise MissingInfimumError(
                f"no infimum for the paths between {g.vertices[a]} and {g.vertices[b]}",
                witness=(g.vertices[a], g.vertices[b]),
            )
        if np.array_equal(nxt, d):
            break
        d = nxt
    changed = np.argwhere(defined & (d != g.dist))
    if len(changed):
        a, b = map(int, changed[0])
        raise TriangleError(
            f"edge {g.vertices[a]}-{g.vertices[b]} is longer than a path through defined edges",
            witness={"vertices": [g.vertices[a], g.vertices[b]], "given": M.label(int(g.dist[a, b])),
                     "path": M.label(int(d[a, b]))},
        )
    return MetricSpace(M, g.vertices, d)


# -- substructures and types -------------------------------------------------


def induced(s: LabelledGraph, subset: Iterable[int]) -> LabelledGraph:
    """Restriction to vertex indices ``subset`` (kept in the given order)."""
    idx = list(subset)
    if len(set(idx)) != len(idx):
        raise InputError("duplicate vertex in subset")
    for i in idx:
        if not 0 <= i < s.n:
            raise InputError(f"unknown vertex index {i}")
    sub = s.dist[np.ix_(idx, idx)]
    return type(s)(s.semigroup, [s.vertices[i] for i in idx], sub)


def same_type_over(s: LabelledGraph, A: Sequence[int], B: Sequence[int], X: Iterable[int]) -> bool:
    """Does ``A[i] -> B[i]``, identity on ``X``, give an isomorphism of the induced structures?"""
    A, B, X = list(A), list(B), set(X)
    if len(A) != len(B):
        raise InputError("A and B must have the same length")
    f: dict[int, int] = {x: x for x in X}
    for a, b in zip(A, B):
        if f.setdefault(a, b) != b:
            return False
    if len(set(f.values())) != len(f):
        return False
    dom = list(f)
    for u, v in itertools.combinations(dom, 2):
        if s.dist[u, v] != s.dist[f[u], f[v]]:
            return False
    return True


def canonical_matrix(s: LabelledGraph) -> tuple[int, ...]:
    """Least row-major distance matrix over all vertex orders; small spaces only."""
    n = s.n
    d = s.dist.tolist()
    return min(
        tuple(d[p[i]][p[j]] for i in range(n) for j in range(n))
        for p in itertools.permutations(range(n))
    )


# -- amalgamation ----------------------------------------------------------------


def amalgamate(s1: MetricSpace, s2: MetricSpace, base: Sequence[str]) -> MetricSpace:
    """Strong shortest-path amalgam of two spaces over shared vertex labels ``base``.

    Vertices of ``s1`` come first, then the non-base vertices of ``s2``.  A
    cross distance is ``inf_{c in base} d1(a,c) + d2(c,b)``, or the maximum
    over an empty base.
    """
    M = s1.semigroup
    if s2.semigroup != M:
        raise InputError("cannot amalgamate spaces over different semigroups")
    base = [str(c) for c in base]
    if len(set(base)) != len(base):
        raise InputError("duplicate base vertex")
    b1, b2 = s1.indices(base), s2.indices(base)
    if not np.array_equal(s1.dist[np.ix_(b1, b1)], s2.dist[np.ix_(b2, b2)]):
        raise InputError("the two spaces disagree on the base")
    base_set = set(base)
    extra = [j for j, v in enumerate(s2.vertices) if v not in base_set]
    clash = {s2.vertices[j] for j in extra} & set(s1.vertices)
    if clash:
        raise InputError(f"non-base vertices share labels: {sorted(clash)}")
    n1, n2 = s1.n, len(extra)
    d = np.empty((n1 + n2, n1 + n2), dtype=np.int64)
    d[:n1, :n1] = s1.dist
    d[n1:, n1:] = s2.dist[np.ix_(extra, extra)]
    if n2:
        if b1:
            # sums[a, c, b] over base c
            sums = M.xop[s1.dist[:, b1][:, :, None], s2.dist[np.ix_(b2, extra)][None, :, :]]
            if M.has_binary_infima:
                cross = sums[:, 0, :]
                for k in range(1, len(b1)):
                    cross = M.meet_table[cross, sums[:, k, :]]
            else:
                cross = np.empty((n1, n2), dtype=np.int64)
                for a in range(n1):
                    for b in range(n2):
                        v = M.ext_infimum(sums[a, :, b].tolist())
                        if v is None:
                            raise AmalgamationError(
                                "no infimum for a cross distance",
                                witness={"reason": "missing infimum",
                                         "pair": [s1.vertices[a], s2.vertices[extra[b]]]},
                            )
                        cross[a, b] = v
        else:
            cross = np.full((n1, n2), M.require_maximum(), dtype=np.int64)
        d[:n1, n1:] = cross
        d[n1:, :n1] = cross.T
    vertices = list(s1.vertices) + [s2.vertices[j] for j in extra]
    g = LabelledGraph(M, vertices, d)
    report = check_triangles(g)
    if not report.ok:
        raise AmalgamationError(
            "shortest-path amalgam violates the triangle inequality",
            witness={"reason": "triangle", **report.to_json(g)[0]},
        )
    return MetricSpace(M, vertices, d)


def relabelled(s: MetricSpace, mapping: dict[str, str]) -> MetricSpace:
    return MetricSpace(s.semigroup, [mapping.get(v, v) for v in s.vertices], s.dist)


def fresh_labels(taken: Iterable[str], prefix: str, count: int) -> list[str]:
    taken = set(taken)
    out = []
    i = 0
    while len(out) < count:
        cand = f"{prefix}{i}"
        if cand not in taken:
            out.append(cand)
        i += 1
    return out
