"""Geodesic sequences, the boundedness constant and almost-free distances."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AmalgamationError, InputError, TriangleError
from .independence import indep
from .semigroup import ZERO, PosetSemigroup
from .space import MetricSpace, amalgamate, fresh_labels, relabelled

DEFAULT_MAX_LEN = 64


def is_geodesic(s: MetricSpace, seq: Sequence[int]) -> tuple[bool, tuple[int, int, int] | None]:
    """Check ``a_i`` independent from ``a_k`` over ``a_j`` for all ``i < j < k``.

    Returns ``(True, None)`` or ``(False, (i, j, k))`` with the first failing
    positions.
    """
    seq = list(seq)
    if len(set(seq)) != len(seq):
        raise InputError("geodesic sequences have pairwise distinct vertices")
    for v in seq:
        if not 0 <= v < s.n:
            raise InputError(f"unknown vertex index {v}")
    for i, j, k in itertools.combinations(range(len(seq)), 3):
        if not indep(s, [seq[i]], [seq[j]], [seq[k]]):
            return False, (i, j, k)
    return True, None


def fold_law(s: MetricSpace, seq: Sequence[int]) -> tuple[bool, tuple[int, int] | None]:
    """``d(a_i, a_k)`` equals the sum of the steps between them, for every ``i < k``."""
    M = s.semigroup
    seq = list(seq)
    for i in range(len(seq)):
        acc = ZERO
        for k in range(i + 1, len(seq)):
            acc = M.add(acc, int(s.dist[seq[k - 1], seq[k]]))
            if s.dist[seq[i], seq[k]] != acc:
                return False, (i, k)
    return True, None


@dataclass(frozen=True, eq=False)
class GeodesicSequence:
    space: MetricSpace
    seq: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "seq", tuple(int(v) for v in self.seq))
        ok, bad = is_geodesic(self.space, self.seq)
        if not ok:
            raise InputError(f"not geodesic: positions {bad}")

    @property
    def labels(self) -> list[str]:
        return [self.space.vertices[v] for v in self.seq]

    @property
    def steps(self) -> list[int]:
        d = self.space.dist
        return [int(d[u, v]) for u, v in zip(self.seq, self.seq[1:])]

    def endpoint_distance(self) -> int:
        return int(self.space.dist[self.seq[0], self.seq[-1]])

    def reversed(self) -> "GeodesicSequence":
        return GeodesicSequence(self.space, self.seq[::-1])

    def to_json(self) -> dict:
        return {"space": self.space.to_json(), "seq": self.labels}

    @classmethod
    def from_json(cls, data: dict, **kw) -> "GeodesicSequence":
        space = MetricSpace.from_json(data["space"], **kw)
        return cls(space, space.indices(data["seq"]))


def extend_geodesic(g: GeodesicSequence, t: int) -> GeodesicSequence:
    """Append a fresh vertex at distance ``t`` from the last one, independent over it."""
    s = g.space
    M = s.semigroup
    if not 0 <= t < M.size:
        raise InputError(f"{t} is not a carrier element")
    last = s.vertices[g.seq[-1]]
    (label,) = fresh_labels(s.vertices, "g", 1)
    step = MetricSpace(M, [last, label], [[ZERO, t], [t, ZERO]])
    out = amalgamate(s, step, [last])
    return GeodesicSequence(out, g.seq + (out.n - 1,))


def geodesic_with_profile(M: PosetSemigroup, profile: Sequence[int]) -> GeodesicSequence:
    """The space on ``len(profile) + 1`` points whose distances are sums of consecutive steps."""
    profile = [int(p) for p in profile]
    if not profile:
        raise InputError("step profiles are nonempty")
    for p in profile:
        if not 0 <= p < M.size:
            raise InputError(f"{p} is not a carrier element")
    n = len(profile) + 1
    d = np.full((n, n), ZERO, dtype=np.int64)
    for i in range(n):
        acc = ZERO
        for k in range(i + 1, n):
            acc = M.add(acc, profile[k - 1])
            d[i, k] = d[k, i] = acc
    try:
        space = MetricSpace(M, [f"g{i}" for i in range(n)], d)
    except TriangleError as exc:
        raise AmalgamationError("profile is not realisable", witness=exc.witness) from exc
    return GeodesicSequence(space, tuple(range(n)))


def concat_geodesics(g1: GeodesicSequence, g2: GeodesicSequence, pivot: str | None = None) -> GeodesicSequence:
    """Glue ``g2`` after ``g1`` by amalgamating over the shared end point.

    The first vertex of ``g2`` is identified with the last vertex of ``g1``
    (``pivot``); every other vertex of ``g2``'s space gets a fresh label.
    """
    s1, s2 = g1.space, g2.space
    if s1.semigroup != s2.semigroup:
        raise InputError("geodesics over different semigroups")
    end = s1.vertices[g1.seq[-1]]
    if pivot is not None and pivot != end:
        raise InputError(f"pivot {pivot!r} is not the last vertex of the first geodesic")
    start = s2.vertices[g2.seq[0]]
    others = [v for v in s2.vertices if v != start]
    fresh = fresh_labels(set(s1.vertices) | set(s2.vertices), "g", len(others))
    mapping = dict(zip(others, fresh))
    mapping[start] = end
    s2r = relabelled(s2, mapping)
    out = amalgamate(s1, s2r, [end])
    seq = list(g1.seq) + [out.index(mapping[s2.vertices[v]]) for v in g2.seq[1:]]
    return GeodesicSequence(out, tuple(seq))


def fold_values(M: PosetSemigroup, length: int) -> set[int]:
    """Values of all sums of exactly ``length`` carrier elements."""
    if length < 1:
        raise InputError("length must be >= 1")
    reach = set(range(M.size))
    for _ in range(length - 1):
        reach = {M.op[r][x] for r in reach for x in range(M.size)}
    return reach


def compute_bound(M: PosetSemigroup, max_len: int = DEFAULT_MAX_LEN) -> int | None:
    """Least ``k`` such that every sum of ``k`` elements is the maximum, or ``None`` past ``max_len``.

    This is the least length forcing the endpoints of every geodesic to
    be at maximal distance, i.e. independent over the empty set.
    """
    top = M.require_maximum()
    reach = set(range(M.size))
    for k in range(1, max_len + 1):
        if reach == {top}:
            return k
        reach = {M.op[r][x] for r in reach for x in range(M.size)}
    return None


def almost_free_elements(M: PosetSemigroup) -> set[int]:
    """Non-maximal ``m`` with ``m + l`` maximal for every ``l``.

    A point at distance ``m`` from ``a`` that is almost free from ``a`` is
    exactly one at such a distance, given that every distance is realised.
    """
    top = M.require_maximum()
    return {
        m
        for m in range(M.size)
        if m != top and all(M.op[m][x] == top for x in range(M.size))
    }
