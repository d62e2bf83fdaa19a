"""Independent brute-force oracles.

Nothing here calls the library's own checking logic; each function works
from the raw definitions on plain Python lists.
"""

import itertools
from fractions import Fraction


def naive_failures(op, leq):
    """Names of the axiom families that fail on raw tables."""
    m = len(op)
    R = range(m)
    bad = set()
    for a in R:
        for b in R:
            if op[a][b] != op[b][a]:
                bad.add("commutativity")
            if not leq[a][op[a][b]]:
                bad.add("absorption")
            if a != b and leq[a][b] and leq[b][a]:
                bad.add("antisymmetry")
            for c in R:
                if op[op[a][b]][c] != op[a][op[b][c]]:
                    bad.add("associativity")
                if leq[a][b] and leq[b][c] and not leq[a][c]:
                    bad.add("transitivity")
                if leq[b][c] and not leq[op[a][b]][op[a][c]]:
                    bad.add("monotonicity")
        if not leq[a][a]:
            bad.add("reflexivity")
    return bad


def _permute(op, leq, perm):
    m = len(op)
    new_op = [[0] * m for _ in range(m)]
    new_leq = [[False] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            new_op[perm[i]][perm[j]] = perm[op[i][j]]
            new_leq[perm[i]][perm[j]] = leq[i][j]
    return tuple(map(tuple, new_op)), tuple(map(tuple, new_leq))


def partial_orders(m):
    """All labelled partial orders on ``range(m)`` as boolean matrices."""
    pairs = [(i, j) for i in range(m) for j in range(m) if i != j]
    out = []
    for bits in itertools.product([False, True], repeat=len(pairs)):
        leq = [[i == j for j in range(m)] for i in range(m)]
        for (i, j), bit in zip(pairs, bits):
            leq[i][j] = bit
        ok = all(
            not (leq[a][b] and leq[b][a] and a != b)
            and not (leq[a][b] and leq[b][c] and not leq[a][c])
            for a in range(m) for b in range(m) for c in range(m)
        )
        if ok:
            out.append(leq)
    return out


def count_iso_classes(m):
    """Isomorphism classes of m-element POCS as a sum of 1/orbit size.

    Walks every labelled (commutative op, partial order) pair, keeps the
    ones satisfying all axioms, and weights each by the reciprocal of its
    orbit under relabelling.  Cell values are drawn from common upper
    bounds only, which absorption forces anyway.
    """
    perms = list(itertools.permutations(range(m)))
    cells = [(i, j) for i in range(m) for j in range(i, m)]
    total = Fraction(0)
    for leq in partial_orders(m):
        choices = [[x for x in range(m) if leq[i][x] and leq[j][x]] for i, j in cells]
        for values in itertools.product(*choices):
            op = [[0] * m for _ in range(m)]
            for (i, j), v in zip(cells, values):
                op[i][j] = op[j][i] = v
            if naive_failures(op, leq):
                continue
            orbit = {_permute(op, leq, p) for p in perms}
            total += Fraction(1, len(orbit))
    assert total.denominator == 1
    return int(total)


def fold_bound(op, top, max_len):
    """Least k with every left-fold of k elements equal to ``top``, by listing all profiles."""
    m = len(op)
    for k in range(1, max_len + 1):
        ok = True
        for profile in itertools.product(range(m), repeat=k):
            acc = profile[0]
            for x in profile[1:]:
                acc = op[acc][x]
            if acc != top:
                ok = False
                break
        if ok:
            return k
    return None


def sauer_sum(S, a, b):
    return max(x for x in S if x <= a + b)


def sauer_assoc_witness(S):
    """First triple of values with (a+b)+c != a+(b+c) under the Sauer operation."""
    for a, b, c in itertools.product(S, repeat=3):
        if sauer_sum(S, sauer_sum(S, a, b), c) != sauer_sum(S, a, sauer_sum(S, b, c)):
            return a, b, c
    return None


def matches_coordinate_pattern(space, a, C, b, n=3):
    """Up to isomorphism, does (space, a, C, b) follow the k-coordinate pattern?

    d(a, c) is all ones, d(b, c_i) is 1 on one coordinate and 2 elsewhere
    with each coordinate used exactly once, and d(a, b) is all twos.
    """
    M = space.semigroup
    k = len(C)

    def vec(x, y):
        return tuple(int(t) for t in M.label(int(space.dist[x, y])).strip("()").split(","))

    if space.n != k + 2 or vec(a, b) != (2,) * k:
        return False
    if any(vec(a, c) != (1,) * k for c in C):
        return False
    used = []
    for c in C:
        v = vec(b, c)
        if sorted(v) != [1] + [2] * (k - 1):
            return False
        used.append(v.index(1))
    return sorted(used) == list(range(k))
