"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

import itertools
import time
from fractions import Fraction

import pytest

from oracles import fold_bound, matches_coordinate_pattern, sauer_assoc_witness, sauer_sum
from sgmetric import (
    NonAssociativeError,
    enumerate_pocs,
    path_semigroup,
    product_capped,
    sauer_semigroup,
)
from sgmetric._seeds import rng_for
from sgmetric.fraisse import build_generic, check_amalgamation, check_forbidden, cherlin_odd_perimeter, fragments
from sgmetric.geodesics import (
    almost_free_elements,
    compute_bound,
    concat_geodesics,
    extend_geodesic,
    fold_law,
    geodesic_with_profile,
    is_geodesic,
)
from sgmetric.independence import (
    SupportBudget,
    check_derived,
    check_metric_like,
    check_sir_axioms,
    corrupted_indep,
    find_unsupported_witness,
    sample_support_sizes,
)

# pinned tolerances
C1_SECONDS = 1.0
C2_SECONDS = 60.0
C6_SECONDS = 300.0
C4_QUERIES, C4_MAX_VERTICES, C4_MAX_SUPPORT = 500, 12, 2
C5_TRIALS = 1000
C7_RUNS = 1000
C10_RUNS = 100

ARCH4 = None


def archimedean_upto_4():
    global ARCH4
    if ARCH4 is None:
        ARCH4 = [M for M in enumerate_pocs(4) if M.is_archimedean()[0]]
    return ARCH4


def report(capsys, number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    assert ok, line


def criterion_1():
    t = time.perf_counter()
    got = {n: compute_bound(path_semigroup(n)) for n in range(2, 7)}
    elapsed = time.perf_counter() - t
    ok = all(got[n] == n for n in got) and elapsed < C1_SECONDS
    return ok, f"bounds {got}, {elapsed:.3f}s < {C1_SECONDS}s"


def criterion_2():
    t = time.perf_counter()
    arch = archimedean_upto_4()
    bad = [M.name for M in arch if not (compute_bound(M) is not None and compute_bound(M) <= M.size)]
    # the profile oracle agrees with the fold closure
    mismatch = [M.name for M in arch if compute_bound(M) != fold_bound(M.op, M.maximum(), M.size)]
    elapsed = time.perf_counter() - t
    ok = not bad and not mismatch and elapsed < C2_SECONDS
    return ok, f"{len(arch)} archimedean semigroups, {len(bad)} over |M|, {len(mismatch)} oracle mismatches, {elapsed:.2f}s"


def criterion_3():
    exceptions = 0
    checked = 0
    for M in archimedean_upto_4():
        if M.size < 2:
            continue
        checked += 1
        top = M.maximum()
        rest = [x for x in range(M.size) if x != top]
        for a, b in itertools.product(rest, repeat=2):
            if not M.lt(a, M.add(a, b)):
                exceptions += 1
        for xs in itertools.product(range(M.size), repeat=M.size):
            if M.fold(xs) != top:
                exceptions += 1
    return exceptions == 0 and checked > 0, f"{checked} semigroups, {exceptions} exceptions"


def criterion_4():
    Q = product_capped(3, 2)
    budget = SupportBudget()
    w = find_unsupported_witness(Q, 1, budget)
    pattern = w is not None and matches_coordinate_pattern(w.space, w.a, list(w.C), w.b)
    sizes = sample_support_sizes(Q, C4_QUERIES, max_vertices=C4_MAX_VERTICES, seed=0)
    small = len(sizes) == C4_QUERIES and max(sizes) <= C4_MAX_SUPPORT
    none_p3 = find_unsupported_witness(path_semigroup(3), 1, budget) is None
    ok = pattern and small and none_p3
    return ok, (f"witness pattern={pattern}, {len(sizes)} queries max support {max(sizes)}, "
                f"path(3) witness absent={none_p3}")


def criterion_5():
    parts = []
    ok = True
    for M in (path_semigroup(3), product_capped(3, 2)):
        frags = list(fragments(M, 16, seed=7, size=10))
        for check in (check_sir_axioms, check_metric_like, check_derived):
            r = check(M, frags, trials=C5_TRIALS, seed=7)
            ok &= r.passed and r.counterexamples() == 0 and all(x.trials >= C5_TRIALS for x in r.results)
            parts.append(f"{M.name}/{r.suite}:{r.counterexamples()}")
    frags = list(fragments(path_semigroup(3), 16, seed=7, size=10))
    bad = check_sir_axioms(path_semigroup(3), frags, trials=200, seed=7, relation=corrupted_indep)
    ok &= bad.counterexamples() >= 1
    parts.append(f"corrupted:{bad.counterexamples()}")
    return ok, " ".join(parts)


def criterion_6():
    t = time.perf_counter()
    results = {}
    for n in (2, 3, 4):
        results[f"path:{n}"] = check_amalgamation(path_semigroup(n), 3).passed
    results["product:3,2"] = check_amalgamation(product_capped(3, 2), 2).passed
    elapsed = time.perf_counter() - t
    return all(results.values()) and elapsed < C6_SECONDS, f"{results}, {elapsed:.2f}s"


def criterion_7():
    semigroups = [path_semigroup(3), path_semigroup(5), product_capped(3, 2)]
    failures = 0
    for run in range(C7_RUNS):
        rng = rng_for(0, "acceptance-geodesics", run)
        M = semigroups[run % len(semigroups)]
        steps = lambda k: [rng.randrange(M.size) for _ in range(k)]  # noqa: E731
        kind = run % 3
        if kind == 0:
            g = geodesic_with_profile(M, steps(rng.randint(1, 5)))
        elif kind == 1:
            g = geodesic_with_profile(M, steps(1))
            for t in steps(rng.randint(1, 4)):
                g = extend_geodesic(g, t)
        else:
            g = concat_geodesics(geodesic_with_profile(M, steps(rng.randint(1, 3))),
                                 geodesic_with_profile(M, steps(rng.randint(1, 3))))
        if not (is_geodesic(g.space, g.seq)[0] and fold_law(g.space, g.seq)[0]):
            failures += 1
    return failures == 0, f"{C7_RUNS} constructions, {failures} failures"


def _almost_free_brute(M):
    top = M.maximum()
    return {m for m in range(M.size) if m != top and all(M.add(m, l) == top for l in range(M.size))}


def criterion_8():
    path_ok = all(
        almost_free_elements(P) == {P.index(str(n - 1))} == _almost_free_brute(P)
        for n in range(2, 7) for P in [path_semigroup(n)]
    )
    arch = [M for M in archimedean_upto_4() if M.size >= 2]
    empty = [M.name for M in arch if not almost_free_elements(M)]
    return path_ok and not empty, f"path n=2..6 ok={path_ok}, {len(arch)} archimedean, {len(empty)} empty"


def criterion_9():
    tables = all(
        (S := sauer_semigroup(range(1, n + 1))).op == path_semigroup(n).op and S.leq == path_semigroup(n).leq
        for n in range(1, 6)
    )
    grid = sorted({Fraction(p, q) for q in (1, 2, 3) for p in range(1, 3 * q + 1)})
    rejected = None
    for S in itertools.combinations(grid, 3):
        if sauer_assoc_witness(S) is None:
            continue
        try:
            sauer_semigroup(S)
        except NonAssociativeError as exc:
            a, b, c = (Fraction(x) for x in exc.witness[1])
            if sauer_sum(S, sauer_sum(S, a, b), c) != sauer_sum(S, a, sauer_sum(S, b, c)):
                rejected = (S, (a, b, c))
                break
    detail = "none" if rejected is None else f"S={[str(x) for x in rejected[0]]} triple={[str(x) for x in rejected[1]]}"
    return tables and rejected is not None, f"tables equal={tables}, rejected {detail}"


def criterion_10():
    F = cherlin_odd_perimeter(2, 3)
    flags = F.forbids(1, 1, 1) and not F.forbids(1, 1, 2)
    M = path_semigroup(3)
    bad = 0
    for seed in range(C10_RUNS):
        s = build_generic(M, 2, 2, 12, seed=seed, family=F)
        bad += len(check_forbidden(s, F))
    return flags and bad == 0, f"(1,1,1) forbidden and (1,1,2) allowed={flags}, {bad} forbidden triangles in {C10_RUNS} runs"


def criterion_11(tmp_path):
    from sgmetric.cli import main

    commands = [
        ["validate", "path:3"],
        ["bound", "product:3,2"],
        ["check", "path:3", "--suite", "sir", "--trials", "200", "--seed", "7"],
        ["check", "product:3,2", "--suite", "derived", "--trials", "200", "--seed", "7"],
        ["support", "product:3,2", "--k", "1", "--seed", "3"],
        ["amalgamation", "path:3", "--base", "2"],
        ["generic", "product:3,2", "--seed", "11"],
        ["enumerate", "--max-size", "3"],
        ["classify", "--max-size", "2", "--seed", "5"],
    ]
    differing = []
    for i, argv in enumerate(commands):
        outs = []
        for rep in range(2):
            path = tmp_path / f"r{i}_{rep}.json"
            main(argv + ["-o", str(path)])
            outs.append(path.read_bytes())
        if outs[0] != outs[1]:
            differing.append(argv[0])
    return not differing, f"{len(commands)} commands rerun, differing: {differing or 'none'}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("number", range(1, 11))
def test_criterion(number, capsys):
    ok, detail = CRITERIA[number - 1]()
    report(capsys, number, ok, detail)


def test_criterion_11(tmp_path, capsys, monkeypatch):
    import io
    import sys

    monkeypatch.setattr(sys, "stdout", io.StringIO())
    ok, detail = criterion_11(tmp_path)
    monkeypatch.undo()
    report(capsys, 11, ok, detail)


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    for i, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        print(f"criterion {i:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    with tempfile.TemporaryDirectory() as d:
        import contextlib
        import io

        with contextlib.redirect_stdout(io.StringIO()):
            ok, detail = criterion_11(Path(d))
        print(f"criterion 11: {'PASS' if ok else 'FAIL'}  {detail}")
