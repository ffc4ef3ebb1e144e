"""Acceptance suite: one PASS/FAIL line per criterion, with timings.

Run with ``pytest tests/test_acceptance.py`` (lines are printed even under
output capture) or directly with ``python3 tests/test_acceptance.py``.
"""

import itertools
import math
import random
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles as O  # noqa: E402
from test_classify import random_move, random_torus  # noqa: E402
from test_isogroup import _random_path  # noqa: E402

from lks import classify as cl  # noqa: E402
from lks import components as cp  # noqa: E402
from lks import extension as ext  # noqa: E402
from lks import geodesics as geo  # noqa: E402
from lks import isogroup as ig  # noqa: E402
from lks.errors import InvalidRow  # noqa: E402
from lks.fnprofile import SIMPLE, FunctionProfile, contiguity_graph, detect_symmetry, find_zeros  # noqa: E402

_capsys = None


def _say(line):
    if _capsys is not None:
        with _capsys.disabled():
            print(line)
    else:
        print(line)


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    global _capsys
    _capsys = capsys
    yield
    _capsys = None


@contextmanager
def criterion(n, title, limit=None):
    """Time the block, print one verdict line, then fail the test if needed."""
    info = {}
    t0 = time.perf_counter()
    err = None
    try:
        yield info
    except AssertionError as e:
        err = e
    dt = time.perf_counter() - t0
    slow = limit is not None and dt >= limit
    ok = err is None and not slow
    detail = info.get("detail", "")
    if err is not None:
        detail = f"{detail} {err}".strip()
    if slow:
        detail = f"{detail} exceeded {limit:g}s".strip()
    budget = f" < {limit:g}s" if limit is not None else ""
    _say(f"{'PASS' if ok else 'FAIL'} [{n:2d}] {title} ({dt:.2f}s{budget}){': ' + detail if detail else ''}")
    if not ok:
        pytest.fail(detail or title)


def test_01_census_table():
    with criterion(1, "quotient census matches the table for k, l <= 6", 1.0) as info:
        rows_checked = 0
        for label in ig.LABELS:
            for k, ell in itertools.product(range(7), range(7)):
                try:
                    case = ig.make_case(label, k, ell)
                    if label == "2+b":
                        for k1, l1 in itertools.product(range(k + 1), range(1, ell)):
                            rows = ig.census(case, (k1, l1))
                            assert sum(r.per_j for r in rows) == O.bilateral_total(ell)
                            assert all(r.total == O.bilateral_total(ell) for r in rows)
                            rows_checked += len(rows)
                        continue
                    rows = ig.census(case)
                except InvalidRow:
                    continue
                exp, chi, tot = O.expected_rows(label, k, ell)
                got = [(r.j, (r.signature.genus, r.signature.punctures, r.signature.orientable), r.per_j)
                       for r in rows]
                assert got == exp, (label, k, ell)
                assert all(r.chi == chi and r.total == tot for r in rows), (label, k, ell)
                assert sum(r.per_j for r in rows) == tot
                rows_checked += len(rows)
        info["detail"] = f"{rows_checked} rows"


def test_02_character_enumeration():
    with criterion(2, "brute-force characters equal closed forms", 10.0) as info:
        rng = random.Random(2024)
        seen = {"0": 0, "1a": 0, "1b": 0}
        checked = 0
        while checked < 60:
            mirror = rng.random() < 0.6
            simple = _random_path(rng, mirror)
            og = ig.path_orbit_graph(simple, mirror)
            if not og.edges or len(simple) + 1 > 8:
                continue
            label = "0" if not mirror else ("1b" if og.fixed_vertex is not None else "1a")
            k = og.n_edge_orbits
            ell = og.n_vertex_orbits - k
            cc = ig.enumerate_characters(og, label)
            assert (cc.index4_kernels, cc.n_characters) == ig.closed_form_counts(label, k, ell), simple
            seen[label] += 1
            checked += 1
        assert min(seen.values()) > 0
        info["detail"] = f"{checked} graphs " + ", ".join(f"{k}:{v}" for k, v in seen.items())


def test_03_sin2_pipeline():
    with criterion(3, "sin(2x) gives 3c+u, k=1, l=1, one (1;2)- quotient, no conjugate points", 1.0):
        p = FunctionProfile.from_text("sin(2*x)", "periodic:pi")
        case = ig.kl_invariants(contiguity_graph(p), detect_symmetry(p))
        assert (case.case, case.k, case.ell) == (O.SIN2_TORUS["case"], 1, 1)
        rows = ig.census(case)
        assert [(r.j, str(r.signature), r.chi, r.per_j) for r in rows] == O.SIN2_TORUS["rows"]
        assert rows[0].total == O.SIN2_TORUS["total"]
        inv = cl.build_torus(p, 1.0, 0.0, "all")
        marks = [m * math.pi for m in inv.marks]
        res = geo.cp_conditions(p, marks)
        assert res.holds, res.failures


def _random_deletion(seq, rng, cyclic):
    s = list(seq)
    while True:
        n = len(s)
        pairs = [i for i in range(n - 1) if s[i] == s[i + 1]]
        if cyclic and n >= 2 and s[-1] == s[0]:
            pairs.append(n - 1)
        if not pairs:
            return s
        i = rng.choice(pairs)
        s = s[1:-1] if i == n - 1 else s[:i] + s[i + 2:]


def test_04_sign_sequences():
    with criterion(4, "sign-sequence identities on 1000 random cases each"):
        rng = random.Random(4)

        def draw(even=False):
            n = rng.randint(0, 30)
            if even:
                n -= n % 2
            return [rng.choice((1, -1)) for _ in range(n)]

        for _ in range(1000):
            s = draw(even=True)
            L = len(cp.reduce(cp.SignSeq(tuple(s), cyclic=True)))
            assert Fraction(L, 2) == Fraction(abs(cp.SignSeq(tuple(s)).alternating_sum()), 2)
        for _ in range(1000):
            s = cp.SignSeq(tuple(draw()))
            assert abs(cp.enrollment(s)) == Fraction(len(cp.reduce(s)), 4)
        for _ in range(1000):
            s = draw()
            cyclic = rng.random() < 0.5
            ref = cp.reduce(cp.SignSeq(tuple(s), cyclic))
            assert len(_random_deletion(s, rng, cyclic)) == len(ref)
        fig = cp.SignSeq.from_text(O.SAMPLE_SEQUENCE)
        assert len(cp.reduce(fig)) == 4 and abs(cp.enrollment(fig)) == 1


def test_05_bottle_nabs():
    with criterion(5, "type-2 bottle n_abs anchors and parity on 1000 inputs") as info:
        anchors = [((-1, -1), 0), ((1, -1), 1), ((-1, 1, -1), 2)]
        for seq, n in anchors:
            assert cp.bottle2_from_signs(seq).n_abs == n, seq
        rng = random.Random(5)
        for _ in range(1000):
            seq = [rng.choice((1, -1)) for _ in range(rng.randint(2, 30))]
            s1, sk = (0 if seq[0] > 0 else 1), (0 if seq[-1] > 0 else 1)
            assert cp.bottle2_from_signs(seq).n_abs % 2 == (s1 + sk) % 2
        info["detail"] = "anchors 0, 1, 2"


def test_06_geodesic_conservation():
    with criterion(6, "first integrals conserved on 100 random geodesics per profile", 30.0) as info:
        rng = np.random.default_rng(6)
        notes = []
        for f, d in (("sin(2*x)", "periodic:pi"), ("x^3-x", "interval:-inf,inf")):
            p = FunctionProfile.from_text(f, d)
            kept = rejected = 0
            worst = [0.0, 0.0, 0.0]
            while kept < 100:
                s0 = np.array([rng.uniform(-1.5, 1.5), 0.0, *(0.3 * rng.normal(size=2))])
                tr = geo.integrate(s0, p, 10.0, blow_up=1e6, max_steps=20000)
                st = tr.states
                if tr.status != geo.COMPLETED or np.max(np.abs(st[:, [0, 2, 3]])) > 10:
                    rejected += 1
                    continue
                kept += 1
                C, E = tr.C[0], tr.E[0]
                res = np.max(np.abs(st[:, 2] ** 2 - (C * C - E * p.f(st[:, 0]))))
                worst = [max(worst[0], tr.drift_C), max(worst[1], tr.drift_E), max(worst[2], res)]
            assert worst[0] <= 1e-9 and worst[1] <= 1e-9 and worst[2] <= 1e-8, (f, worst)
            notes.append(f"{f}: dC {worst[0]:.1e} dE {worst[1]:.1e} res {worst[2]:.1e}, {rejected} rejected")
        info["detail"] = "; ".join(notes)


def test_07_conjugate_points():
    with criterion(7, "conjugate search Found for sin(2x)+1.2, NotFound for f=1", 5.0) as info:
        r = geo.conjugate_search(FunctionProfile.from_text("sin(2*x)+1.2", "periodic:pi"), 1, 1.0)
        assert r.status == geo.FOUND and r.relative_gap <= 1e-5
        flat = geo.conjugate_search(FunctionProfile.from_text("1", "periodic:1"), 1, 1.0)
        assert flat.status == geo.NOT_FOUND
        info["detail"] = f"relative gap {r.relative_gap:.1e}"


PROFILES = [("sin(2*x)", "periodic:pi"), ("x^3-x", "interval:-inf,inf"), ("x^2-1", "interval:-inf,inf"),
            ("sin(x)+sin(2*x)", "periodic:2*pi"), ("cos(pi*x)+0.5", "periodic:2"),
            ("x*(x-2)*(x+3)", "interval:-inf,inf")]


def test_08_semi_completeness():
    with criterion(8, "light leaves blow up exactly on the lambda-positive side", 10.0) as info:
        n = 0
        for f, d in PROFILES:
            p = FunctionProfile.from_text(f, d)
            for z in find_zeros(p):
                if z.kind != SIMPLE:
                    continue
                complete_side = ext.light_leaf_complete(p, z).complete_side
                for q0 in (1.0, -1.0):
                    tr = geo.integrate([z.x0, 0.0, 0.0, q0], p, 1000.0, n_samples=11)
                    side = "y>0" if q0 > 0 else "y<0"
                    assert (tr.status == geo.BLEW_UP) == (z.lam * q0 > 0), (f, z.x0, q0)
                    assert (tr.status == geo.COMPLETED) == (side == complete_side), (f, z.x0, q0)
                n += 1
        info["detail"] = f"{n} zeros"


def test_09_canonical_tori():
    with criterion(9, "canonical torus idempotent and move invariant on 100 tori", 10.0):
        rng = np.random.default_rng(9)
        for _ in range(100):
            inv = random_torus(rng)
            c = cl.canonical_torus(inv)
            assert cl.close_tori(cl.canonical_torus(c), c)
            moved = inv
            for _ in range(10):
                moved = random_move(moved, rng)
                assert moved.t0 == inv.t0
            assert cl.close_tori(cl.canonical_torus(moved), c)
            assert c.t0 == inv.t0
        for f in ("cos(pi*x)", "cos(pi*x) + 0.3*cos(2*pi*x)", "cos(pi*x)+0.5"):
            b = cl.build_bottle2(FunctionProfile.from_text(f, "periodic:2"), 1.3, [])
            assert cl.close_bottles2(cl.swap_bottle2(cl.swap_bottle2(b)), b)


def test_10_holonomy():
    with criterion(10, "quasi-saddle holonomy rescaling and cylinder completability") as info:
        rng = np.random.default_rng(10)
        worst = 0.0
        for _ in range(400):
            vals = rng.uniform(0.1, 10, 8) * rng.choice((-1, 1), 8)
            c = np.exp(rng.uniform(-4, 4, 4))
            scaled = vals * np.concatenate([c, c])
            a = ext.quasi_saddle_holonomy(*map(float, vals)).eta
            b = ext.quasi_saddle_holonomy(*map(float, scaled)).eta
            worst = max(worst, abs(a - b) / abs(a))
        assert worst <= 1e-12, worst
        for i in range(100):
            xp = float(rng.uniform(0.1, 10) * rng.choice((-1, 1)))
            xm = abs(xp) * float(rng.choice((-1, 1))) if i % 2 else float(rng.uniform(0.1, 10))
            h = ext.cylinder_holonomy(xp, xm)
            assert ext.quasi_saddle_completable(xp, xm) == (abs(h - 1) <= 1e-12), (xp, xm)
        info["detail"] = f"max relative error {worst:.1e}"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
