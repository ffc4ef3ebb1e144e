import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from lks import isogroup as ig
from lks.errors import InvalidRow, LksError
from lks.fnprofile import FunctionProfile, contiguity_graph, detect_symmetry


def tits_matrix(word, p):
    """Faithful integer representation of a right-angled Coxeter group."""
    n = p.n
    B = np.full((n, n), -1, dtype=np.int64)
    for i in range(n):
        B[i, i] = 1
    for pair in p.commuting:
        a, b = tuple(pair)
        B[a, b] = B[b, a] = 0
    M = np.eye(n, dtype=np.int64)
    for g in word:
        R = np.eye(n, dtype=np.int64)
        R[g, :] -= 2 * B[g, :]
        M = M @ R
    return M


@st.composite
def racg_and_words(draw):
    n = draw(st.integers(2, 5))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    edges = [pr for pr in pairs if draw(st.booleans())]
    p = ig.presentation((n, edges))
    w1 = draw(st.lists(st.integers(0, n - 1), max_size=10))
    w2 = draw(st.lists(st.integers(0, n - 1), max_size=10))
    return p, w1, w2


@given(racg_and_words())
@settings(max_examples=300, deadline=None)
def test_normal_form_solves_word_problem(data):
    p, w1, w2 = data
    same = ig.normal_form(w1, p) == ig.normal_form(w2, p)
    assert same == np.array_equal(tits_matrix(w1, p), tits_matrix(w2, p))
    assert same == (ig.normal_form(w1 + w2[::-1], p) == [])


@given(racg_and_words())
@settings(max_examples=200, deadline=None)
def test_normal_form_idempotent_and_reduced(data):
    p, w, _ = data
    nf = ig.normal_form(w, p)
    assert ig.normal_form(nf, p) == nf
    assert len(nf) == len(ig.reduce_word(w, p)) <= len(w)
    # every relation has even length
    assert (len(w) - len(nf)) % 2 == 0


def test_naive_rewrite_is_not_confluent():
    p = ig.presentation((3, [(1, 0), (1, 2)]))
    w = [1, 2, 0, 1]
    assert ig.naive_rewrite(w, p) == w
    assert ig.normal_form(w, p) == [2, 0]


def test_presentation_from_graph():
    g = contiguity_graph(FunctionProfile.from_text("x^3-x", "interval:-inf,inf"))
    p = ig.presentation(g)
    assert p.n == 4 and p.commute(0, 1) and not p.commute(0, 2)
    assert p.relations()[:4] == ["s0^2", "s1^2", "s2^2", "s3^2"]
    assert "(s0 s1)^2" in p.relations()
    with pytest.raises(LksError):
        ig.normal_form([7], p)


def test_group_growth_of_free_product():
    # three non-commuting involutions: 1 + 3 + 6 + 12 elements up to length 3
    p = ig.presentation((3, []))
    assert len(ig.group_elements(p, 3)) == 22


def test_finite_group():
    # all three commute: (Z/2)^3
    p = ig.presentation((3, [(0, 1), (0, 2), (1, 2)]))
    assert len(ig.group_elements(p)) == 8


# -- (k, l), orbifold rows and census ------------------------------------------------------

@pytest.mark.parametrize("f, d, case, k, ell", [
    ("sin(2*x)", "periodic:pi", "3c+u", 1, 1),
    ("x^3-x", "interval:-inf,inf", "0", 3, 1),
    ("x^2-1", "interval:-inf,inf", "1b", 1, 1),
    ("sin(x)+sin(2*x)", "periodic:2*pi", "2+u", 4, 0),
])
def test_kl_invariants(f, d, case, k, ell):
    p = FunctionProfile.from_text(f, d)
    c = ig.kl_invariants(contiguity_graph(p), detect_symmetry(p))
    assert (c.case, c.k, c.ell) == (case, k, ell)


def test_orbifold_rows():
    o = ig.orbifold(ig.make_case("3c+u", 1, 1))
    assert (o.surface, o.n_elliptic, o.p_int, o.p_bd) == ("D", 1, 0, 2)
    o = ig.orbifold(ig.make_case("2+u", 2, 1))
    assert (o.surface, o.p_int) == ("S", 3)
    with pytest.raises(InvalidRow):
        ig.orbifold(ig.make_case("3c", 0, 1))
    with pytest.raises(InvalidRow):
        ig.orbifold(ig.make_case("3c+b", 1, 1))


def test_sin2_census():
    rows = ig.census(ig.make_case("3c+u", 1, 1))
    got = [(r.j, str(r.signature), r.chi, r.per_j) for r in rows]
    assert got == O.SIN2_TORUS["rows"]
    assert rows[0].total == O.SIN2_TORUS["total"]


def test_forced_generic_row():
    rows = ig.census(ig.make_case("0", 2, 2))
    assert [(r.j, str(r.signature), r.per_j) for r in rows] == O.FORCED_0_2_2
    assert all(r.total == 2 for r in rows)


@pytest.mark.parametrize("label", list(O.CENSUS))
def test_census_matches_oracle(label):
    checked = 0
    for k, ell in itertools.product(range(7), range(7)):
        try:
            rows = ig.census(ig.make_case(label, k, ell))
        except InvalidRow:
            continue
        exp, chi, tot = O.expected_rows(label, k, ell)
        got = [(r.j, (r.signature.genus, r.signature.punctures, r.signature.orientable), r.per_j)
               for r in rows]
        assert got == exp
        assert all(r.chi == chi and r.total == tot for r in rows)
        assert sum(r.per_j for r in rows) == tot
        checked += 1
    assert checked > 10


def test_bilateral_split_totals():
    for k, ell in itertools.product(range(1, 7), range(2, 7)):
        for k1, l1 in itertools.product(range(k + 1), range(1, ell)):
            rows = ig.census(ig.make_case("2+b", k, ell), (k1, l1))
            assert sum(r.per_j for r in rows) == O.bilateral_total(ell)


def test_invalid_rows():
    with pytest.raises(InvalidRow):
        ig.census(ig.make_case("0", 0, 2))
    with pytest.raises(InvalidRow):
        ig.census(ig.make_case("2+b", 2, 2))  # split missing
    with pytest.raises(InvalidRow):
        ig.signature(ig.make_case("0", 2, 2), 1)  # parity
    with pytest.raises(InvalidRow):
        ig.make_case("9", 1, 1)
    with pytest.raises(InvalidRow):
        ig.QuotientSignature(1, 2, True, 5)


def test_deformation_dims():
    sig = ig.signature(ig.make_case("3c+u", 1, 1), 0)
    assert ig.deformation_dim(sig, twisted=False) == ig.DeformationDims(2, 2)
    assert ig.deformation_dim(sig, twisted=True) == ig.DeformationDims(2, 1)


# -- characters --------------------------------------------------------------------------

def _random_path(rng, mirror):
    n = rng.randint(2, 8)
    simple = [rng.random() < 0.75 for _ in range(n - 1)]
    if mirror:
        simple = simple[: (n - 1) // 2]
        mid = [False] if (n - 1) % 2 else []  # f is even there, so the zero is degenerate
        simple = simple + mid + simple[::-1]
    return simple


def test_characters_match_closed_forms():
    rng = random.Random(7)
    checked = 0
    while checked < 120:
        mirror = rng.random() < 0.6
        simple = _random_path(rng, mirror)
        og = ig.path_orbit_graph(simple, mirror)
        if not og.edges:
            continue
        if not mirror:
            label = "0"
        else:
            label = "1b" if og.fixed_vertex is not None else "1a"
        if len(set(og.vertex_orbit)) > 6:
            continue
        k = og.n_edge_orbits
        ell = og.n_vertex_orbits - k
        cc = ig.enumerate_characters(og, label)
        assert (cc.index4_kernels, cc.n_characters) == ig.closed_form_counts(label, k, ell), (simple, label)
        checked += 1


def test_mirror_with_simple_centre_rejected():
    with pytest.raises(LksError):
        ig.path_orbit_graph([True, True, True], mirror=True)


def test_character_examples():
    og = ig.path_orbit_graph([True, True])  # three components in a row
    cc = ig.enumerate_characters(og, "0")
    assert (cc.index4_kernels, cc.n_characters) == (2, 1)
    with pytest.raises(InvalidRow):
        ig.enumerate_characters(og, "3a")
