"""Isometry-group combinatorics.

The generic isometry group is the right-angled Coxeter group of the contiguity
graph.  Its small torsion-free subgroups, and the topology of the matching
quotients, depend only on the case label and on two integers: k, the number
of saddles up to symmetry, and l, the Euler characteristic of the contiguity
graph up to symmetry.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from math import comb

from .errors import InvalidRow, LksError
from .fnprofile import ContiguityGraph, SymmetryClass

LABELS = ("0", "1a", "1b", "2+u", "2+b", "2-", "3a", "3b", "3c+u", "3c+b")


# -- Coxeter presentation and words ---------------------------------------------

@dataclass(frozen=True)
class CoxeterPresentation:
    n: int
    commuting: frozenset[frozenset[int]]
    shift: int | None = None  # index translation induced by the period, if any

    @property
    def generators(self) -> list[str]:
        return [f"s{i}" for i in range(self.n)]

    def commute(self, a: int, b: int) -> bool:
        return a != b and frozenset((a, b)) in self.commuting

    def relations(self) -> list[str]:
        rels = [f"s{i}^2" for i in range(self.n)]
        for pair in sorted(tuple(sorted(p)) for p in self.commuting):
            rels.append(f"(s{pair[0]} s{pair[1]})^2")
        return rels


def presentation(graph: ContiguityGraph | tuple[int, Iterable[tuple[int, int]]]) -> CoxeterPresentation:
    """Right-angled Coxeter presentation: one involution per component, and
    commuting pairs exactly along the edges of the contiguity graph."""
    if isinstance(graph, ContiguityGraph):
        n, edges = graph.n, [(e.u, e.v) for e in graph.edges]
        shift = n if graph.cyclic else None
    else:
        n, edges = graph[0], list(graph[1])
        shift = None
    pairs = frozenset(frozenset((u, v)) for u, v in edges if u != v)
    return CoxeterPresentation(n, pairs, shift)


def _check(word: Sequence[int], p: CoxeterPresentation) -> None:
    for g in word:
        if not (isinstance(g, int) and 0 <= g < p.n):
            raise LksError(f"unknown generator {g!r}")


def reduce_word(word: Sequence[int], p: CoxeterPresentation) -> list[int]:
    """A reduced (geodesic) word for the same element.

    A new letter cancels against its last occurrence when everything written
    after that occurrence commutes with it; otherwise it is appended.
    """
    _check(word, p)
    out: list[int] = []
    for g in word:
        for i in range(len(out) - 1, -1, -1):
            h = out[i]
            if h == g:
                del out[i]
                break
            if not p.commute(g, h):
                out.append(g)
                break
        else:
            out.append(g)
    return out


def normal_form(word: Sequence[int], p: CoxeterPresentation) -> list[int]:
    """Shortlex normal form.

    Reduced words of one element differ only by swapping adjacent commuting
    letters, so picking, at each step, the smallest letter that can be moved
    to the front gives a form that depends only on the element.
    """
    rest = reduce_word(word, p)
    out = []
    while rest:
        best = None
        for i, g in enumerate(rest):
            if all(p.commute(g, h) for h in rest[:i]) and (best is None or g < rest[best]):
                best = i
        out.append(rest.pop(best))
    return out


def naive_rewrite(word: Sequence[int], p: CoxeterPresentation, order: Iterable[int] | None = None) -> list[int]:
    """Adjacent-only rewriting: cancel equal neighbours, sort commuting neighbours.

    Kept for comparison; it can stop short of the normal form (for example at
    s2 s3 s1 s2 when s2 commutes with s1 and s3 but s1, s3 do not commute).
    """
    w = list(word)
    _check(w, p)
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            a, b = w[i], w[i + 1]
            if a == b:
                del w[i:i + 2]
                changed = True
                break
            if a > b and p.commute(a, b):
                w[i], w[i + 1] = b, a
                changed = True
                break
    return w


def group_elements(p: CoxeterPresentation, max_len: int | None = None) -> set[tuple[int, ...]]:
    """All normal forms (up to a length bound), by breadth-first search."""
    seen = {()}
    frontier = [()]
    length = 0
    while frontier and (max_len is None or length < max_len):
        nxt = []
        for w in frontier:
            for g in range(p.n):
                nf = tuple(normal_form(list(w) + [g], p))
                if nf not in seen:
                    seen.add(nf)
                    nxt.append(nf)
        frontier = nxt
        length += 1
    return seen


# -- orbit data and (k, l) --------------------------------------------------------

@dataclass(frozen=True)
class OrbitGraph:
    """A contiguity graph together with the action of Is(f) on it."""
    n: int
    edges: tuple[tuple[int, int], ...]
    vertex_orbit: tuple[int, ...]
    edge_orbit: tuple[int, ...]
    reflection: tuple[int, ...] | None = None  # vertex permutation of the symmetry
    fixed_vertex: int | None = None

    @property
    def n_vertex_orbits(self) -> int:
        return len(set(self.vertex_orbit))

    @property
    def n_edge_orbits(self) -> int:
        return len(set(self.edge_orbit))


def _classes(n: int, pairs: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs:
        parent[find(a)] = find(b)
    roots = {}
    return tuple(roots.setdefault(find(i), len(roots)) for i in range(n))


def orbit_graph(graph: ContiguityGraph, sym: SymmetryClass) -> OrbitGraph:
    comps = graph.comps
    gens = sym.generators()
    vpairs = []
    perm = None
    for s, b in gens:
        images = []
        for i, c in enumerate(comps):
            j = comps.locate(s * c.sample_point + b)
            if j is None:
                raise LksError("symmetry does not map components to components")
            images.append(j)
            vpairs.append((i, j))
        if s == -1 and perm is None:
            perm = tuple(images)

    def edge_index(x: float) -> int | None:
        for k, e in enumerate(graph.edges):
            d = x - e.zero.x0
            if comps.cyclic:
                d = (d + comps.period / 2) % comps.period - comps.period / 2
            if abs(d) < 1e-7 * max(1.0, abs(x)):
                return k
        return None

    epairs = []
    for s, b in gens:
        for k, e in enumerate(graph.edges):
            m = edge_index(s * e.zero.x0 + b)
            if m is None:
                raise LksError("symmetry does not map saddles to saddles")
            epairs.append((k, m))

    fixed = None
    if perm is not None and not comps.cyclic:
        fixed = next((i for i in range(len(perm)) if perm[i] == i), None)
    return OrbitGraph(graph.n, tuple((e.u, e.v) for e in graph.edges),
                      _classes(graph.n, vpairs), _classes(len(graph.edges), epairs),
                      perm, fixed)


@dataclass(frozen=True)
class CaseData:
    case: str  # refined label, one of LABELS (or "2"/"3c" when the subtype is undetermined)
    k: int
    ell: int
    has_saddles: bool
    has_elliptic_products: bool

    @property
    def nu_K(self) -> int:
        """Minimal index of a torsion-free subgroup preserving the field."""
        return 4 if self.has_elliptic_products else 2


def make_case(case: str, k: int, ell: int) -> CaseData:
    """CaseData for a forced (case, k, l), e.g. for census tables."""
    if case not in LABELS and case not in ("2", "3c"):
        raise InvalidRow(f"unknown case {case!r}")
    elliptic = k > 0 or case.startswith(("1b", "3b", "3c"))
    return CaseData(case, k, ell, k > 0, elliptic)


def kl_invariants(graph: ContiguityGraph, sym: SymmetryClass) -> CaseData:
    og = orbit_graph(graph, sym)
    k = og.n_edge_orbits
    ell = og.n_vertex_orbits - k
    return make_case(sym.label, k, ell)


# -- orbifold structure -----------------------------------------------------------

@dataclass(frozen=True)
class OrbifoldData:
    surface: str  # S sphere, P projective plane, D disc, T torus, K Klein bottle, M Moebius band, A annulus
    n_elliptic: int
    p_int: int
    p_bd: int


_TABLE1 = {
    "0": ("S", 0, 0), "1a": ("P", 0, 0), "1b": ("D", -1, 1),
    "2+u": ("S", 2, 0), "2+b": ("T", 0, 0), "2-": ("T", 0, 0),
    "3a": ("K", 0, 0), "3b": ("M", -1, 1), "3c+u": ("D", -1, 2), "3c+b": ("A", -2, 2),
}


def orbifold(case: CaseData) -> OrbifoldData:
    """Orbifold type of the quotient by the field-preserving isometries."""
    if case.case not in _TABLE1:
        raise InvalidRow(f"case {case.case!r} has no orbifold row (subtype undetermined)")
    surface, shift, p_bd = _TABLE1[case.case]
    p_int = case.ell + shift
    if p_int < 0 or case.k < 0:
        raise InvalidRow(f"case {case.case} with k={case.k}, l={case.ell} gives p_int={p_int}")
    return OrbifoldData(surface, case.k, p_int, p_bd)


# -- quotient census -------------------------------------------------------------------

def binom(n: int, m: int) -> int:
    return comb(n, m) if 0 <= m <= n else 0


@dataclass(frozen=True)
class QuotientSignature:
    genus: int
    punctures: int
    orientable: bool
    chi: int

    def __post_init__(self):
        expected = 2 - 2 * self.genus - self.punctures if self.orientable else 2 - self.genus - self.punctures
        if self.chi != expected or self.genus < 0 or self.punctures < 0:
            raise InvalidRow(f"inconsistent signature {self}")

    def __str__(self):
        return f"({self.genus};{self.punctures}){'+' if self.orientable else '-'}"


def _chi(label: str, k: int, ell: int) -> int:
    return {
        "0": 4 - k - 2 * ell, "1a": 2 - k - 2 * ell, "1b": 3 - 2 * ell - k,
        "2+u": -k - 2 * ell, "2+b": -k - 2 * ell, "2-": -k - 2 * ell,
        "3a": -k - 2 * ell, "3b": 1 - 2 * ell - k, "3c+u": 2 - 2 * ell - k, "3c+b": 2 - 2 * ell - k,
    }[label]


def _total(label: str, ell: int) -> int:
    return {
        "0": 2 ** (ell - 1), "1a": 2 ** ell, "1b": 2 ** (ell - 1),
        "2+u": 3 * 2 ** (ell - 1) if ell >= 1 else 2, "2+b": 3 * 2 ** (ell - 1),
        "2-": 3 * 2 ** (ell - 1), "3a": 2 ** (ell + 1), "3b": 2 ** ell,
        "3c+u": 2 ** (ell - 1), "3c+b": 2 ** (ell - 1),
    }[label]


def _parity(label: str) -> bool:
    return label in ("0", "1a", "2+u", "2+b", "2-", "3a")


def _min_ell(label: str) -> int:
    if label in ("2+b", "3c+b"):
        return 2
    if label == "2+u":
        return 0
    return 1


def valid_js(case: CaseData) -> list[int]:
    """The j range of the row, with its parity constraint."""
    label, k, ell = case.case, case.k, case.ell
    _check_row(case)
    if label in ("1b", "3b", "3c+u"):
        top = ell - 1
    elif label == "3c+b":
        top = ell - 2
    elif label == "2+u":
        top = ell + 2
    else:
        top = ell
    js = [j for j in range(top + 1) if not _parity(label) or (k + j) % 2 == 0]
    if label == "2+u" and ell == 0:
        js = [j for j in js if j in (0, 2)]
    return js


def _check_row(case: CaseData) -> None:
    label, k, ell = case.case, case.k, case.ell
    if label not in LABELS:
        raise InvalidRow(f"no census row for case {label!r}")
    if not case.has_elliptic_products:
        raise InvalidRow(f"case {label} with k=0 has no elliptic products; the minimal index is 2")
    if k < 0 or ell < _min_ell(label):
        raise InvalidRow(f"case {label} needs l >= {_min_ell(label)}, got l={ell}")
    if label in ("0", "1a", "2+u", "2+b", "2-", "3a") and k == 0:
        raise InvalidRow(f"case {label} needs k > 0")
    if label == "2+u" and ell == 0 and k % 2:
        raise InvalidRow("case 2+u with l=0 needs k even")


def signature(case: CaseData, j: int) -> QuotientSignature:
    label, k, ell = case.case, case.k, case.ell
    if j not in valid_js(case):
        raise InvalidRow(f"j={j} is outside the range of case {label} (k={k}, l={ell})")
    if label == "0":
        g, p, o = (k + j) // 2 - 1, 2 * ell - j, True
    elif label == "1a":
        g, p, o = k + j, 2 * ell - j, False
    elif label == "1b":
        if k + j == 0:
            g, p, o = 0, 2 * ell - 1, True
        else:
            g, p, o = k + j, 2 * ell - j - 1, False
    elif label == "2+u":
        g, p, o = (k + j) // 2 - 1, 2 * ell + 4 - j, True
    elif label in ("2+b", "2-"):
        g, p, o = (k + j) // 2 + 1, 2 * ell - j, True
    elif label == "3a":
        g, p, o = k + j + 2, 2 * ell - j, False
    elif label == "3b":
        g, p, o = k + j + 2, 2 * ell - j - 1, False
    elif label == "3c+u":
        g, p, o = k + j, 2 * ell - j, False
    else:
        g, p, o = k + j + 2, 2 * ell - j - 2, False
    if p == 0:
        raise InvalidRow(f"case {label}, k={k}, l={ell}, j={j} would give a closed quotient")
    return QuotientSignature(g, p, o, _chi(label, k, ell))


@dataclass(frozen=True)
class SubgroupCount:
    per_j: int
    total: int
    chi: int


def count_subgroups(case: CaseData, j: int, split: tuple[int, int] | None = None) -> SubgroupCount:
    """Number of index-2 torsion-free subgroups of the field-preserving group
    with j branched cusps, up to conjugacy, and the row total."""
    label, k, ell = case.case, case.k, case.ell
    signature(case, j)
    if label == "0":
        n = binom(ell, j)
    elif label == "1a":
        n = 2 * binom(ell, j)
    elif label in ("1b", "3c+u"):
        n = binom(ell - 1, j)
    elif label == "2+u":
        n = sum(binom(ell, j - i) for i in range(3))
    elif label == "2+b":
        if split is None:
            raise InvalidRow("case 2+b needs the split (k1, l1)")
        k1, l1 = split
        if not (0 <= k1 <= k and 1 <= l1 <= ell - 1):
            raise InvalidRow(f"split (k1={k1}, l1={l1}) incompatible with k={k}, l={ell}")
        n = 2 * binom(ell, j) + 2 * sum(binom(l1, j1) * binom(ell - l1, j - j1)
                                        for j1 in range(l1 + 1) if (k1 + j1) % 2 == 0)
    elif label == "2-":
        n = 3 * binom(ell, j)
    elif label == "3a":
        n = 4 * binom(ell, j)
    elif label == "3b":
        n = 2 * binom(ell - 1, j)
    else:
        n = 2 * binom(ell - 2, j)
    return SubgroupCount(n, _total(label, ell), _chi(label, k, ell))


@dataclass(frozen=True)
class CensusRow:
    case: str
    k: int
    ell: int
    j: int
    per_j: int
    signature: QuotientSignature
    chi: int
    total: int


def census(case: CaseData, split: tuple[int, int] | None = None) -> list[CensusRow]:
    rows = []
    for j in valid_js(case):
        c = count_subgroups(case, j, split)
        rows.append(CensusRow(case.case, case.k, case.ell, j, c.per_j, signature(case, j), c.chi, c.total))
    return rows


# -- deformations ----------------------------------------------------------------------

@dataclass(frozen=True)
class DeformationDims:
    dim_der: int
    dim_h1: int


def deformation_dim(sig: QuotientSignature, twisted: bool) -> DeformationDims:
    """Dimensions of the derivation space and of H^1 with coefficients twisted
    by the character through which the group acts on the field."""
    g, p = sig.genus, sig.punctures
    if p >= 1:
        r = 2 * g + p - 1 if sig.orientable else g + p - 1
        return DeformationDims(r, r - 1 if twisted else r)
    if sig.orientable and g == 1:
        if twisted:
            raise LksError("a torus group acting on the field by a non-trivial character is not supported")
        return DeformationDims(2, 2)
    if not sig.orientable and g == 2:
        return DeformationDims(2, 1) if twisted else DeformationDims(1, 1)
    raise LksError(f"unsupported group type {sig}")


# -- characters --------------------------------------------------------------------------

# mu_2^2 minus the identity, written as the three non-zero vectors of F_2^2.
_DELTA = ((1, 0), (0, 1), (1, 1))


@dataclass(frozen=True)
class CharacterCensus:
    index4_kernels: int  # torsion-free normal subgroups of index 4
    characters: tuple[tuple[int, ...], ...]  # sign per vertex orbit (+ extra generator)

    @property
    def n_characters(self) -> int:
        return len(self.characters)


def enumerate_characters(og: OrbitGraph, label: str) -> CharacterCensus:
    """Brute-force count of the morphisms omega onto mu_2^2 with torsion-free
    kernel, and of the characters rho of the field-preserving subgroup.

    omega is constant on Is(f)-orbits of generators; case 1a adds the free
    generator s, case 1b the reflection sigma through the fixed component.
    Morphisms are normalised by their values on a base pair so that each
    kernel is counted once.
    """
    if label not in ("0", "1a", "1b"):
        raise InvalidRow(f"character enumeration is implemented for cases 0, 1a, 1b, not {label}")
    orbits = sorted(set(og.vertex_orbit))
    n_orb = len(orbits)
    extra = label in ("1a", "1b")
    if label == "1b":
        if og.fixed_vertex is None:
            raise InvalidRow("case 1b needs a fixed vertex")
        base = (og.vertex_orbit[og.fixed_vertex], n_orb)  # (alpha_0, sigma)
    else:
        if not og.edges:
            raise InvalidRow(f"case {label} without saddles has minimal index 2")
        u, v = og.edges[0]
        base = (og.vertex_orbit[u], og.vertex_orbit[v])

    kernels = 0
    chars = []
    size = n_orb + (1 if extra else 0)
    for values in itertools.product(range(3), repeat=size):
        if values[base[0]] != 0 or values[base[1]] != 1:
            continue
        if any(values[og.vertex_orbit[u]] == values[og.vertex_orbit[v]] for u, v in og.edges):
            continue
        if label == "1b" and values[n_orb] == values[og.vertex_orbit[og.fixed_vertex]]:
            continue
        kernels += 1
        # Kernel inside the field-preserving subgroup: every generator avoids
        # the third value, i.e. omega takes values in {omega(a0), omega(b0)}.
        if all(x != 2 for x in values):
            chars.append(tuple(1 if x == 0 else -1 for x in values))
    return CharacterCensus(kernels, tuple(chars))


def closed_form_counts(label: str, k: int, ell: int) -> tuple[int, int]:
    """(index-4 kernels, characters) predicted for cases 0, 1a, 1b."""
    if label == "0":
        return 2 ** (k - 1) * 3 ** (ell - 1), 2 ** (ell - 1)
    if label == "1a":
        return 2 ** (k - 1) * 3 ** ell, 2 ** ell
    if label == "1b":
        return 2 ** k * 3 ** (ell - 1), 2 ** (ell - 1)
    raise InvalidRow(f"no closed form for case {label}")


def path_orbit_graph(simple: Sequence[bool], mirror: bool = False) -> OrbitGraph:
    """Orbit graph of a line of components separated by zeros.

    ``simple[i]`` tells whether the zero between components i and i+1 is
    simple.  With ``mirror`` the line is symmetric about its centre, which is
    a zero when the number of components is even and a component otherwise.
    """
    n = len(simple) + 1
    edges = tuple((i, i + 1) for i, s in enumerate(simple) if s)
    if not mirror:
        return OrbitGraph(n, edges, tuple(range(n)), tuple(range(len(edges))))
    if list(simple) != list(reversed(simple)):
        raise LksError("mirror line needs a palindromic zero pattern")
    if n % 2 == 0 and simple[n // 2 - 1]:
        raise LksError("an even profile cannot have a simple zero at its centre")
    perm = tuple(n - 1 - i for i in range(n))
    vo = _classes(n, [(i, perm[i]) for i in range(n)])
    eo = _classes(len(edges), [(a, edges.index(tuple(sorted((perm[u], perm[v])))))
                               for a, (u, v) in enumerate(edges)])
    fixed = (n - 1) // 2 if n % 2 else None
    return OrbitGraph(n, edges, vo, eo, perm, fixed)
