"""Profile functions f and their zero/sign/symmetry structure.

A profile is an expression in ``x`` on an open interval or on a circle R/TZ.
Everything downstream (squares, Coxeter data, quotient census) is derived from
the ordered list of signed components of {f != 0} computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from scipy.optimize import brentq

from . import expr as ex
from .errors import ConfigError, EvaluationError, LksError, ProfileError, ZeroPlateau

# Sampling window used in place of an infinite interval end.
INFINITE_WINDOW = 50.0
# Fraction of a grid step by which periodic grids are offset, so that zeros
# sitting at "nice" points such as 0 are bracketed rather than hit exactly.
_GRID_SHIFT = 0.6180339887498949

SIMPLE = "Simple"
DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ProfileError(f"empty interval ({self.a}, {self.b})")

    def __str__(self):
        return f"interval:{_num_text(self.a)},{_num_text(self.b)}"


@dataclass(frozen=True)
class Periodic:
    T: float

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ProfileError(f"period must be positive, got {self.T}")

    def __str__(self):
        return f"periodic:{_num_text(self.T)}"


Domain = Union[Interval, Periodic]


def _num_text(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return ex.to_text(ex.Const(v))


@dataclass(frozen=True)
class FunctionProfile:
    expr: ex.Expr
    domain: Domain
    tol: float = 1e-9
    grid_n: int = 4096

    def __post_init__(self):
        if self.tol <= 0 or self.grid_n < 16:
            raise ProfileError("tol must be positive and grid_n at least 16")
        if isinstance(self.domain, Periodic):
            xs = self.grid()
            gap = np.abs(self.f(xs + self.domain.T) - self.f(xs))
            if not np.all(np.isfinite(gap)) or gap.max() > self.tol * self.scale:
                raise ProfileError(f"{self.text} is not {self.domain.T}-periodic")

    @cached_property
    def d1(self) -> ex.Expr:
        return ex.differentiate(self.expr)

    @cached_property
    def d2(self) -> ex.Expr:
        return ex.differentiate(self.d1)

    @classmethod
    def _unchecked(cls, expr, domain, tol, grid_n) -> "FunctionProfile":
        # for maps known to preserve validity, e.g. x -> +-x + b
        out = object.__new__(cls)
        for k, v in (("expr", expr), ("domain", domain), ("tol", tol), ("grid_n", grid_n)):
            object.__setattr__(out, k, v)
        return out

    @classmethod
    def from_text(cls, function: str, domain: str | Domain, tol: float = 1e-9,
                  grid_n: int = 4096) -> "FunctionProfile":
        dom = parse_domain(domain) if isinstance(domain, str) else domain
        return cls(ex.parse(function), dom, tol, grid_n)

    @property
    def text(self) -> str:
        return ex.to_text(self.expr)

    @property
    def periodic(self) -> bool:
        return isinstance(self.domain, Periodic)

    def f(self, x):
        return ex.evaluate(self.expr, x)

    def df(self, x):
        return ex.evaluate(self.d1, x)

    def d2f(self, x):
        return ex.evaluate(self.d2, x)

    @cached_property
    def f_scalar(self):
        return ex.compile_scalar(self.expr)

    @cached_property
    def df_scalar(self):
        return ex.compile_scalar(self.d1)

    def window(self) -> tuple[float, float]:
        """Finite sampling range: one period, or the interval clipped."""
        if self.periodic:
            return 0.0, self.domain.T
        a, b = self.domain.a, self.domain.b
        if math.isinf(a) and math.isinf(b):
            return -INFINITE_WINDOW, INFINITE_WINDOW
        if math.isinf(a):
            return b - 2 * INFINITE_WINDOW, b
        if math.isinf(b):
            return a, a + 2 * INFINITE_WINDOW
        return a, b

    def grid(self) -> np.ndarray:
        """Sample points; periodic grids cover one period plus one endpoint."""
        lo, hi = self.window()
        n = self.grid_n
        if self.periodic:
            h = (hi - lo) / n
            return lo - _GRID_SHIFT * h + h * np.arange(n + 1)
        return np.linspace(lo, hi, n + 1)

    @cached_property
    def scale(self) -> float:
        vals = self.f(self.grid())
        vals = vals[np.isfinite(vals)]
        return max(1.0, float(np.max(np.abs(vals)))) if vals.size else 1.0

    def contains(self, x: float) -> bool:
        if self.periodic:
            return math.isfinite(x)
        return self.domain.a < x < self.domain.b

    def is_constant(self) -> bool:
        vals = self.f(self.grid())
        vals = vals[np.isfinite(vals)]
        return bool(np.ptp(vals) <= self.tol * self.scale)

    def composed(self, s: float, b: float) -> "FunctionProfile":
        """The profile x -> f(s*x + b) for s = +-1, domain carried along."""
        new = ex.tidy(ex.substitute_affine(self.expr, s, b))
        if self.periodic:
            dom = self.domain
        else:
            ends = sorted(((self.domain.a - b) * s, (self.domain.b - b) * s))
            dom = Interval(ends[0], ends[1])
        out = FunctionProfile._unchecked(new, dom, self.tol, self.grid_n)
        scan = self.__dict__.get("_zero_scan")
        if self.periodic and scan is not None and not scan[1]:
            # Zeros move with the map; no need to scan again.
            T = self.domain.T
            moved = []
            for z in scan[0]:
                x = ((z.x0 - b) * s) % T
                if x >= T - 1e-15 * T:
                    x = 0.0
                moved.append(Zero(x + 0.0, z.kind, z.lam * s))
            out.__dict__["_zero_scan"] = (sorted(moved, key=lambda z: z.x0), [])
        return out

    def check_derivatives(self, rel: float = 1e-6) -> float:
        """Worst relative mismatch between d1, d2 and central differences."""
        xs = self.grid()[1:-1]
        h = 1e-4 * max(1.0, float(np.max(np.abs(xs))))
        worst = 0.0
        for sym, fn, k in ((self.d1, self.f, 1), (self.d2, self.f, 2)):
            exact = ex.evaluate(sym, xs)
            if k == 1:
                approx = (fn(xs + h) - fn(xs - h)) / (2 * h)
            else:
                approx = (fn(xs + h) - 2 * fn(xs) + fn(xs - h)) / h**2
            ok = np.isfinite(exact) & np.isfinite(approx)
            err = np.abs(exact - approx)[ok] / np.maximum(1.0, np.abs(exact[ok]))
            if err.size:
                worst = max(worst, float(err.max()))
        if worst > rel:
            raise ProfileError(f"derivative mismatch {worst:.3g} exceeds {rel}")
        return worst

    def to_config(self) -> str:
        return (f"function = {self.text}\ndomain = {self.domain}\n"
                f"tol = {self.tol!r}\ngrid_n = {self.grid_n}\n")


# -- configuration --------------------------------------------------------------

def _const_value(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "+inf"):
        return math.inf
    if t == "-inf":
        return -math.inf
    e = ex.parse(text)
    v = ex.evaluate(e, 0.0)
    if ex.evaluate(e, 1.2345) != v:
        raise ConfigError(f"expected a constant, got {text!r}")
    return v


def parse_domain(text: str) -> Domain:
    kind, _, rest = text.strip().partition(":")
    kind = kind.strip().lower()
    if kind == "periodic":
        return Periodic(_const_value(rest))
    if kind == "interval":
        parts = rest.split(",")
        if len(parts) != 2:
            raise ConfigError(f"interval needs two ends, got {rest!r}")
        return Interval(_const_value(parts[0]), _const_value(parts[1]))
    raise ConfigError(f"unknown domain kind {kind!r}")


def parse_config(text: str) -> dict[str, str]:
    """Read ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out: dict[str, str] = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {n}: expected 'key = value'")
        key = key.strip()
        if key in out:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def profile_from_config(cfg: dict[str, str]) -> FunctionProfile:
    for key in ("function", "domain"):
        if key not in cfg:
            raise ConfigError(f"missing key {key!r}")
    try:
        tol = float(cfg.get("tol", 1e-9))
        grid_n = int(cfg.get("grid_n", 4096))
    except ValueError as err:
        raise ConfigError(str(err)) from None
    return FunctionProfile(ex.parse(cfg["function"]), parse_domain(cfg["domain"]), tol, grid_n)


def load_profile(path: str) -> FunctionProfile:
    with open(path, encoding="utf-8") as fh:
        return profile_from_config(parse_config(fh.read()))


def curvature(profile: FunctionProfile, x: float) -> float:
    """Gauss curvature f''(x)/2 of 2dxdy + f(x)dy^2."""
    return ex.evaluate(profile.d2, x, strict=True) / 2.0


# -- zeros ----------------------------------------------------------------------

@dataclass(frozen=True)
class Zero:
    x0: float
    kind: str
    lam: float  # f'(x0)

    @property
    def simple(self) -> bool:
        return self.kind == SIMPLE


@dataclass(frozen=True)
class Plateau:
    left: float
    right: float


def sign_change_roots(fn, xs: np.ndarray, vals: np.ndarray | None = None) -> list[float]:
    """Roots of ``fn`` bracketed by sign changes between consecutive samples."""
    if vals is None:
        vals = fn(xs)
    roots = []
    for i in range(len(xs) - 1):
        u, v = vals[i], vals[i + 1]
        if not (np.isfinite(u) and np.isfinite(v)):
            continue
        if u == 0.0:
            roots.append(float(xs[i]))
        elif u * v < 0:
            roots.append(brentq(fn, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500))
    if len(vals) and vals[-1] == 0.0:
        roots.append(float(xs[-1]))
    return roots


def _scan(profile: FunctionProfile) -> tuple[list[Zero], list[Plateau]]:
    # Profiles are immutable, so the scan is stored on the instance.
    cached = profile.__dict__.get("_zero_scan")
    if cached is None:
        cached = _scan_uncached(profile)
        profile.__dict__["_zero_scan"] = cached
    return list(cached[0]), list(cached[1])


def _scan_uncached(profile: FunctionProfile) -> tuple[list[Zero], list[Plateau]]:
    xs = profile.grid()
    vals = profile.f(xs)
    tol = profile.tol
    h = xs[1] - xs[0]
    # A plateau needs f and its first two derivatives flat, so a high-order
    # zero such as x^3 is not mistaken for one on a coarse grid.
    flat = math.sqrt(tol)
    small = (np.isfinite(vals) & (np.abs(vals) <= tol) & (np.abs(profile.df(xs)) <= flat)
             & (np.abs(profile.d2f(xs)) <= flat))

    plateaus: list[Plateau] = []
    i = 0
    while i < len(xs):
        if small[i]:
            j = i
            while j + 1 < len(xs) and small[j + 1]:
                j += 1
            if j - i >= 2:
                plateaus.append(Plateau(float(xs[i]), float(xs[j])))
            i = j + 1
        else:
            i += 1

    cands = [(x, True) for x in sign_change_roots(profile.f, xs, vals)]
    absv = np.where(np.isfinite(vals), np.abs(vals), np.inf)
    for i in range(1, len(xs) - 1):
        if not (absv[i] <= absv[i - 1] and absv[i] <= absv[i + 1]):
            continue
        if vals[i] != 0.0 and (vals[i - 1] * vals[i] < 0 or vals[i] * vals[i + 1] < 0):
            continue
        lo, hi = xs[i - 1], xs[i + 1]
        g_lo, g_hi = profile.df(lo), profile.df(hi)
        if not (np.isfinite(g_lo) and np.isfinite(g_hi)):
            continue
        if g_lo * g_hi < 0:
            x0 = brentq(profile.df, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
        elif g_lo == 0.0:
            x0 = lo
        elif g_hi == 0.0:
            x0 = hi
        else:
            x0 = float(xs[i])
        cands.append((x0, False))

    found: list[float] = []
    for x0, _ in sorted(cands):
        fx = profile.f(x0)
        if not (np.isfinite(fx) and abs(fx) <= tol):
            continue
        if any(p.left - h <= x0 <= p.right + h for p in plateaus):
            continue
        if found and x0 - found[-1] < 0.5 * h:
            if abs(fx) < abs(profile.f(found[-1])):
                found[-1] = x0
            continue
        found.append(x0)

    if profile.periodic:
        T = profile.domain.T
        wrapped = sorted(0.0 if abs(x % T - T) <= 4e-16 * T else x % T for x in found)
        found = []
        for x0 in wrapped:
            if found and x0 - found[-1] < 0.5 * h:
                if abs(profile.f(x0)) < abs(profile.f(found[-1])):
                    found[-1] = x0
                continue
            found.append(x0)
        if len(found) > 1 and found[0] + T - found[-1] < 0.5 * h:
            if abs(profile.f(found[-1])) < abs(profile.f(found[0])):
                found[0] = found[-1]
            found.pop()
        found = [0.0 if abs(x0) < 1e-15 * T else x0 for x0 in found]
        found.sort()
    else:
        found = [x0 for x0 in found if profile.contains(x0)]

    zeros = []
    for x0 in found:
        lam = profile.df(x0)
        kind = SIMPLE if abs(lam) > tol else DEGENERATE
        zeros.append(Zero(float(x0) + 0.0, kind, float(lam)))
    return zeros, plateaus


def find_zeros(profile: FunctionProfile) -> list[Zero]:
    """Isolated zeros, sorted, in one period or in the sampled interval."""
    zeros, plateaus = _scan(profile)
    if plateaus:
        p = plateaus[0]
        raise ZeroPlateau(f"f vanishes on [{p.left:.6g}, {p.right:.6g}]")
    return zeros


def critical_points(profile: FunctionProfile) -> list[float]:
    """Zeros of f' (sign changes and tangential ones) in the sampling window."""
    xs = profile.grid()
    d = profile.df(xs)
    pts = sign_change_roots(profile.df, xs, d)
    absd = np.where(np.isfinite(d), np.abs(d), np.inf)
    for i in range(1, len(xs) - 1):
        if absd[i] <= absd[i - 1] and absd[i] <= absd[i + 1] and d[i - 1] * d[i + 1] > 0:
            lo, hi = xs[i - 1], xs[i + 1]
            s_lo, s_hi = profile.d2f(lo), profile.d2f(hi)
            if np.isfinite(s_lo) and np.isfinite(s_hi) and s_lo * s_hi < 0:
                x0 = brentq(profile.d2f, lo, hi, xtol=1e-15, maxiter=500)
                if abs(profile.df(x0)) <= profile.tol:
                    pts.append(x0)
    return sorted(pts)


# -- components -----------------------------------------------------------------

@dataclass(frozen=True)
class Component:
    left: float
    right: float
    sign: int
    left_zero: Zero | None = None  # None: domain end, plateau edge or whole circle
    right_zero: Zero | None = None

    @property
    def width(self) -> float:
        return self.right - self.left

    @property
    def midpoint(self) -> float | None:
        if math.isinf(self.left) or math.isinf(self.right):
            return None
        return 0.5 * (self.left + self.right)

    @property
    def sample_point(self) -> float:
        """An interior point, usable even when one end is infinite."""
        if math.isinf(self.left) and math.isinf(self.right):
            return 0.0
        if math.isinf(self.left):
            return self.right - 1.0
        if math.isinf(self.right):
            return self.left + 1.0
        return 0.5 * (self.left + self.right)


@dataclass(frozen=True)
class ComponentSet:
    items: tuple[Component, ...]
    cyclic: bool
    period: float | None
    zeros: tuple[Zero, ...]
    plateaus: tuple[Plateau, ...] = ()

    @property
    def elementary(self) -> bool:
        return not self.zeros and not self.plateaus

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(c.sign for c in self.items)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def locate(self, x: float) -> int | None:
        """Index of the component containing x (mod the period)."""
        for i, c in enumerate(self.items):
            if self.cyclic and self.period is not None:
                if len(self.items) == 1 and not self.zeros:
                    return 0
                y = c.left + ((x - c.left) % self.period)
            else:
                y = x
            if c.left < y < c.right:
                return i
        return None


def _sign_at(profile: FunctionProfile, x: float) -> int:
    v = profile.f(x)
    if not np.isfinite(v):
        raise EvaluationError(f"f is singular at x={x}")
    return 1 if v > 0 else -1 if v < 0 else 0


def components(profile: FunctionProfile) -> ComponentSet:
    """Ordered signed components of {f != 0}."""
    zeros, plateaus = _scan(profile)
    seps: list[tuple[float, float, Zero | None]] = [(z.x0, z.x0, z) for z in zeros]
    seps += [(p.left, p.right, None) for p in plateaus]
    seps.sort(key=lambda s: s[0])
    items: list[Component] = []
    if profile.periodic:
        T = profile.domain.T
        if not seps:
            comp = Component(0.0, T, _sign_at(profile, 0.0))
            return ComponentSet((comp,), True, T, ())
        n = len(seps)
        for i in range(n):
            lo = seps[i]
            hi = seps[(i + 1) % n]
            right = hi[0] + (T if i == n - 1 else 0.0)
            mid = 0.5 * (lo[1] + right)
            items.append(Component(lo[1], right, _sign_at(profile, mid), lo[2], hi[2]))
        return ComponentSet(tuple(items), True, T, tuple(zeros), tuple(plateaus))

    bounds = [(-math.inf, profile.domain.a, None)] + seps + [(profile.domain.b, math.inf, None)]
    for lo, hi in zip(bounds, bounds[1:]):
        comp = Component(lo[1], hi[0], 0, lo[2], hi[2])
        items.append(Component(comp.left, comp.right, _sign_at(profile, comp.sample_point),
                               lo[2], hi[2]))
    return ComponentSet(tuple(items), False, None, tuple(zeros), tuple(plateaus))


# -- contiguity graph -------------------------------------------------------------

@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    zero: Zero


@dataclass(frozen=True)
class ContiguityGraph:
    comps: ComponentSet
    edges: tuple[Edge, ...]

    @property
    def n(self) -> int:
        return len(self.comps)

    @property
    def signs(self) -> tuple[int, ...]:
        return self.comps.signs

    @property
    def cyclic(self) -> bool:
        return self.comps.cyclic

    @cached_property
    def partition(self) -> tuple[tuple[int, ...], ...]:
        """Connected components, as sorted vertex tuples."""
        parent = list(range(self.n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for e in self.edges:
            parent[find(e.u)] = find(e.v)
        groups: dict[int, list[int]] = {}
        for i in range(self.n):
            groups.setdefault(find(i), []).append(i)
        return tuple(sorted(tuple(g) for g in groups.values()))

    def degree(self, i: int) -> int:
        return sum((e.u == i) + (e.v == i) for e in self.edges)


def contiguity_graph(profile_or_comps: FunctionProfile | ComponentSet) -> ContiguityGraph:
    comps = profile_or_comps if isinstance(profile_or_comps, ComponentSet) else components(profile_or_comps)
    n = len(comps)
    edges = []
    pairs = range(n) if comps.cyclic else range(n - 1)
    for i in pairs:
        j = (i + 1) % n
        z = comps[i].right_zero
        if z is not None and z.simple and comps[j].left_zero is z:
            edges.append(Edge(i, j, z))
    return ContiguityGraph(comps, tuple(edges))


# -- symmetry ---------------------------------------------------------------------

CASES = ("0", "1a", "1b", "2", "3a", "3b", "3c")
PAIR_UNILATERE = "PairUnilatere"
PAIR_BILATERE = "PairBilatere"
IMPAIR = "Impair"
NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class SymmetryClass:
    case: str
    period: float | None
    reflection_centers: tuple[float, ...]  # fixed points c of x -> 2c - x
    subtype: str = NOT_APPLICABLE

    @property
    def label(self) -> str:
        """Case label refined by subtype: 2+u, 2+b, 2-, 3c+u, 3c+b, ..."""
        if self.case == "2" and self.subtype != NOT_APPLICABLE:
            return {PAIR_UNILATERE: "2+u", PAIR_BILATERE: "2+b", IMPAIR: "2-"}[self.subtype]
        if self.case == "3c" and self.subtype in (PAIR_UNILATERE, PAIR_BILATERE):
            return "3c+u" if self.subtype == PAIR_UNILATERE else "3c+b"
        return self.case

    def generators(self) -> list[tuple[int, float]]:
        """Generators of Is(f) as maps x -> s*x + b, given as (s, b)."""
        gens = []
        if self.period is not None:
            gens.append((1, self.period))
        gens += [(-1, 2 * c) for c in self.reflection_centers]
        return gens


def _validates(profile: FunctionProfile, s: int, b: float, tol: float | None = None) -> bool:
    xs = profile.grid()
    if not profile.periodic:
        lo, hi = profile.window()
        keep = (s * xs + b >= lo) & (s * xs + b <= hi)
        xs = xs[keep]
    u, v = profile.f(s * xs + b), profile.f(xs)
    ok = np.isfinite(u) & np.isfinite(v)
    if not ok.any() or np.any(np.isfinite(u) != np.isfinite(v)):
        return False
    tol = profile.tol * profile.scale if tol is None else tol
    return bool(np.max(np.abs(u[ok] - v[ok])) <= tol)


def minimal_period(profile: FunctionProfile) -> float | None:
    if not profile.periodic:
        return None
    T = profile.domain.T
    for m in range(64, 1, -1):
        if _validates(profile, 1, T / m):
            return T / m
    return T


def _center_candidates(profile: FunctionProfile, zeros: list[Zero]) -> list[float]:
    pts = [z.x0 for z in zeros]
    cands = [0.5 * (p + q) for i, p in enumerate(pts) for q in pts[i:]]
    if profile.periodic:
        T = profile.domain.T
        cands += [0.5 * (p + q + T) for i, p in enumerate(pts) for q in pts[i:]]
    cands += critical_points(profile)
    return cands


def detect_symmetry(profile: FunctionProfile) -> SymmetryClass:
    zeros, _ = _scan(profile)
    comps = components(profile)

    if not profile.periodic:
        a, b = profile.domain.a, profile.domain.b
        if math.isinf(a) != math.isinf(b):
            return SymmetryClass("0", None, ())
        if math.isinf(a):
            cands = sorted(_center_candidates(profile, zeros), key=abs)
        else:
            cands = [0.5 * (a + b)]
        for c in cands:
            if _validates(profile, -1, 2 * c):
                fixes = abs(profile.f(c)) > profile.tol
                return SymmetryClass("1b" if fixes else "1a", None, (float(c),))
        return SymmetryClass("0", None, ())

    T0 = minimal_period(profile)
    half = T0 / 2
    center = None
    for c in _center_candidates(profile, zeros):
        if _validates(profile, -1, 2 * c):
            center = c % half
            if half - center < 1e-12 * max(1.0, half):
                center = 0.0
            break
    subtype = _subtype(comps, T0)
    if center is None:
        return SymmetryClass("2", T0, (), subtype)
    centers = (float(center), float(center + half))
    fixed = [abs(profile.f(c)) > profile.tol for c in centers]
    case = {0: "3a", 1: "3b", 2: "3c"}[sum(fixed)]
    return SymmetryClass(case, T0, centers, subtype)


def _subtype(comps: ComponentSet, T0: float) -> str:
    if comps.elementary or not comps.cyclic:
        return NOT_APPLICABLE
    per_min = len(comps) * T0 / comps.period
    count = int(round(per_min))
    if count % 2:
        return IMPAIR
    signs = comps.signs
    alternating = all(signs[i] != signs[(i + 1) % len(signs)] for i in range(len(signs)))
    return PAIR_UNILATERE if alternating else PAIR_BILATERE


# -- [f] representatives -------------------------------------------------------------

SIGNATURE_SAMPLES = 1024


def _signature(profile: FunctionProfile) -> np.ndarray:
    lo, hi = profile.window()
    if profile.periodic:
        xs = lo + (hi - lo) * np.arange(SIGNATURE_SAMPLES) / SIGNATURE_SAMPLES
    else:
        lo, hi = max(lo, -INFINITE_WINDOW), min(hi, INFINITE_WINDOW)
        xs = np.linspace(lo, hi, SIGNATURE_SAMPLES + 2)[1:-1]
    return profile.f(xs)


def lex_compare(u, v, tol: float) -> int:
    """Tolerant lexicographic comparison of two numeric sequences."""
    for a, b in zip(u, v):
        if not (np.isfinite(a) and np.isfinite(b)):
            if np.isfinite(a) != np.isfinite(b):
                return -1 if np.isfinite(a) else 1
            continue
        if abs(a - b) > tol:
            return -1 if a < b else 1
    return (len(u) > len(v)) - (len(u) < len(v))


def _anchors(profile: FunctionProfile) -> list[float]:
    zeros, _ = _scan(profile)
    if zeros:
        return [z.x0 for z in zeros]
    crit = critical_points(profile)
    if not crit:
        lo, hi = profile.window()
        return [lo if math.isfinite(lo) else 0.0]
    vals = [profile.f(c) for c in crit]
    top = max(vals)
    return [c for c, v in zip(crit, vals) if v >= top - 1e-9 * profile.scale]


def translate_candidates(profile: FunctionProfile) -> list[FunctionProfile]:
    """Representatives of [f] anchored at a zero (or a maximum) in both orientations."""
    out = []
    for s in (1, -1):
        oriented = profile if s == 1 else profile.composed(-1, 0.0)
        for z in _anchors(oriented):
            out.append(oriented.composed(1, z))
    return out


def canonical_translate(profile: FunctionProfile) -> FunctionProfile:
    """A representative of [f] that depends only on the class.

    Every zero (or every global maximum when f has no zero) is tried as the
    origin, in both orientations; the candidate with the smallest sampled
    signature wins.  Comparing all anchors, and not only the first zero past
    the origin, is what makes the result constant on the class.
    """
    if profile.is_constant():
        raise ProfileError("constant profile has no canonical translate")
    tol = 1e-7 * profile.scale
    best, best_key = None, None
    for cand in translate_candidates(profile):
        key = _domain_key(cand) + list(_signature(cand))
        if best is None or lex_compare(key, best_key, tol) < 0:
            best, best_key = cand, key
    return best


def _domain_key(p: FunctionProfile) -> list[float]:
    if p.periodic:
        return [p.domain.T]
    return [p.domain.a, p.domain.b]


def same_class(p: FunctionProfile, q: FunctionProfile, tol: float | None = None) -> bool:
    """Whether p and q represent the same class [f] (sampled comparison)."""
    if p.periodic != q.periodic:
        return False
    tol = 1e-7 * max(p.scale, q.scale) if tol is None else tol
    cp, cq = canonical_translate(p), canonical_translate(q)
    ku = _domain_key(cp) + list(_signature(cp))
    kv = _domain_key(cq) + list(_signature(cq))
    return lex_compare(ku, kv, tol) == 0


def rescaled(profile: FunctionProfile, a: float) -> FunctionProfile:
    """The profile x -> a^-2 f(a x)."""
    e = ex.tidy(ex.scale(ex.substitute_affine(profile.expr, a, 0.0), 1.0 / a**2))
    if profile.periodic:
        dom = Periodic(profile.domain.T / abs(a))
    else:
        ends = sorted((profile.domain.a / a, profile.domain.b / a))
        dom = Interval(*ends)
    return FunctionProfile(e, dom, profile.tol, profile.grid_n)


def affine_equivalent(p: FunctionProfile, q: FunctionProfile) -> float | None:
    """Search a > 0 with a^-2 p(a x + b) in the class [q]; return a or None.

    The scale is pinned by a length both profiles share: the minimal period,
    the interval length, or else the smallest gap between zeros.
    """
    cands = []
    if p.periodic and q.periodic:
        cands.append(minimal_period(p) / minimal_period(q))
    elif not p.periodic and not q.periodic:
        lp, lq = p.domain.b - p.domain.a, q.domain.b - q.domain.a
        if math.isfinite(lp) and math.isfinite(lq):
            cands.append(lp / lq)
        zp, zq = [z.x0 for z in _scan(p)[0]], [z.x0 for z in _scan(q)[0]]
        if len(zp) > 1 and len(zq) > 1:
            cands.append(min(np.diff(zp)) / min(np.diff(zq)))
    for a in cands:
        if not (a > 0 and math.isfinite(a)):
            continue
        try:
            if same_class(rescaled(p, a), q):
                return float(a)
        except LksError:
            continue
    return None
