"""Combinatorial and metric model of the maximal saddle-complete extension.

The extension is never built as a manifold.  What is built is what every later
computation consumes: the squares and half-bands cut out by the zeros of f, the
leaf space of the Killing flow as a graph of metric segments, the completeness
of light leaves, and near each simple zero the transverse affine parameter and
the saddle chart that glues four squares around the zero of the Killing field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp

from . import expr as ex
from .errors import DegenerateZero, LksError
from .fnprofile import Component, FunctionProfile, Zero, components

SADDLE = "Saddle"
SOURCE_SINK = "SourceSink"
BOUNDARY = "Boundary"

DOUBLE_BOUNDARY = "DoubleBoundarySegment"
HALF_OPEN_DOUBLE = "HalfOpenDouble"
PLAIN = "PlainSegment"


def _end_kind(z: Zero | None, at_domain_end: bool) -> str:
    if z is None:
        return BOUNDARY if at_domain_end else SOURCE_SINK
    return SADDLE if z.simple else SOURCE_SINK


@dataclass(frozen=True)
class Square:
    left: float
    right: float
    end_kinds: tuple[str, str]
    sign: int

    @property
    def width(self) -> float:
        return self.right - self.left


@dataclass(frozen=True)
class HalfBand:
    """A component with a zero on one side and a domain end on the other."""
    left: float
    right: float
    end_kinds: tuple[str, str]
    sign: int
    band_type: str = "III"

    @property
    def width(self) -> float:
        return self.right - self.left


def _split(profile: FunctionProfile):
    comps = components(profile)
    squares, bands = [], []
    if comps.elementary:
        return comps, squares, bands
    n = len(comps)
    for i, c in enumerate(comps):
        first = not comps.cyclic and i == 0
        last = not comps.cyclic and i == n - 1
        kinds = (_end_kind(c.left_zero, first), _end_kind(c.right_zero, last))
        if BOUNDARY in kinds:
            bands.append(HalfBand(c.left, c.right, kinds, c.sign))
        else:
            squares.append(Square(c.left, c.right, kinds, c.sign))
    return comps, squares, bands


def squares(profile: FunctionProfile) -> list[Square]:
    """One square per component bounded by zeros on both sides."""
    return _split(profile)[1]


def half_bands(profile: FunctionProfile) -> list[HalfBand]:
    """Components touching a domain end (Reeb-type half bands, width may be inf)."""
    return _split(profile)[2]


# -- leaf space ----------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    tag: str
    left: float
    right: float
    sign: int  # sign of f on the segment, 0 on a plateau

    @property
    def length(self) -> float:
        return self.right - self.left


@dataclass(frozen=True)
class Junction:
    x0: float
    tag: str  # A1 saddle, A2 degenerate without sign change, B degenerate with one
    left: int  # segment indices; for cyclic models they wrap
    right: int
    branch_points: int


@dataclass(frozen=True)
class LeafSpaceModel:
    segments: tuple[Segment, ...]
    junctions: tuple[Junction, ...]
    cyclic: bool

    @property
    def total_length(self) -> float:
        return sum(s.length for s in self.segments)

    @property
    def branch_points(self) -> int:
        return sum(j.branch_points for j in self.junctions)


def _segment_tag(c: Component, first: bool, last: bool, cyclic: bool) -> str:
    left_end = c.left_zero is None and (first and not cyclic)
    right_end = c.right_zero is None and (last and not cyclic)
    if c.left_zero is None and c.right_zero is None and (left_end or right_end or cyclic):
        return PLAIN
    if left_end or right_end:
        return HALF_OPEN_DOUBLE
    return DOUBLE_BOUNDARY


def leaf_space(profile: FunctionProfile) -> LeafSpaceModel:
    comps = components(profile)
    n = len(comps)
    if comps.elementary:
        c = comps[0]
        return LeafSpaceModel((Segment(PLAIN, c.left, c.right, c.sign),), (), comps.cyclic)

    # Plateaus become plain segments sitting between components.
    segs: list[Segment] = []
    order = []
    for i, c in enumerate(comps):
        order.append(("c", c.left, i))
    for p in comps.plateaus:
        order.append(("p", p.left, p))
    order.sort(key=lambda t: t[1])
    for kind, _, obj in order:
        if kind == "c":
            c = comps[obj]
            tag = _segment_tag(c, obj == 0, obj == n - 1, comps.cyclic)
            segs.append(Segment(tag, c.left, c.right, c.sign))
        else:
            segs.append(Segment(PLAIN, obj.left, obj.right, 0))

    m = len(segs)
    pairs = range(m) if comps.cyclic else range(m - 1)
    junctions = []
    for i in pairs:
        j = (i + 1) % m
        a, b = segs[i], segs[j]
        x0 = a.right if not (comps.cyclic and j == 0) else b.left
        zero = next((z for z in comps.zeros if abs(z.x0 - x0) < 1e-9 * max(1.0, abs(x0))), None)
        if zero is not None and zero.simple:
            tag, branches = "A1", 4
        elif a.sign and b.sign and a.sign != b.sign:
            tag, branches = "B", 0
        else:
            tag, branches = "A2", 0
        junctions.append(Junction(float(x0), tag, i, j, branches))
    return LeafSpaceModel(tuple(segs), tuple(junctions), comps.cyclic)


# -- light leaves ---------------------------------------------------------------------

COMPLETE = "Complete"
SEMI_COMPLETE = "SemiComplete"


@dataclass(frozen=True)
class LeafCompleteness:
    kind: str
    complete_side: str | None = None  # "y<0" or "y>0" for semi-complete leaves

    def __str__(self):
        return self.kind if self.complete_side is None else f"{self.kind}({self.complete_side})"


def light_leaf_complete(profile: FunctionProfile, z: Zero) -> LeafCompleteness:
    """Completeness of the light leaf x = x0 over a zero of f.

    Along that leaf y'' = f'(x0) y'^2 / 2, so the leaf runs off in finite
    parameter time on the side where f'(x0) y' > 0 and is complete otherwise.
    """
    lam = profile.df(z.x0)
    if abs(lam) <= profile.tol:
        return LeafCompleteness(COMPLETE)
    return LeafCompleteness(SEMI_COMPLETE, "y<0" if lam > 0 else "y>0")


# -- transverse affine parameter --------------------------------------------------------

_SERIES_RADIUS = 1e-6


def _domino(profile: FunctionProfile, z: Zero) -> tuple[float, float]:
    comps = components(profile)
    pts = [w.x0 for w in comps.zeros]
    if profile.periodic:
        T = profile.domain.T
        pts = sorted({p + k * T for p in pts for k in (-1, 0, 1)})
        x0 = min(pts, key=lambda p: abs(p - z.x0))
        i = pts.index(x0)
        return pts[i - 1] - x0 + z.x0, pts[i + 1] - x0 + z.x0
    lo, hi = profile.window()
    left = max([p for p in pts if p < z.x0 - 1e-12] + [lo])
    right = min([p for p in pts if p > z.x0 + 1e-12] + [hi])
    return left, right


@dataclass(frozen=True, eq=False)
class AffineStructure:
    """phi > 0 solving phi' = -(f' - lam)/f phi with phi(x0) = 1, and the
    transverse affine parameter xi(x, y) = phi(x) e^{lam y} f(x) / lam."""

    profile: FunctionProfile
    zero: Zero
    lam: float
    domino: tuple[float, float]
    _left: object
    _right: object

    def coefficient(self, x):
        """(f'(x) - lam)/f(x), continued by f''(x0)/lam at x0."""
        x = np.asarray(x, dtype=float)
        xa = np.atleast_1d(x)
        p = self.profile
        near = np.abs(xa - self.zero.x0) < _SERIES_RADIUS
        with np.errstate(all="ignore"):
            q = (np.asarray(p.df(xa)) - self.lam) / np.asarray(p.f(xa))
        q = np.where(near, p.d2f(self.zero.x0) / self.lam, q)
        return float(q[0]) if x.ndim == 0 else q

    def log_phi(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.domino
        if np.any((x <= lo) | (x >= hi)):
            raise LksError("phi is only defined inside the domino")
        out = np.where(x >= self.zero.x0, self._right(np.maximum(x, self.zero.x0))[0],
                       self._left(np.minimum(x, self.zero.x0))[0])
        return float(out) if out.ndim == 0 else out

    def phi(self, x):
        return np.exp(self.log_phi(x))

    def xi(self, x, y):
        return self.phi(x) * np.exp(self.lam * np.asarray(y)) * self.profile.f(x) / self.lam

    def samples(self, n: int = 1001, margin: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.domino
        w = hi - lo
        xs = np.linspace(lo + margin * w, hi - margin * w, n)
        return xs, self.phi(xs)

    def residual(self, xs) -> np.ndarray:
        """|phi' + q phi| / phi, with phi'/phi from a five-point stencil on log phi."""
        xs = np.asarray(xs, dtype=float)
        lo, hi = self.domino
        h = 1e-3 * np.minimum(np.minimum(xs - lo, hi - xs), 0.1 * (hi - lo))
        lp = self.log_phi
        dlog = (lp(xs - 2 * h) - 8 * lp(xs - h) + 8 * lp(xs + h) - lp(xs + 2 * h)) / (12 * h)
        return np.abs(dlog + self.coefficient(xs))


def solve_affine_ode(profile: FunctionProfile, z: Zero, margin: float = 1e-7) -> AffineStructure:
    lam = profile.df(z.x0)
    if abs(lam) <= profile.tol:
        raise DegenerateZero(f"zero at {z.x0} is degenerate")
    lo, hi = _domino(profile, z)
    stub = AffineStructure(profile, z, lam, (lo, hi), None, None)
    w = hi - lo

    def rhs(x, y):
        return [-stub.coefficient(x)]

    sols = []
    for end in (hi - margin * w, lo + margin * w):
        sol = solve_ivp(rhs, (z.x0, end), [0.0], method="DOP853", rtol=1e-12,
                        atol=1e-13, dense_output=True)
        if not sol.success:
            raise LksError(f"affine ODE integration failed: {sol.message}")
        sols.append(sol.sol)
    return AffineStructure(profile, z, lam, (lo, hi), sols[1], sols[0])


# -- saddle chart ------------------------------------------------------------------------

_H_SERIES = 1e-4


@dataclass(frozen=True, eq=False)
class SaddleChart:
    """f(x0 + x) = lam x g(x) near a simple zero, and the chart (u, v) in which
    the four squares around the saddle glue smoothly."""

    profile: FunctionProfile
    zero: Zero
    lam: float
    affine: AffineStructure

    @cached_property
    def _taylor(self) -> tuple[float, float]:
        p, x0 = self.profile, self.zero.x0
        d3 = ex.differentiate(p.d2)
        a = p.d2f(x0) / (2 * self.lam)
        b = ex.evaluate(d3, x0) / (6 * self.lam)
        return a, b

    def g(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self._taylor
        with np.errstate(all="ignore"):
            direct = np.asarray(self.profile.f(self.zero.x0 + x)) / (self.lam * x)
        out = np.where(np.abs(x) < _SERIES_RADIUS, 1 + a * x + b * x * x, direct)
        return float(out) if out.ndim == 0 else out

    def h(self, x):
        """(g - 1/g)/x, equal to 2 g'(0) at the origin."""
        x = np.asarray(x, dtype=float)
        a, b = self._taylor
        gx = self.g(x)
        with np.errstate(all="ignore"):
            direct = (gx - 1 / gx) / x
        out = np.where(np.abs(x) < _H_SERIES, 2 * a + (2 * b - a * a) * x, direct)
        return float(out) if out.ndim == 0 else out

    def reconstruction_error(self, xs) -> float:
        xs = np.asarray(xs, dtype=float)
        return float(np.max(np.abs(self.lam * xs * self.g(xs) - self.profile.f(self.zero.x0 + xs))))

    def to_uv(self, x, y):
        """(x, y) in a square next to the zero, x measured from x0."""
        s = np.sqrt(self.affine.phi(self.zero.x0 + x) * self.g(x))
        return x * s * np.exp(self.lam * y / 2), np.exp(-self.lam * y / 2) / s

    def from_uv(self, u, v):
        x = u * v
        y = -np.log(v * v * self.affine.phi(self.zero.x0 + x) * self.g(x)) / self.lam
        return x, y

    def metric(self, u, v) -> np.ndarray:
        """Gram matrix [[alpha, beta], [beta, gamma]] of the metric in (u, v)."""
        x = u * v
        gx, hx = self.g(x), self.h(x)
        alpha = v * v * hx / self.lam
        beta = -(gx + 1 / gx) / self.lam
        gamma = u * u * hx / self.lam
        return np.array([[alpha, beta], [beta, gamma]])


def saddle_chart(profile: FunctionProfile, z: Zero) -> SaddleChart:
    lam = profile.df(z.x0)
    if abs(lam) <= profile.tol:
        raise DegenerateZero(f"zero at {z.x0} is degenerate")
    return SaddleChart(profile, z, lam, solve_affine_ode(profile, z))


# -- holonomy -------------------------------------------------------------------------------

def cylinder_holonomy(xi_plus: float, xi_minus: float) -> float:
    """Ratio of the homothety (xi+/xi-)^2 acquired around a cylinder."""
    if xi_plus == 0 or xi_minus == 0:
        raise LksError("axis parameters must be non-zero")
    return (xi_plus / xi_minus) ** 2


def quasi_saddle_completable(xi_plus: float, xi_minus: float, tol: float = 1e-12) -> bool:
    if xi_plus == 0 or xi_minus == 0:
        raise LksError("axis parameters must be non-zero")
    return abs(abs(xi_plus) - abs(xi_minus)) <= tol * max(abs(xi_plus), abs(xi_minus))


@dataclass(frozen=True)
class QuasiSaddleHolonomy:
    eta: float

    def flow_shift(self, lam: float) -> float:
        return math.log(self.eta) / lam


def quasi_saddle_holonomy(xi1_g1, xi2_g1, xi3_g3, xi4_g3,
                          xi1_g4, xi2_g2, xi3_g2, xi4_g4) -> QuasiSaddleHolonomy:
    """Holonomy eta of the transverse affine structure around a quasi-saddle.

    Arguments are the values of the four local affine parameters on the light
    leaves where consecutive charts are compared; numerator and denominator
    each contain every parameter exactly once, so eta does not depend on how
    the parameters were normalised.
    """
    den = xi1_g4 * xi2_g2 * xi3_g2 * xi4_g4
    if den == 0:
        raise LksError("quasi-saddle holonomy: zero denominator")
    return QuasiSaddleHolonomy((xi1_g1 * xi2_g1 * xi3_g3 * xi4_g3) / den)
