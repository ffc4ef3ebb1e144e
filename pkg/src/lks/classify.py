"""Classification invariants of tori and Klein bottles with a Killing field.

A non-elementary torus is described by its flow period t0, a twist tau
modulo t0, and a marked profile (fbar, marks) on R/Z.  Two descriptions give
isometric tori iff they differ by orientation flips and base-point shifts;
both moves are finite once a zero of fbar is pinned at the origin, which is
how the canonical form and the equivalence test work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import expr as ex
from .errors import ConfigError, InvariantError, LksError
from .fnprofile import (FunctionProfile, Periodic, components, find_zeros, parse_config,
                        parse_domain, rescaled, same_class)

SAMPLES = 1024
MARK_TOL = 1e-6


def _mod(x: float, p: float) -> float:
    r = math.fmod(x, p)
    if r < 0:
        r += p
    return 0.0 if r >= p else r


def _circ_dist(a: float, b: float, p: float) -> float:
    d = abs(_mod(a - b, p))
    return min(d, p - d)


@dataclass(frozen=True)
class TorusInvariant:
    t0: float
    tau: float
    fbar: FunctionProfile
    marks: tuple[float, ...]


@dataclass(frozen=True)
class ElementaryInvariant:
    t0: float
    tau: float
    fbar: FunctionProfile


@dataclass(frozen=True)
class BottleInvariant1:
    t0: float
    fbar: FunctionProfile
    marks: tuple[float, ...]


@dataclass(frozen=True)
class BottleInvariant2:
    t0: float
    fbar: FunctionProfile
    marks: tuple[float, ...]  # symmetric subset of [0, 2)


Invariant = TorusInvariant | ElementaryInvariant | BottleInvariant1 | BottleInvariant2


# -- validation ------------------------------------------------------------------

def _period_of(p: FunctionProfile) -> float | None:
    return p.domain.T if isinstance(p.domain, Periodic) else None


def _midpoint_violations(fbar: FunctionProfile, marks, period: float) -> list[str]:
    comps = components(fbar)
    out = []
    used = set()
    for x in marks:
        i = comps.locate(x)
        if i is None:
            out.append(f"mark {x!r} lies on a zero of fbar")
            continue
        mid = comps[i].midpoint
        if mid is None or _circ_dist(mid, x, period) > MARK_TOL:
            out.append(f"mark {x!r} is not the midpoint of its component")
        if i in used:
            out.append(f"mark {x!r} repeats a component")
        used.add(i)
    return out


def _common(t0: float, fbar: FunctionProfile, period: float) -> list[str]:
    out = []
    if not (t0 > 0 and math.isfinite(t0)):
        out.append("t0 must be a positive real")
    if _period_of(fbar) is None or abs(_period_of(fbar) - period) > 1e-12:
        out.append(f"fbar must live on R/{period:g}Z")
        return out
    if fbar.is_constant():
        out.append("fbar is constant (elementary)")
    elif not find_zeros(fbar):
        out.append("fbar has no zero (elementary)")
    return out


def _sorted_in(marks, period: float) -> list[str]:
    out = []
    if any(not (0 <= x < period) for x in marks):
        out.append(f"marks must lie in [0, {period:g})")
    if list(marks) != sorted(marks) or len(set(marks)) != len(marks):
        out.append("marks must be sorted and distinct")
    return out


def validate_torus(inv: TorusInvariant) -> list[str]:
    out = _common(inv.t0, inv.fbar, 1.0)
    if not (0 <= inv.tau < inv.t0):
        out.append("tau must lie in [0, t0)")
    if len(inv.marks) % 2:
        out.append("even marking: the number of marks must be even")
    out += _sorted_in(inv.marks, 1.0)
    if not out:
        out += _midpoint_violations(inv.fbar, inv.marks, 1.0)
    return out


def validate_elementary(inv: ElementaryInvariant) -> list[str]:
    out = []
    if not (inv.t0 > 0 and math.isfinite(inv.t0)):
        out.append("t0 must be a positive real")
    if not (0 <= inv.tau < inv.t0):
        out.append("tau must lie in [0, t0)")
    if _period_of(inv.fbar) != 1.0:
        out.append("fbar must live on R/Z")
    elif not inv.fbar.is_constant() and find_zeros(inv.fbar):
        out.append("fbar vanishes: not elementary")
    return out


def validate_bottle1(inv: BottleInvariant1) -> list[str]:
    out = _common(inv.t0, inv.fbar, 1.0)
    if len(inv.marks) % 2 == 0:
        out.append("odd marking: the number of marks must be odd")
    out += _sorted_in(inv.marks, 1.0)
    if not out:
        out += _midpoint_violations(inv.fbar, inv.marks, 1.0)
    return out


def validate_bottle2(inv: BottleInvariant2) -> list[str]:
    out = _common(inv.t0, inv.fbar, 2.0)
    if out:
        return out
    f = inv.fbar
    xs = f.grid()
    if np.max(np.abs(f.f(-xs) - f.f(xs))) > f.tol * f.scale:
        out.append("fbar must be even")
    thr = f.tol * f.scale
    if abs(float(f.f(0.0))) <= thr or abs(float(f.f(1.0))) <= thr:
        out.append("fbar(0) fbar(1) must be non-zero")
    out += _sorted_in(inv.marks, 2.0)
    for x in inv.marks:
        if not any(_circ_dist(-x, y, 2.0) <= MARK_TOL for y in inv.marks):
            out.append(f"marking is not symmetric: {x!r} has no mirror")
    for need in (0.0, 1.0):
        if not any(_circ_dist(need, y, 2.0) <= MARK_TOL for y in inv.marks):
            out.append(f"marking must contain {need:g}")
    if not out:
        out += _midpoint_violations(f, inv.marks, 2.0)
    return out


def validate(inv: Invariant) -> list[str]:
    if isinstance(inv, TorusInvariant):
        return validate_torus(inv)
    if isinstance(inv, ElementaryInvariant):
        return validate_elementary(inv)
    if isinstance(inv, BottleInvariant1):
        return validate_bottle1(inv)
    return validate_bottle2(inv)


def _checked(inv):
    problems = validate(inv)
    if problems:
        raise InvariantError("; ".join(problems))
    return inv


# -- construction ----------------------------------------------------------------

def normalized(profile: FunctionProfile, period: float = 1.0) -> tuple[FunctionProfile, float]:
    """Rescale x so the profile has the given period; returns (fbar, a) with
    fbar(x) = a^-2 f(a x)."""
    if not profile.periodic:
        raise InvariantError("a closed surface needs a periodic profile")
    a = profile.domain.T / period
    if a == 1.0:
        return profile, 1.0
    out = rescaled(profile, a)
    return FunctionProfile(out.expr, Periodic(period), profile.tol, profile.grid_n), a


def all_midpoints(fbar: FunctionProfile) -> list[float]:
    T = fbar.domain.T
    return sorted(_mod(c.midpoint, T) for c in components(fbar))


def _marks(raw, a: float, period: float) -> tuple[float, ...]:
    return tuple(sorted({_mod(float(x) / a, period) for x in raw}))


def build_torus(profile: FunctionProfile, t0: float, tau: float, marks) -> TorusInvariant:
    fbar, a = normalized(profile)
    ms = all_midpoints(fbar) if marks == "all" else _marks(marks, a, 1.0)
    return _checked(TorusInvariant(float(t0), _mod(float(tau), float(t0)), fbar, tuple(ms)))


def build_elementary(profile: FunctionProfile, t0: float, tau: float) -> ElementaryInvariant:
    fbar, _ = normalized(profile)
    return _checked(ElementaryInvariant(float(t0), _mod(float(tau), float(t0)), fbar))


def build_bottle1(profile: FunctionProfile, t0: float, marks) -> BottleInvariant1:
    fbar, a = normalized(profile)
    ms = all_midpoints(fbar) if marks == "all" else _marks(marks, a, 1.0)
    return _checked(BottleInvariant1(float(t0), fbar, tuple(ms)))


def build_bottle2(profile: FunctionProfile, t0: float, marks) -> BottleInvariant2:
    """Marks may be given on one half; the mirror images, 0 and 1 are added."""
    fbar, a = normalized(profile, 2.0)
    ms = set(_marks(marks, a, 2.0)) | {0.0, 1.0}
    ms |= {_mod(-x, 2.0) for x in ms}
    return _checked(BottleInvariant2(float(t0), fbar, tuple(sorted(ms))))


# -- moves -----------------------------------------------------------------------

def _shift_fbar(fbar: FunctionProfile, y: float) -> FunctionProfile:
    return fbar.composed(1, y)


def flip_torus(inv: TorusInvariant) -> TorusInvariant:
    marks = tuple(sorted(_mod(1.0 - x, 1.0) for x in inv.marks))
    return TorusInvariant(inv.t0, _mod(-inv.tau, inv.t0), inv.fbar.composed(-1, 0.0), marks)


def crossed(marks, y: float) -> int:
    """Number of marks passed when the base point moves forward by y in [0, 1)."""
    return sum(1 for x in marks if x <= y)


def shift_torus(inv: TorusInvariant, y: float) -> TorusInvariant:
    y = _mod(y, 1.0)
    i = crossed(inv.marks, y)
    tau = inv.tau if i % 2 == 0 else _mod(-inv.tau, inv.t0)
    marks = tuple(sorted(_mod(x - y, 1.0) for x in inv.marks))
    return TorusInvariant(inv.t0, tau, _shift_fbar(inv.fbar, y), marks)


def flip_bottle1(inv: BottleInvariant1) -> BottleInvariant1:
    marks = tuple(sorted(_mod(1.0 - x, 1.0) for x in inv.marks))
    return BottleInvariant1(inv.t0, inv.fbar.composed(-1, 0.0), marks)


def shift_bottle1(inv: BottleInvariant1, y: float) -> BottleInvariant1:
    y = _mod(y, 1.0)
    marks = tuple(sorted(_mod(x - y, 1.0) for x in inv.marks))
    return BottleInvariant1(inv.t0, _shift_fbar(inv.fbar, y), marks)


def swap_bottle2(inv: BottleInvariant2) -> BottleInvariant2:
    """Exchange the two core curves: x -> 1 - x."""
    marks = tuple(sorted(_mod(1.0 - x, 2.0) for x in inv.marks))
    return BottleInvariant2(inv.t0, inv.fbar.composed(-1, 1.0), marks)


# -- comparison ------------------------------------------------------------------

def _samples(fbar: FunctionProfile) -> np.ndarray:
    T = fbar.domain.T
    return fbar.f(T * np.arange(SAMPLES) / SAMPLES)


def _close_profiles(a: FunctionProfile, b: FunctionProfile, tol: float) -> bool:
    return bool(np.max(np.abs(_samples(a) - _samples(b))) <= tol * max(a.scale, b.scale))


def _close_marks(a, b, period: float, tol: float) -> bool:
    if len(a) != len(b):
        return False

    def norm(ms):
        return sorted(0.0 if period - x <= tol else x for x in ms)

    return all(_circ_dist(x, y, period) <= tol for x, y in zip(norm(a), norm(b)))


def _close_tau(a: float, b: float, t0: float, tol: float) -> bool:
    return _circ_dist(a, b, t0) <= tol * t0


def _same_t0(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(a, b)


def close_tori(a: TorusInvariant, b: TorusInvariant, tol: float = 1e-7) -> bool:
    return (_same_t0(a.t0, b.t0, tol) and _close_tau(a.tau, b.tau, a.t0, tol)
            and _close_marks(a.marks, b.marks, 1.0, tol) and _close_profiles(a.fbar, b.fbar, tol))


def _zero_shifts(fbar: FunctionProfile) -> list[float]:
    return [_mod(z.x0, fbar.domain.T) for z in find_zeros(fbar)]


@dataclass(frozen=True)
class Move:
    flip: bool
    shift: float
    crossed: int

    def __str__(self):
        parts = ["flip"] if self.flip else []
        parts.append(f"shift y={self.shift!r} crossing {self.crossed} mark(s)")
        return ", ".join(parts)


@dataclass(frozen=True)
class _Candidate:
    move: Move
    tau: float
    marks: tuple[float, ...]
    samples: np.ndarray


def _torus_candidates(inv: TorusInvariant, only_first: bool = False) -> list[_Candidate]:
    """Both orientations, each anchored at every zero of fbar.

    Samples are read off the original fbar, so no profile is built per
    candidate; ``realize`` turns a chosen move into an invariant.
    """
    zeros = _zero_shifts(inv.fbar)
    grid = np.arange(SAMPLES) / SAMPLES
    out = []
    for flip in ((False,) if only_first else (False, True)):
        marks0 = tuple(sorted(_mod(1.0 - x, 1.0) for x in inv.marks)) if flip else inv.marks
        tau0 = _mod(-inv.tau, inv.t0) if flip else inv.tau
        zs = sorted(_mod(-z, 1.0) for z in zeros) if flip else zeros
        for y in zs[:1] if only_first else zs:
            i = crossed(marks0, y)
            tau = tau0 if i % 2 == 0 else _mod(-tau0, inv.t0)
            marks = tuple(sorted(_mod(x - y, 1.0) for x in marks0))
            xs = -(grid + y) if flip else grid + y
            out.append(_Candidate(Move(flip, y, i), tau, marks, inv.fbar.f(xs)))
    return out


def realize(inv: TorusInvariant, move: Move) -> TorusInvariant:
    return shift_torus(flip_torus(inv) if move.flip else inv, move.shift)


def torus_orbit(inv: TorusInvariant) -> list[tuple[Move, TorusInvariant]]:
    return [(c.move, realize(inv, c.move)) for c in _torus_candidates(inv)]


def _close_candidates(a: _Candidate, b: _Candidate, t0: float, scale: float, tol: float) -> bool:
    return (_close_tau(a.tau, b.tau, t0, tol) and _close_marks(a.marks, b.marks, 1.0, tol)
            and bool(np.max(np.abs(a.samples - b.samples)) <= tol * scale))


def torus_witness(a: TorusInvariant, b: TorusInvariant, tol: float = 1e-7):
    """Moves (m_a, m_b) with m_a(a) close to m_b(b), or None."""
    if not _same_t0(a.t0, b.t0, tol) or len(a.marks) != len(b.marks):
        return None
    target = _torus_candidates(b, only_first=True)
    if not target:
        return None
    scale = max(a.fbar.scale, b.fbar.scale)
    for cand in _torus_candidates(a):
        if _close_candidates(cand, target[0], a.t0, scale, tol):
            return cand.move, target[0].move
    return None


def equivalent_tori(a: TorusInvariant, b: TorusInvariant, tol: float = 1e-7) -> bool:
    return torus_witness(a, b, tol) is not None


def _key(c: _Candidate, inv: TorusInvariant) -> list[float]:
    marks = sorted(0.0 if 1.0 - x <= 1e-12 else x for x in c.marks)
    tau = 0.0 if inv.t0 - c.tau <= 1e-12 * inv.t0 else c.tau
    return list(c.samples / inv.fbar.scale) + marks + [tau / inv.t0]


def _lex_less(u, v, tol: float) -> bool:
    for x, y in zip(u, v):
        if abs(x - y) > tol:
            return x < y
    return False


def canonical_torus(inv: TorusInvariant, tol: float = 1e-7) -> TorusInvariant:
    """The lexicographically least anchored representative of the class."""
    problems = validate_torus(inv)
    if problems:
        raise InvariantError("; ".join(problems))
    best, best_key = None, None
    for cand in _torus_candidates(inv):
        key = _key(cand, inv)
        if best is None or _lex_less(key, best_key, tol):
            best, best_key = cand, key
    return _snap(realize(inv, best.move))


def _snap(inv: TorusInvariant) -> TorusInvariant:
    tau = 0.0 if inv.t0 - inv.tau <= 1e-12 * inv.t0 else inv.tau
    marks = tuple(sorted(0.0 if 1.0 - x <= 1e-12 else x for x in inv.marks))
    return replace(inv, tau=tau, marks=marks)


def close_bottles1(a: BottleInvariant1, b: BottleInvariant1, tol: float = 1e-7) -> bool:
    return (_same_t0(a.t0, b.t0, tol) and _close_marks(a.marks, b.marks, 1.0, tol)
            and _close_profiles(a.fbar, b.fbar, tol))


def equivalent_bottles1(a: BottleInvariant1, b: BottleInvariant1, tol: float = 1e-7) -> bool:
    return bottle1_witness(a, b, tol) is not None


def bottle1_witness(a: BottleInvariant1, b: BottleInvariant1, tol: float = 1e-7):
    if not _same_t0(a.t0, b.t0, tol) or len(a.marks) != len(b.marks):
        return None
    zb = _zero_shifts(b.fbar)
    if not zb:
        return None
    target = shift_bottle1(b, zb[0])
    for flip in (False, True):
        base = flip_bottle1(a) if flip else a
        for y in _zero_shifts(base.fbar):
            if close_bottles1(shift_bottle1(base, y), target, tol):
                return Move(flip, y, 0), Move(False, zb[0], 0)
    return None


def close_bottles2(a: BottleInvariant2, b: BottleInvariant2, tol: float = 1e-7) -> bool:
    return (_same_t0(a.t0, b.t0, tol) and _close_marks(a.marks, b.marks, 2.0, tol)
            and _close_profiles(a.fbar, b.fbar, tol))


def equivalent_bottles2(a: BottleInvariant2, b: BottleInvariant2, tol: float = 1e-7) -> bool:
    return close_bottles2(a, b, tol) or close_bottles2(swap_bottle2(a), b, tol)


def equivalent_elementary(a: ElementaryInvariant, b: ElementaryInvariant, tol: float = 1e-7) -> bool:
    """Flip (tau -> -tau, fbar reversed) and arbitrary translations of fbar."""
    if not _same_t0(a.t0, b.t0, tol):
        return False
    if a.fbar.is_constant() or b.fbar.is_constant():
        same_f = (a.fbar.is_constant() and b.fbar.is_constant()
                  and abs(float(a.fbar.f(0.0)) - float(b.fbar.f(0.0))) <= tol * max(a.fbar.scale, b.fbar.scale))
        return same_f and (_close_tau(a.tau, b.tau, a.t0, tol) or _close_tau(-a.tau, b.tau, a.t0, tol))
    if not same_class(a.fbar, b.fbar):
        return False
    return _close_tau(a.tau, b.tau, a.t0, tol) or _close_tau(-a.tau, b.tau, a.t0, tol)


def equivalent(a: Invariant, b: Invariant, tol: float = 1e-7) -> bool:
    if type(a) is not type(b):
        raise LksError(f"cannot compare a {kind_of(a)} with a {kind_of(b)}")
    fn = {TorusInvariant: equivalent_tori, BottleInvariant1: equivalent_bottles1,
          BottleInvariant2: equivalent_bottles2, ElementaryInvariant: equivalent_elementary}[type(a)]
    return fn(a, b, tol)


# -- text form ---------------------------------------------------------------------

KINDS = {TorusInvariant: "torus", ElementaryInvariant: "elementary",
         BottleInvariant1: "bottle1", BottleInvariant2: "bottle2"}


def kind_of(inv: Invariant) -> str:
    return KINDS[type(inv)]


def to_text(inv: Invariant) -> str:
    lines = [f"kind = {kind_of(inv)}", f"t0 = {inv.t0!r}"]
    if hasattr(inv, "tau"):
        lines.append(f"tau = {inv.tau!r}")
    lines.append(f"function = {inv.fbar.text}")
    lines.append(f"domain = periodic:{inv.fbar.domain.T!r}")
    if hasattr(inv, "marks"):
        lines.append("marks = [" + ", ".join(repr(x) for x in inv.marks) + "]")
    return "\n".join(lines) + "\n"


def parse_marks(text: str) -> tuple[float, ...]:
    t = text.strip()
    if t.startswith("[") and t.endswith("]"):
        t = t[1:-1]
    items = [s for s in (p.strip() for p in t.replace(",", " ").split()) if s]
    try:
        return tuple(float(s) for s in items)
    except ValueError as err:
        raise ConfigError(f"bad marks list {text!r}") from err


def from_text(text: str) -> Invariant:
    cfg = parse_config(text)
    for key in ("kind", "t0", "function", "domain"):
        if key not in cfg:
            raise ConfigError(f"missing key {key!r}")
    kind = cfg["kind"]
    dom = parse_domain(cfg["domain"])
    try:
        tol = float(cfg.get("tol", 1e-9))
        t0 = float(cfg["t0"])
        tau = float(cfg.get("tau", 0.0))
    except ValueError as err:
        raise ConfigError(str(err)) from None
    fbar = FunctionProfile(ex.parse(cfg["function"]), dom, tol)
    marks = parse_marks(cfg.get("marks", "[]"))
    if kind == "torus":
        inv = TorusInvariant(t0, tau, fbar, marks)
    elif kind == "elementary":
        inv = ElementaryInvariant(t0, tau, fbar)
    elif kind == "bottle1":
        inv = BottleInvariant1(t0, fbar, marks)
    elif kind == "bottle2":
        inv = BottleInvariant2(t0, fbar, marks)
    else:
        raise ConfigError(f"unknown invariant kind {kind!r}")
    return inv
