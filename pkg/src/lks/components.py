"""Sign sequences and the connected-component indices of the space of
Lorentzian metrics on tori and Klein bottles."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import LksError
from .fnprofile import FunctionProfile


@dataclass(frozen=True)
class SignSeq:
    signs: tuple[int, ...]
    cyclic: bool = False

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.signs):
            raise LksError("signs must be +1 or -1")
        object.__setattr__(self, "signs", tuple(self.signs))

    @classmethod
    def from_text(cls, text: str) -> "SignSeq":
        text = text.strip()
        cyclic = text.startswith("cyclic:")
        body = text[len("cyclic:"):] if cyclic else text
        if any(c not in "+-" for c in body):
            raise LksError(f"sign sequence may only contain '+' and '-': {text!r}")
        return cls(tuple(1 if c == "+" else -1 for c in body), cyclic)

    def __str__(self):
        body = "".join("+" if s > 0 else "-" for s in self.signs)
        return ("cyclic:" if self.cyclic else "") + body

    def __len__(self):
        return len(self.signs)

    @property
    def exponents(self) -> tuple[int, ...]:
        """s_j with sign (-1)^{s_j}."""
        return tuple(0 if s > 0 else 1 for s in self.signs)

    def alternating_sum(self) -> int:
        """sum_j (-1)^(j + s_j), with j counted from 1."""
        return sum((-1) ** (j + 1) * s for j, s in enumerate(self.signs))


def _reduce_linear(signs: Sequence[int]) -> list[int]:
    # A stack performs the same cancellations as repeatedly deleting the
    # first equal adjacent pair.
    out: list[int] = []
    for s in signs:
        if out and out[-1] == s:
            out.pop()
        else:
            out.append(s)
    return out


def reduce(seq: SignSeq) -> SignSeq:
    """Cancel adjacent equal signs until none are left (across the seam too
    when the sequence is cyclic)."""
    out = _reduce_linear(seq.signs)
    if seq.cyclic:
        while len(out) >= 2 and out[0] == out[-1]:
            out = out[1:-1]
    return SignSeq(tuple(out), seq.cyclic)


def enrollment(seq: SignSeq) -> Fraction:
    """Signed number of turns of the light cones along a transversal."""
    if seq.cyclic:
        raise LksError("enrollment is defined for linear sequences")
    return Fraction(seq.alternating_sum(), 4)


# -- tori --------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusComponentIndex:
    r: int
    k_plus: int
    k_minus: int


def mark_signs(fbar: FunctionProfile, marks: Iterable[float]) -> tuple[int, ...]:
    out = []
    for x in marks:
        v = float(fbar.f(x))
        if not np.isfinite(v) or abs(v) <= fbar.tol * fbar.scale:
            raise LksError(f"mark {x} does not lie in a component of f != 0")
        out.append(1 if v > 0 else -1)
    return tuple(out)


def torus_r_from_signs(signs: Sequence[int]) -> TorusComponentIndex:
    seq = SignSeq(tuple(signs), cyclic=True)
    if len(seq) % 2:
        raise LksError("a torus marking has even cardinality")
    total = seq.alternating_sum()
    L = len(reduce(seq))
    if abs(total) != L:
        raise LksError(f"inconsistent reduction: L={L}, sum={total}")
    n = len(seq)
    return TorusComponentIndex(L // 2, (n + total) // 2, (n - total) // 2)


def torus_r(inv) -> TorusComponentIndex:
    return torus_r_from_signs(mark_signs(inv.fbar, inv.marks))


ALL_COMPONENTS = "AllComponents"
FLAT_ONLY = "FlatOnly"


def changes_sign(profile: FunctionProfile) -> bool:
    vals = profile.f(profile.grid())
    vals = vals[np.isfinite(vals)]
    thr = profile.tol * profile.scale
    return bool(np.any(vals > thr) and np.any(vals < -thr))


def torus_component_set(profile: FunctionProfile) -> str:
    if not profile.periodic:
        raise LksError("torus components need a periodic profile")
    return ALL_COMPONENTS if changes_sign(profile) else FLAT_ONLY


# -- Klein bottles -----------------------------------------------------------------

@dataclass(frozen=True)
class BottleComponentIndex:
    n_abs: int
    m_bar: int | None
    temporal_orientable: bool
    spatial_orientable: bool

    def __str__(self):
        m = "-" if self.m_bar is None else str(self.m_bar)
        return f"({self.n_abs}, {m})"


def bottle1_from_signs(signs: Sequence[int]) -> BottleComponentIndex:
    if len(signs) % 2 == 0:
        raise LksError("a type-1 bottle marking has odd cardinality")
    temporal = sum(1 for s in signs if s < 0) % 2 == 0
    return BottleComponentIndex(0, 0 if temporal else 1, temporal, not temporal)


def bottle1_component(inv) -> BottleComponentIndex:
    return bottle1_from_signs(mark_signs(inv.fbar, inv.marks))


def bottle2_from_signs(signs: Sequence[int]) -> BottleComponentIndex:
    """Signs at the marks of [0, 1] in increasing order; the ends are the
    two core curves."""
    k = len(signs)
    if k < 2:
        raise LksError("a type-2 bottle has two core curves")
    seq = SignSeq(tuple(signs))
    s = seq.exponents
    if (s[0] + s[-1] + k) % 2 == 0:
        n_abs = len(reduce(SignSeq(seq.signs[1:-1])))
    else:
        n_abs = len(reduce(SignSeq(seq.signs[:-1])))
    if (n_abs - s[0] - s[-1]) % 2:
        raise LksError("parity check failed for n_abs")
    if n_abs % 2:
        return BottleComponentIndex(n_abs, None, False, False)
    temporal = signs[0] < 0 and signs[-1] < 0
    spatial = signs[0] > 0 and signs[-1] > 0
    return BottleComponentIndex(n_abs, 0 if temporal else 1, temporal, spatial)


def bottle2_nabs_sum(signs: Sequence[int]) -> int:
    """n_abs from the half-turn count along a meridian (independent check)."""
    k = len(signs)
    s = SignSeq(tuple(signs)).exponents
    twice = (-1) ** (k + s[-1]) - (-1) ** s[0]
    twice += 2 * sum((-1) ** (j + s[j - 1]) for j in range(2, k))
    return abs(twice) // 2


def bottle2_nabs(inv) -> BottleComponentIndex:
    half = [x for x in inv.marks if -1e-12 <= x <= 1 + 1e-12]
    return bottle2_from_signs(mark_signs(inv.fbar, half))


@dataclass(frozen=True)
class ComponentFamily:
    """A set of indices (n, m) in Z x Z/2: n ranges over {0}, 2Z or Z."""
    n_range: str  # "0", "2Z" or "Z"
    m_values: tuple[int, ...]

    def __contains__(self, item) -> bool:
        n, m = item
        ok_n = n == 0 if self.n_range == "0" else (n % 2 == 0 if self.n_range == "2Z" else True)
        return ok_n and m in self.m_values

    def __str__(self):
        if self.n_range == "Z" and self.m_values == (0, 1):
            return "Z x Z/2"
        ms = ", ".join(f"{m}bar" for m in self.m_values)
        if self.n_range == "0":
            return "{" + ", ".join(f"(0, {m}bar)" for m in self.m_values) + "}"
        return f"{self.n_range} x {{{ms}}}"


def bottle1_component_set(profile: FunctionProfile) -> ComponentFamily:
    if not profile.periodic:
        raise LksError("bottle components need a periodic profile")
    if changes_sign(profile):
        return ComponentFamily("0", (0, 1))
    vals = profile.f(profile.grid())
    positive = np.nanmax(vals) > 0
    return ComponentFamily("0", (0,) if positive else (1,))


def bottle2_component_set(profile: FunctionProfile) -> ComponentFamily:
    """Components reached by type-2 bottles over an even profile with
    period 2m; the core curves sit over 0 and m."""
    if not profile.periodic:
        raise LksError("bottle components need a periodic profile")
    T = profile.domain.T
    xs = profile.grid()
    if np.max(np.abs(profile.f(-xs) - profile.f(xs))) > profile.tol * profile.scale:
        raise LksError("type-2 bottles need an even profile")
    m = T / 2
    f0, fm = float(profile.f(0.0)), float(profile.f(m))
    thr = profile.tol * profile.scale
    if abs(f0) <= thr or abs(fm) <= thr:
        raise LksError("type-2 bottles need f(0) f(m) != 0")
    if not changes_sign(profile):
        return ComponentFamily("0", (1,) if f0 > 0 else (0,))
    if f0 * fm > 0:
        return ComponentFamily("2Z", (1,) if f0 > 0 else (0,))
    return ComponentFamily("Z", (0, 1))
