"""Geodesics of 2 dx dy + f(x) dy^2 and conjugate points.

For a geodesic (x, y)(t) with velocity (p, q) = (x', y'):

    y'' = f'(x) q^2 / 2
    x'' = -f'(x) q (p + f(x) q / 2)

C = f q + p (Clairaut) and E = f q^2 + 2 p q (energy) are first integrals,
and together they give the reduced equation p^2 = C^2 - E f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import DOP853, quad, solve_ivp
from scipy.optimize import brentq

from .errors import EvaluationError, IntegrationEscaped, LksError
from .fnprofile import FunctionProfile, components, critical_points, find_zeros

BLOW_UP = 1e9
RTOL = 1e-12
ATOL = 1e-13


def geodesic_rhs(state, profile: FunctionProfile) -> np.ndarray:
    x, _, p, q = state
    f = profile.f_scalar(x)
    df = profile.df_scalar(x)
    if not (math.isfinite(f) and math.isfinite(df)):
        raise EvaluationError(f"f is not finite at x={x!r}")
    return np.array([p, q, -df * q * (p + 0.5 * f * q), 0.5 * df * q * q])


def clairaut(profile: FunctionProfile, state) -> float:
    x, _, p, q = state
    return float(profile.f(x)) * q + p


def energy(profile: FunctionProfile, state) -> float:
    x, _, p, q = state
    return float(profile.f(x)) * q * q + 2 * p * q


COMPLETED = "Completed"
BLEW_UP = "BlowUp"
EXITED = "Exited"


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    states: np.ndarray  # rows (x, y, p, q)
    status: str
    t_stop: float
    C: np.ndarray
    E: np.ndarray

    @property
    def drift_C(self) -> float:
        return float(np.max(np.abs(self.C - self.C[0])))

    @property
    def drift_E(self) -> float:
        return float(np.max(np.abs(self.E - self.E[0])))

    def reduced_residual(self, profile: FunctionProfile, eps: float, C: float) -> float:
        """max |p^2 - (C^2 - eps f(x))| along the samples."""
        x, p = self.states[:, 0], self.states[:, 2]
        return float(np.max(np.abs(p * p - (C * C - eps * profile.f(x)))))

    def table(self) -> str:
        lines = ["t x y p q C E"]
        for t, (x, y, p, q), c, e in zip(self.t, self.states, self.C, self.E):
            lines.append(" ".join(f"{v:.12e}" for v in (t, x, y, p, q, c, e)))
        return "\n".join(lines) + "\n"


STALLED = "Stalled"


def integrate(state, profile: FunctionProfile, t_end: float, *, n_samples: int = 201,
              rtol: float = RTOL, atol: float = ATOL, blow_up: float = BLOW_UP,
              max_steps: int = 200_000) -> Trajectory:
    """Integrate with an adaptive 8th-order Runge-Kutta scheme (DOP853).

    Stops early on blow-up (|p| + |q| > blow_up, or the step size collapsing
    while the velocity is already large), when x leaves an interval domain,
    or after ``max_steps`` steps; the status and stopping time are recorded.
    Samples are taken on a uniform grid of [0, t_end] up to the stop.
    """
    s0 = np.asarray(state, dtype=float)
    if s0.shape != (4,) or not np.all(np.isfinite(s0)):
        raise LksError("initial state must be four finite numbers (x, y, p, q)")
    if not profile.contains(s0[0]):
        raise LksError(f"x={s0[0]!r} is outside the domain {profile.domain}")
    bounded = not profile.periodic
    lo, hi = (profile.domain.a, profile.domain.b) if bounded else (-math.inf, math.inf)

    solver = DOP853(lambda t, s: geodesic_rhs(s, profile), 0.0, s0, float(t_end),
                    rtol=rtol, atol=atol)
    grid = np.linspace(0.0, float(t_end), n_samples)
    ts, states = [0.0], [s0.copy()]
    k = 1
    status = COMPLETED
    speed0 = abs(s0[2]) + abs(s0[3])
    steps = 0
    while solver.status == "running":
        msg = solver.step()
        steps += 1
        if solver.status == "failed":
            if abs(solver.y[2]) + abs(solver.y[3]) > 1e3 * max(1.0, speed0):
                status = BLEW_UP
                break
            raise IntegrationEscaped(str(msg))
        dense = solver.dense_output() if k < n_samples and grid[k] <= solver.t else None
        while k < n_samples and grid[k] <= solver.t:
            ts.append(grid[k])
            states.append(dense(grid[k]))
            k += 1
        y = solver.y
        if abs(y[2]) + abs(y[3]) > blow_up or not np.all(np.isfinite(y)):
            status = BLEW_UP
            break
        if bounded and not (lo < y[0] < hi and abs(y[0]) < blow_up):
            status = EXITED
            t_exit = _exit_time(solver, lo, hi, blow_up)
            break
        if steps >= max_steps and solver.status == "running":
            status = STALLED
            break
    t_stop = float(solver.t)
    last = solver.y.copy()
    if status == EXITED:
        t_stop = t_exit
        last = solver.dense_output()(t_stop)
        while ts[-1] > t_stop:
            ts.pop()
            states.pop()
    if ts[-1] < t_stop:
        ts.append(t_stop)
        states.append(last)
    ts = np.array(ts)
    states = np.array(states)
    f = profile.f(states[:, 0])
    C = f * states[:, 3] + states[:, 2]
    E = f * states[:, 3] ** 2 + 2 * states[:, 2] * states[:, 3]
    return Trajectory(ts, states, status, t_stop, C, E)


def _exit_time(solver, lo, hi, cap) -> float:
    """Time within the last step at which x first reaches the domain edge."""
    dense = solver.dense_output()
    t0, t1 = solver.t_old, solver.t
    x1 = solver.y[0]
    edge = hi if x1 >= hi else lo if x1 <= lo else math.copysign(cap, x1)

    def g(t):
        return dense(t)[0] - edge

    if g(t0) * g(t1) > 0:
        return float(t1)
    return float(brentq(g, t0, t1, xtol=1e-14, maxiter=200))


def initial_state(profile: FunctionProfile, x0: float, y0: float, eps: float, C: float,
                  sign: int = 1) -> np.ndarray:
    """Velocity at x0 with Clairaut constant C and energy eps, p of the given sign."""
    disc = C * C - eps * float(profile.f(x0))
    if disc < 0:
        raise LksError(f"no geodesic with C={C!r}, eps={eps!r} passes through x={x0!r}")
    p = math.copysign(math.sqrt(disc), sign)
    if C + p == 0:
        if eps != 0:
            raise LksError("degenerate initial data: C + p = 0")
        return np.array([x0, y0, p, 0.0])
    return np.array([x0, y0, p, eps / (C + p)])


# -- conjugate points ---------------------------------------------------------------

@dataclass(frozen=True)
class Disconnection:
    a: float
    b: float
    C: float  # possibly nudged so that eps C^2 is a regular value


def _nudge(profile: FunctionProfile, eps: float, C: float) -> float:
    level = eps * C * C
    crit = [float(profile.f(c)) for c in critical_points(profile)]
    tol = 1e-8 * profile.scale
    step = 0
    while any(abs(eps * v - level) <= tol for v in crit) and step < 10:
        step += 1
        C = C + 1e-7 * math.copysign(1.0, C)
        level = eps * C * C
    return C


def disconnection_test(profile: FunctionProfile, eps: int, C: float) -> Disconnection | None:
    """A relatively compact component (a, b) of {eps f < C^2} with simple ends."""
    if eps not in (1, -1):
        raise LksError("eps must be +1 or -1")
    if C == 0:
        raise LksError("C must be non-zero")
    C = _nudge(profile, eps, C)
    level = C * C

    def g(x):
        return eps * profile.f(x) - level

    lo, hi = profile.window()
    if profile.periodic:
        lo, hi = lo - 0.5 * profile.domain.T, hi + 0.5 * profile.domain.T
    xs = np.linspace(lo, hi, 4 * profile.grid_n + 1)
    vals = g(xs)
    roots = []
    for i in range(len(xs) - 1):
        v0, v1 = vals[i], vals[i + 1]
        if np.isfinite(v0) and np.isfinite(v1) and v0 * v1 < 0:
            roots.append((brentq(g, xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15, maxiter=200), v0 > 0))
    start = profile.window()[0]
    for (a, down), (b, _) in zip(roots, roots[1:]):
        if not down or (profile.periodic and a < start):
            continue
        if abs(float(profile.df(a))) <= profile.tol or abs(float(profile.df(b))) <= profile.tol:
            continue
        return Disconnection(float(a), float(b), C)
    return None


def arrival_time(profile: FunctionProfile, eps: float, C: float, a: float, b: float) -> float:
    """Integral of dx / sqrt(C^2 - eps f) over (a, b), with x = a + u^2 and
    x = b - u^2 removing the inverse square roots at the turning points."""
    m = 0.5 * (a + b)
    level = C * C

    def piece(x_end, sign, slope):
        # slope = -eps f'(x_end) * sign > 0 controls the u -> 0 limit
        lim = 2.0 / math.sqrt(slope)

        def integrand(u):
            u2 = u * u
            if u2 < 1e-14 * (b - a):
                return lim
            d = level - eps * profile.f_scalar(x_end + sign * u2)
            return 2.0 * u / math.sqrt(max(d, 1e-300))

        val, _ = quad(integrand, 0.0, math.sqrt(abs(m - x_end)), epsabs=0.0, epsrel=1e-13, limit=200)
        return val

    sa = -eps * float(profile.df(a))
    sb = eps * float(profile.df(b))
    if sa <= 0 or sb <= 0:
        raise LksError("turning points are not simple")
    return piece(a, 1.0, sa) + piece(b, -1.0, sb)


FOUND = "Found"
NOT_FOUND = "NotFound"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True, eq=False)
class ConjugateReport:
    status: str
    eps: int
    C: float
    a: float | None = None
    b: float | None = None
    t_b: float | None = None
    t_b_quadrature: float | None = None
    x_arrival: float | None = None
    p_start: float | None = None
    p_arrival: float | None = None
    trajectory: Trajectory | None = field(default=None, repr=False)
    note: str = ""

    @property
    def relative_gap(self) -> float | None:
        if self.t_b is None or self.t_b_quadrature is None:
            return None
        return abs(self.t_b - self.t_b_quadrature) / abs(self.t_b_quadrature)


def conjugate_search(profile: FunctionProfile, eps: int, C: float,
                     agreement: float = 1e-5, x_tol: float = 1e-6) -> ConjugateReport:
    """Look for a geodesic tangent to the Killing field at two points.

    Start at (a, 0) with velocity eps/C times d/dy; along the geodesic
    p^2 = C^2 - eps f, so p vanishes again exactly at the far end b of the
    component of {eps f < C^2}.  The Killing field is a Jacobi field that is
    tangent to the geodesic at both ends, which gives a pair of conjugate points.
    """
    disc = disconnection_test(profile, eps, C)
    if disc is None:
        return ConjugateReport(NOT_FOUND, eps, C, note="{eps f < C^2} does not disconnect the line")
    a, b, C = disc.a, disc.b, disc.C
    t_quad = arrival_time(profile, eps, C, a, b)
    s0 = np.array([a, 0.0, 0.0, eps / C])

    def rhs(t, s):
        return geodesic_rhs(s, profile)

    def tangency(t, s):
        return s[2]
    tangency.terminal = True
    tangency.direction = -1

    sol = solve_ivp(rhs, (0.0, 4.0 * t_quad), s0, method="DOP853", rtol=RTOL, atol=ATOL,
                    events=[tangency], dense_output=True)
    common = dict(eps=eps, C=C, a=a, b=b, t_b_quadrature=t_quad)
    if not sol.t_events[0].size:
        return ConjugateReport(INCONCLUSIVE, note="second tangency not bracketed", **common)
    t_b = float(sol.t_events[0][0])
    end = sol.y_events[0][0]
    ts = np.linspace(0.0, t_b, 401)
    states = sol.sol(ts).T
    states[0], states[-1] = s0, end
    f = profile.f(states[:, 0])
    traj = Trajectory(ts, states, COMPLETED, t_b, f * states[:, 3] + states[:, 2],
                      f * states[:, 3] ** 2 + 2 * states[:, 2] * states[:, 3])
    report = dict(t_b=t_b, x_arrival=float(end[0]), p_start=0.0, p_arrival=float(end[2]),
                  trajectory=traj, **common)
    gap = abs(t_b - t_quad) / t_quad
    if abs(end[0] - b) > x_tol * max(1.0, abs(b)):
        return ConjugateReport(INCONCLUSIVE, note=f"tangency at x={end[0]!r}, expected {b!r}", **report)
    if gap > agreement:
        return ConjugateReport(INCONCLUSIVE, note=f"arrival times disagree (relative gap {gap:.3e})", **report)
    return ConjugateReport(FOUND, **report)


# -- tori without conjugate points -----------------------------------------------------

@dataclass(frozen=True)
class CPCheck:
    holds: bool
    failures: tuple[str, ...]


def _df_sign_changes(profile: FunctionProfile, left: float, right: float, n: int = 2048) -> int:
    xs = np.linspace(left, right, n + 2)[1:-1]
    d = profile.df(xs)
    thr = 1e-9 * max(1.0, float(np.max(np.abs(d))))
    s = np.sign(np.where(np.abs(d) <= thr, 0.0, d))
    s = s[s != 0]
    return int(np.sum(s[1:] != s[:-1]))


def cp_conditions(profile: FunctionProfile, marks) -> CPCheck:
    """Whether a marked periodic profile gives tori free of conjugate points:
    locally finite components, every component marked, alternating signs,
    and f' changing sign once per component."""
    if not profile.periodic:
        raise LksError("a periodic profile is needed")
    failures = []
    try:
        find_zeros(profile)
        comps = components(profile)
    except LksError as err:
        return CPCheck(False, (f"(1) components are not locally finite: {err}",))
    if comps.elementary or not comps.zeros:
        failures.append("(1) f has no zero, so there is no component structure")
        return CPCheck(False, tuple(failures))
    T = profile.domain.T
    located = {comps.locate(float(x) % T) for x in marks}
    for i, c in enumerate(comps):
        if i not in located:
            failures.append(f"(2) component ({c.left:.6g}, {c.right:.6g}) carries no mark")
    n = len(comps)
    for i in range(n if comps.cyclic else n - 1):
        c, d = comps[i], comps[(i + 1) % n]
        if c.sign == d.sign:
            failures.append(f"(3) consecutive components ({c.left:.6g}, {c.right:.6g}) and "
                            f"({d.left:.6g}, {d.right:.6g}) have the same sign")
    for c in comps:
        k = _df_sign_changes(profile, c.left, c.right)
        if k != 1:
            failures.append(f"(4) f' changes sign {k} times on ({c.left:.6g}, {c.right:.6g})")
    return CPCheck(not failures, tuple(failures))
