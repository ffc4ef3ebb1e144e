"""Command line entry point: ``lks <command> ...``.

Every command builds one ordered document; ``--format structured`` prints it
as indented ``key: value`` text with fixed key order, and the default human
format is a lighter rendering of the same document.

Exit codes: 0 success, 1 domain or validation error, 2 parse error.
"""

from __future__ import annotations

import argparse
import math
import sys
from collections.abc import Sequence

import numpy as np

from . import classify as cl
from . import components as cp
from . import expr as ex
from . import extension as ext
from . import geodesics as geo
from . import isogroup as ig
from .errors import ConfigError, ExprSyntaxError, InvalidRow, LksError
from .fnprofile import (FunctionProfile, components, contiguity_graph, detect_symmetry, find_zeros,
                        load_profile, parse_config)
from .svg import plot

# -- rendering -----------------------------------------------------------------------


def _fmt(v, digits: int) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if v == 0:
            return "0"
        return f"{v:.{digits}g}"
    return str(v)


def _inline(v, digits: int) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_inline(x, digits) for x in v) + "]"
    return _fmt(v, digits)


def _is_block(v) -> bool:
    return isinstance(v, dict) or (isinstance(v, list) and any(isinstance(x, dict) for x in v))


def render(doc: dict, digits: int = 10, human: bool = False, indent: int = 0) -> list[str]:
    pad = "  " * indent
    out = []
    for key, val in doc.items():
        name = (key[:1].upper() + key[1:]).replace("_", " ") if human else key
        if isinstance(val, dict):
            out.append(f"{pad}{name}:")
            out += render(val, digits, human, indent + 1)
        elif _is_block(val):
            out.append(f"{pad}{name}:" + (" none" if human and not val else ""))
            for item in val:
                sub = render(item, digits, human, indent + 2)
                out.append(f"{pad}  - " + sub[0].lstrip())
                out += sub[1:]
        elif isinstance(val, list) and not val:
            out.append(f"{pad}{name}: " + ("none" if human else "[]"))
        else:
            out.append(f"{pad}{name}: {_inline(val, digits)}")
    return out


def emit(doc: dict, fmt: str) -> str:
    if fmt == "structured":
        return "\n".join(render(doc)) + "\n"
    return "\n".join(render(doc, digits=6, human=True)) + "\n"


def _sign(s: int) -> str:
    return "+" if s > 0 else ("-" if s < 0 else "0")


# -- argument helpers ------------------------------------------------------------------

def number(text: str) -> float:
    """A constant written as an expression: 1.5, pi/4, -2*pi."""
    e = ex.parse(text)
    v = ex.evaluate(e, 0.0)
    if ex.evaluate(e, 1.2345) != v or not math.isfinite(v):
        raise ConfigError(f"expected a finite constant, got {text!r}")
    return v


def numbers(text: str) -> list[float]:
    t = text.strip()
    if t.startswith("[") and t.endswith("]"):
        t = t[1:-1]
    return [number(s) for s in t.split(",") if s.strip()]


def marks_arg(text: str | None):
    if text is None:
        return []
    if text.strip() == "all":
        return "all"
    if text.strip() in ("", "none"):
        return []
    return numbers(text)


def _profile(args) -> FunctionProfile:
    if not args.profile:
        raise ConfigError("--profile is required")
    return load_profile(args.profile)


def _load_invariant(path: str):
    with open(path, encoding="utf-8") as fh:
        return cl.from_text(fh.read())


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _profile_doc(p: FunctionProfile) -> dict:
    return {"function": p.text, "domain": str(p.domain)}


# -- commands --------------------------------------------------------------------------

def cmd_analyze(args) -> dict:
    p = _profile(args)
    if p.is_constant():
        raise LksError(f"constant profile {p.text}: the metric is flat (curvature 0); "
                       "the analysis needs a non-constant f")
    zeros = find_zeros(p)
    comps = components(p)
    graph = contiguity_graph(comps)
    sym = detect_symmetry(p)
    leaves = ext.leaf_space(p)
    doc = {
        "command": "analyze",
        "profile": _profile_doc(p),
        "zeros": [{"x0": z.x0, "kind": z.kind, "lambda": z.lam,
                   "light_leaf": str(ext.light_leaf_complete(p, z))} for z in zeros],
        "components": [{"left": c.left, "right": c.right, "sign": _sign(c.sign)} for c in comps],
        "graph": {"vertices": graph.n, "edges": [[e.u, e.v] for e in graph.edges],
                  "partition": [list(b) for b in graph.partition]},
        "symmetry": {"case": sym.label, "period": sym.period,
                     "reflection_centers": list(sym.reflection_centers), "subtype": sym.subtype},
        "squares": [{"left": s.left, "right": s.right, "width": s.width,
                     "end_kinds": list(s.end_kinds), "sign": _sign(s.sign)} for s in ext.squares(p)],
        "half_bands": [{"left": b.left, "right": b.right, "width": b.width,
                        "end_kinds": list(b.end_kinds), "type": b.band_type} for b in ext.half_bands(p)],
        "leaf_space": {
            "cyclic": leaves.cyclic,
            "segments": [{"tag": s.tag, "left": s.left, "right": s.right, "sign": _sign(s.sign)}
                         for s in leaves.segments],
            "junctions": [{"x0": j.x0, "tag": j.tag, "branch_points": j.branch_points}
                          for j in leaves.junctions],
            "branch_points": leaves.branch_points,
        },
    }
    if args.plot:
        lo, hi = p.window()
        xs = np.linspace(lo, hi, 801)
        _write(args.plot, plot([(xs, p.f(xs))], title=f"f(x) = {p.text}", xlabel="x", ylabel="f",
                               vlines=[z.x0 for z in zeros]))
    return doc


def _case_from_args(args) -> tuple[ig.CaseData, FunctionProfile | None]:
    if args.case is not None:
        if args.k is None or args.ell is None:
            raise ConfigError("--case needs --k and --ell")
        return ig.make_case(args.case, args.k, args.ell), None
    p = _profile(args)
    if p.is_constant():
        raise LksError(f"constant profile {p.text}: the metric is flat and every quotient is a flat surface")
    sym = detect_symmetry(p)
    return ig.kl_invariants(contiguity_graph(p), sym), p


def cmd_quotients(args) -> dict:
    case, p = _case_from_args(args)
    doc = {"command": "quotients"}
    if p is not None:
        doc["profile"] = _profile_doc(p)
    doc.update({"case": case.case, "k": case.k, "ell": case.ell, "nu_K": case.nu_K})
    try:
        orb = ig.orbifold(case)
        doc["orbifold"] = {"surface": orb.surface, "elliptic_points": orb.n_elliptic,
                           "interior_cusps": orb.p_int, "boundary_cusps": orb.p_bd}
    except InvalidRow as err:
        if args.case is not None:
            raise
        doc["orbifold"] = {"undetermined": str(err)}
    if case.case not in ig.LABELS:
        doc["note"] = "subtype undetermined: no census rows"
        return doc
    if not case.has_elliptic_products:
        doc["note"] = "no elliptic products: the minimal indices are nu = nu_K = 2"
        return doc
    split = tuple(int(v) for v in args.split.split(",")) if args.split else None
    if case.case == "2+b" and split is None:
        raise InvalidRow("case 2+b needs --split k1,l1 (saddle and Euler counts of one side)")
    rows = ig.census(case, split)
    doc["rows"] = [{"j": r.j, "count": r.per_j, "signature": str(r.signature), "chi": r.chi}
                   for r in rows]
    doc["total"] = rows[0].total if rows else 0
    return doc


def _invariant_from_args(args):
    if args.invariant:
        inv = _load_invariant(args.invariant)
        problems = cl.validate(inv)
        if problems:
            raise LksError("invalid invariant: " + "; ".join(problems))
        return inv
    p = _profile(args)
    t0 = args.t0 if args.t0 is not None else 1.0
    tau = args.tau if args.tau is not None else 0.0
    kind = args.kind
    marks = marks_arg(args.marks)
    if kind == "torus":
        if not find_zeros(p):
            return cl.build_elementary(p, t0, tau)
        return cl.build_torus(p, t0, tau, marks)
    if kind == "bottle1":
        return cl.build_bottle1(p, t0, marks)
    if kind == "bottle2":
        return cl.build_bottle2(p, t0, [] if marks == "all" else marks)
    return cl.build_elementary(p, t0, tau)


def cmd_classify(args) -> dict:
    inv = _invariant_from_args(args)
    canon = cl.canonical_torus(inv) if isinstance(inv, cl.TorusInvariant) else inv
    text = cl.to_text(canon)
    if args.output:
        _write(args.output, text)
    doc = {"command": "classify", "kind": cl.kind_of(inv), "valid": True,
           "canonical": {k.strip(): v.strip() for k, v in
                         (line.split("=", 1) for line in text.splitlines())}}
    return doc


def cmd_compare(args) -> dict:
    a, b = _load_invariant(args.first), _load_invariant(args.second)
    if type(a) is not type(b):
        raise LksError(f"type mismatch: {cl.kind_of(a)} vs {cl.kind_of(b)}")
    for name, inv in (("first", a), ("second", b)):
        problems = cl.validate(inv)
        if problems:
            raise LksError(f"{name} invariant is invalid: " + "; ".join(problems))
    doc = {"command": "compare", "kind": cl.kind_of(a)}
    if isinstance(a, cl.TorusInvariant):
        w = cl.torus_witness(a, b, args.tol)
        doc["verdict"] = "EQUIVALENT" if w else "NOT EQUIVALENT"
        if w:
            doc["moves"] = {"first": str(w[0]), "second": str(w[1])}
    elif isinstance(a, cl.BottleInvariant1):
        w = cl.bottle1_witness(a, b, args.tol)
        doc["verdict"] = "EQUIVALENT" if w else "NOT EQUIVALENT"
        if w:
            doc["moves"] = {"first": str(w[0]), "second": str(w[1])}
    elif isinstance(a, cl.BottleInvariant2):
        if cl.close_bottles2(a, b, args.tol):
            doc.update(verdict="EQUIVALENT", moves={"first": "identity", "second": "identity"})
        elif cl.close_bottles2(cl.swap_bottle2(a), b, args.tol):
            doc.update(verdict="EQUIVALENT", moves={"first": "swap", "second": "identity"})
        else:
            doc["verdict"] = "NOT EQUIVALENT"
    else:
        doc["verdict"] = "EQUIVALENT" if cl.equivalent(a, b, args.tol) else "NOT EQUIVALENT"
    doc["tolerance"] = args.tol
    return doc


def _family_sets(p: FunctionProfile) -> dict:
    out = {"torus": cp.torus_component_set(p), "bottle1": str(cp.bottle1_component_set(p))}
    try:
        out["bottle2"] = str(cp.bottle2_component_set(p))
    except LksError as err:
        out["bottle2"] = f"not applicable ({err})"
    return out


def cmd_components(args) -> dict:
    doc = {"command": "components"}
    if args.invariant or args.marks is not None:
        inv = _invariant_from_args(args)
        doc["kind"] = cl.kind_of(inv)
        if isinstance(inv, cl.TorusInvariant):
            idx = cp.torus_r(inv)
            doc["signs"] = str(cp.SignSeq(cp.mark_signs(inv.fbar, inv.marks), cyclic=True))
            doc.update({"r": idx.r, "k_plus": idx.k_plus, "k_minus": idx.k_minus})
        elif isinstance(inv, cl.ElementaryInvariant):
            doc["r"] = 0
        else:
            if isinstance(inv, cl.BottleInvariant1):
                idx = cp.bottle1_component(inv)
                doc["signs"] = str(cp.SignSeq(cp.mark_signs(inv.fbar, inv.marks)))
            else:
                idx = cp.bottle2_nabs(inv)
                half = [x for x in inv.marks if x <= 1 + 1e-12]
                doc["signs"] = str(cp.SignSeq(cp.mark_signs(inv.fbar, half)))
            doc.update({"n_abs": idx.n_abs, "m_bar": idx.m_bar,
                        "temporal_orientable": idx.temporal_orientable,
                        "spatial_orientable": idx.spatial_orientable})
        profile = inv.fbar
    else:
        profile = _profile(args)
        doc["profile"] = _profile_doc(profile)
    if profile.periodic:
        doc["realizable"] = _family_sets(profile)
    return doc


def _initial(args, p: FunctionProfile) -> np.ndarray:
    if args.p0 is not None or args.q0 is not None:
        return np.array([args.x0, args.y0, args.p0 or 0.0, args.q0 or 0.0])
    if args.eps is None or args.C is None:
        raise ConfigError("give either --p0/--q0 or --eps and --C")
    return geo.initial_state(p, args.x0, args.y0, args.eps, args.C, sign=args.direction)


def cmd_geodesic(args) -> dict:
    p = _profile(args)
    s0 = _initial(args, p)
    tr = geo.integrate(s0, p, args.t_end, n_samples=args.samples)
    doc = {
        "command": "geodesic",
        "profile": _profile_doc(p),
        "initial": {"x": s0[0], "y": s0[1], "p": s0[2], "q": s0[3]},
        "C": tr.C[0], "E": tr.E[0],
        "status": tr.status, "t_stop": tr.t_stop,
        "drift": {"C": tr.drift_C, "E": tr.drift_E},
        "final": dict(zip("xypq", (float(v) for v in tr.states[-1]))),
    }
    if args.table:
        _write(args.table, tr.table())
    if args.plot:
        zeros = [z.x0 for z in find_zeros(p)] if not p.is_constant() else []
        _write(args.plot, plot([(tr.states[:, 0], tr.states[:, 1])], title="geodesic",
                               xlabel="x", ylabel="y", vlines=zeros))
    return doc


def cmd_conjugate(args) -> dict:
    p = _profile(args)
    if args.eps is None or args.C is None:
        raise ConfigError("conjugate needs --eps and --C")
    if args.eps not in (1, -1):
        raise LksError("--eps must be 1 or -1")
    r = geo.conjugate_search(p, int(args.eps), args.C)
    doc = {"command": "conjugate", "profile": _profile_doc(p), "eps": r.eps, "C": r.C,
           "status": r.status}
    if r.a is not None:
        doc["interval"] = [r.a, r.b]
        doc["t_a"] = 0.0
        doc["t_b"] = r.t_b
        doc["t_b_quadrature"] = r.t_b_quadrature
        doc["relative_gap"] = r.relative_gap
        doc["x_arrival"] = r.x_arrival
    if r.note:
        doc["note"] = r.note
    if r.trajectory is not None:
        doc["drift"] = {"C": r.trajectory.drift_C, "E": r.trajectory.drift_E}
        if args.table:
            _write(args.table, r.trajectory.table())
        if args.plot:
            st = r.trajectory.states
            _write(args.plot, plot([(st[:, 0], st[:, 1])], title=f"doubly tangent geodesic ({r.status})",
                                   xlabel="x", ylabel="y", vlines=[r.a, r.b],
                                   points=[(st[0, 0], st[0, 1]), (st[-1, 0], st[-1, 1])]))
    return doc


COMMANDS = {
    "analyze": cmd_analyze, "quotients": cmd_quotients, "classify": cmd_classify,
    "compare": cmd_compare, "components": cmd_components, "geodesic": cmd_geodesic,
    "conjugate": cmd_conjugate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "structured"), default="human")
    common.add_argument("--plot", metavar="FILE.svg")

    prof = argparse.ArgumentParser(add_help=False)
    prof.add_argument("--profile", metavar="FILE", help="key = value file with function and domain")

    inv = argparse.ArgumentParser(add_help=False)
    inv.add_argument("--invariant", metavar="FILE", help="invariant file (kind, t0, tau, function, domain, marks)")
    inv.add_argument("--kind", choices=("torus", "bottle1", "bottle2", "elementary"), default="torus")
    inv.add_argument("--marks", help="comma separated mark positions, 'all' or 'none'")
    inv.add_argument("--t0", type=number)
    inv.add_argument("--tau", type=number)

    flow = argparse.ArgumentParser(add_help=False)
    flow.add_argument("--eps", type=number)
    flow.add_argument("--C", type=number)
    flow.add_argument("--table", metavar="FILE", help="write the sampled trajectory as a text table")

    parser = argparse.ArgumentParser(prog="lks", description="Invariants of Lorentzian surfaces "
                                     "2dxdy + f(x)dy^2 with a Killing field.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common, prof], help="zeros, components, symmetry, squares, leaf space")
    q = sub.add_parser("quotients", parents=[common, prof], help="orbifold type and census of small quotients")
    q.add_argument("--case", choices=ig.LABELS)
    q.add_argument("--k", type=int)
    q.add_argument("--ell", type=int)
    q.add_argument("--split", help="k1,l1 for case 2+b")
    c = sub.add_parser("classify", parents=[common, prof, inv], help="validate and canonicalize an invariant")
    c.add_argument("--output", metavar="FILE", help="write the canonical invariant")
    m = sub.add_parser("compare", parents=[common], help="decide whether two invariants are equivalent")
    m.add_argument("first")
    m.add_argument("second")
    m.add_argument("--tol", type=float, default=1e-7)
    sub.add_parser("components", parents=[common, prof, inv], help="component indices of the metric space")
    g = sub.add_parser("geodesic", parents=[common, prof, flow], help="integrate one geodesic")
    g.add_argument("--x0", type=number, default=0.0)
    g.add_argument("--y0", type=number, default=0.0)
    g.add_argument("--p0", type=number)
    g.add_argument("--q0", type=number)
    g.add_argument("--direction", type=int, choices=(1, -1), default=1, help="sign of x' at the start")
    g.add_argument("--t-end", type=number, default=10.0)
    g.add_argument("--samples", type=int, default=201)
    sub.add_parser("conjugate", parents=[common, prof, flow], help="search a doubly tangent geodesic")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return int(exc.code or 0)
    except (ExprSyntaxError, ConfigError) as err:
        print(f"lks: parse error: {err}", file=sys.stderr)
        return 2
    try:
        doc = COMMANDS[args.command](args)
    except (ExprSyntaxError, ConfigError) as err:
        print(f"lks: parse error: {err}", file=sys.stderr)
        return 2
    except (LksError, OSError, ValueError) as err:
        print(f"lks: error: {err}", file=sys.stderr)
        return 1
    sys.stdout.write(emit(doc, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
