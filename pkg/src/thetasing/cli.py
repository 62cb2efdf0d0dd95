"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 solver budget exhausted.  Results go
to standard output (JSON, or CSV for path scans); progress goes to standard
error.  Every output carries the tool version, tolerances and seed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from . import boundary as bd
from . import gauss, jets, pencils, sing
from .cones import asymptotic_cone
from .errors import InvalidInput, SolverBudgetExceeded, ThetaSingError
from .io import (
    complex_vector_json,
    dumps,
    header,
    load_json,
    load_tau,
    parse_complex,
    parse_complex_vector,
    parse_pair,
)
from .polys import MPoly, PolynomialOracle, parse_poly
from .theta import make_context, multi_indices_upto, theta_deriv


@dataclass
class RunConfig:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    tol: float = 1e-10
    seed: int = 0
    fmt: str = "json"
    threads: int = 1

    def header(self, **extra) -> dict:
        return header(__version__, self.tol, self.seed, command=self.subcommand, threads=self.threads, **extra)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _exact_or_complex(tok):
    """Rational when the token is an integer or p/q, complex otherwise."""
    if isinstance(tok, (list, tuple)):
        c = parse_complex(tok)
        return Fraction(c.real).limit_denominator() if c.imag == 0 and float(c.real).is_integer() else c
    if isinstance(tok, int):
        return Fraction(tok)
    s = str(tok).strip()
    try:
        return Fraction(s)
    except ValueError:
        return parse_complex(s)


def _exact_vector(text) -> list:
    if isinstance(text, str):
        s = text.strip()
        if s.startswith("["):
            text = json.loads(s)
        else:
            text = [p for p in s.split(",") if p.strip()]
    return [_exact_or_complex(t) for t in text]


def _value_json(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    c = complex(x)
    return [c.real, c.imag]


def _oracle(args):
    if getattr(args, "poly", None):
        return PolynomialOracle(parse_poly(args.poly)), {"poly": args.poly}
    if not getattr(args, "tau", None):
        raise InvalidInput("give --tau FILE or --poly EXPR")
    tau = load_tau(args.tau)
    return make_context(tau, min(args.tol, 1e-12)), {"tau": args.tau}


def _point(args, oracle):
    z = _exact_vector(args.z) if isinstance(oracle, PolynomialOracle) else parse_complex_vector(args.z)
    if len(z) != oracle.g:
        raise InvalidInput(f"point has {len(z)} coordinates, expected {oracle.g}")
    if not isinstance(oracle, PolynomialOracle):
        return np.asarray(z, dtype=complex)
    return z


# ---------------------------------------------------------------------------
# theta


def cmd_theta_eval(args, cfg: RunConfig) -> dict:
    ctx = make_context(load_tau(args.tau), args.tol)
    z = parse_complex_vector(args.z)
    if args.index:
        I = tuple(int(k) for k in args.index.split(","))
        values = [{"index": list(I), "value": theta_deriv(ctx, z, I)}]
    else:
        d = ctx.derivatives(z, args.order)
        values = [{"index": list(I), "value": d[I]} for I in multi_indices_upto(ctx.g, args.order)]
    return {"header": cfg.header(), "z": complex_vector_json(z), "theta": ctx.value(z), "derivatives": values}


# ---------------------------------------------------------------------------
# singular points


def cmd_sing_find(args, cfg: RunConfig) -> dict:
    ctx = make_context(load_tau(args.tau))
    _log(f"searching g={ctx.g} with {args.grid}^{2 * ctx.g} seeds")
    recs = sing.find_singular_points(ctx, args.grid, args.tol)
    return {"header": cfg.header(grid=args.grid), "points": [r.to_json() for r in recs]}


def cmd_sing_report(args, cfg: RunConfig) -> dict:
    oracle, src = _oracle(args)
    z = _point(args, oracle)
    eps = args.eps
    order = sing.singularity_order(oracle, z, eps)
    out = {"header": cfg.header(tolerances={"eps_rank": eps}, **src), "order": order}
    if order >= 2:
        rep = sing.smoothness_report(oracle, z, eps)
        out.update(rep.to_json())
        out["hessian"] = rep.quadric.mat
        cone = asymptotic_cone(oracle, z, order, eps)[0]
        out["tangent_cone"] = [
            {"exponents": list(I), "coefficient": _value_json(c)} for I, c in sorted(cone.coeffs.items(), reverse=True)
        ]
    return out


# ---------------------------------------------------------------------------
# jets


def cmd_jets_expand(args, cfg: RunConfig) -> dict:
    op = jets.delta_expand(args.k)
    return {"header": cfg.header(), **op.to_json(), "matches_recursion": op == jets.delta_recursive(args.k)}


def _random_poly(rng: random.Random, g: int, degree: int) -> MPoly:
    d = {}
    for _ in range(rng.randint(1, 5)):
        e = [0] * g
        for _ in range(rng.randint(0, degree)):
            e[rng.randrange(g)] += 1
        d[tuple(e)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return MPoly.from_dict(g, d)


def cmd_jets_check(args, cfg: RunConfig) -> dict:
    rng = random.Random(args.seed)
    results = []
    for _ in range(args.cases):
        g = rng.randint(1, 3)
        f, h = _random_poly(rng, g, 3), _random_poly(rng, g, 3)
        fields = [[Fraction(rng.randint(-3, 3)) for _ in range(g)] for _ in range(args.k)]
        results.append(jets.leibniz_check(args.k, f, h, fields))
    return {
        "header": cfg.header(),
        "k": args.k,
        "recursion_matches": all(jets.delta_expand(k) == jets.delta_recursive(k) for k in range(args.k + 1)),
        "leibniz_cases": args.cases,
        "leibniz_passed": sum(results),
    }


def _fields(text, g: int, exact: bool) -> list:
    data = load_json(text[1:]) if text.startswith("@") else json.loads(text)
    out = []
    for f in data:
        v = [_exact_or_complex(x) for x in f] if exact else [complex(parse_complex(x)) for x in f]
        if len(v) != g:
            raise InvalidInput(f"field has {len(v)} entries, expected {g}")
        out.append(v)
    if not out:
        raise InvalidInput("need at least one field")
    return out


def cmd_jets_residual(args, cfg: RunConfig) -> dict:
    oracle, src = _oracle(args)
    exact = isinstance(oracle, PolynomialOracle)
    z = _point(args, oracle)
    fields = _fields(args.fields, oracle.g, exact)
    vecs = jets.curvilinear_vectors(oracle, z, fields, args.base_tol)
    norms = jets.curvilinear_residuals(oracle, z, fields, args.base_tol)
    out = {
        "header": cfg.header(tolerances={"base_tol": args.base_tol}, **src),
        "orders": [
            {"k": k, "residual": n, "vector": [_value_json(x) for x in v]}
            for k, (n, v) in enumerate(zip(norms, vecs), 1)
        ],
    }
    if args.extend:
        ext = jets.jet_extend(oracle, z, fields, args.base_tol)
        out["extension"] = None if ext is None else {"eta": complex_vector_json(ext.eta), "residual": ext.residual}
    return out


# ---------------------------------------------------------------------------
# tangency


def cmd_tangency_check(args, cfg: RunConfig) -> dict:
    ctx = make_context(load_tau(args.tau))
    if args.b is not None:
        b = parse_complex_vector(args.b)
        member, s = gauss.n0_membership(ctx, b, tol=args.tol, grid_per_dim=args.grid)
        return {
            "header": cfg.header(grid=args.grid),
            "b": complex_vector_json(b),
            "member": member,
            "min_residual": s.min_residual,
            "witnesses": [w.to_json() for w in s.witnesses],
            "singular_witnesses": [w.to_json() for w in s.singular_witnesses],
        }
    if args.z is None or args.shifts is None:
        raise InvalidInput("give --b, or --z with --shifts")
    z = parse_complex_vector(args.z)
    shifts = [parse_complex_vector(json.dumps(u)) for u in json.loads(args.shifts)]
    w = gauss.degeneracy_residual(ctx, z, shifts)
    return {"header": cfg.header(), **w.to_json()}


def cmd_tangency_scan(args, cfg: RunConfig):
    ctx = make_context(load_tau(args.tau))
    raw = load_json(args.path)
    path = {"waypoints": raw} if isinstance(raw, list) else raw
    if "waypoints" in path:
        path = {"waypoints": [parse_complex_vector(json.dumps(w)) for w in path["waypoints"]]}
    else:
        path = {k: parse_complex_vector(json.dumps(path[k])) for k in ("base", "direction")}

    def progress(k, n, r):
        _log(f"sample {k + 1}/{n} residual {r:.3e}")

    scan = gauss.scan_path(ctx, path, args.samples, args.tol, args.grid, progress=progress)
    hdr = cfg.header(samples=args.samples, grid=args.grid, dips=[list(d) for d in scan.dips])
    if cfg.fmt == "csv":
        return scan.to_csv("# " + dumps(hdr, indent=0).replace("\n", ""))
    return {"header": hdr, "t": scan.t, "residual": scan.residual, "dips": [list(d) for d in scan.dips]}


# ---------------------------------------------------------------------------
# boundary


def cmd_boundary_rank1(args, cfg: RunConfig) -> dict:
    base = make_context(load_tau(args.base))
    d = bd.Rank1Data.make(base, parse_complex_vector(args.omega))
    hdr = cfg.header(base=args.base, omega=complex_vector_json(d.omega))
    if args.scan:
        _log("scanning rank-1 vertical singularities")
        s = bd.scan_rank1(d, args.grid, args.tol)
        return {"header": hdr, "records": [r.to_json() for r in s.records], "min_residual": s.min_residual}
    if args.z is None or args.u is None:
        raise InvalidInput("give --scan or --z with --u")
    rec = bd.vsing_residual_rank1(d, parse_complex_vector(args.z), parse_complex(args.u), args.tol)
    return {"header": hdr, "record": rec.to_json(), "value": bd.gen_theta_rank1(d, rec.z, rec.u[0])}


def cmd_boundary_rank2(args, cfg: RunConfig) -> dict:
    base = make_context(load_tau(args.base))
    d = bd.Rank2Data.make(base, parse_complex_vector(args.omega1), parse_complex_vector(args.omega2), parse_pair(args.t))
    hdr = cfg.header(base=args.base, omega1=complex_vector_json(d.omega1), omega2=complex_vector_json(d.omega2),
                     t=[d.t.real, d.t.imag], sign=args.sign)
    if args.scan:
        _log("scanning rank-2 vertical singularities")
        s = bd.scan_rank2(d, args.grid, args.tol, args.sign)
        return {"header": hdr, "records": [r.to_json() for r in s.records], "min_residual": s.min_residual}
    if args.z is None or args.u1 is None or args.u2 is None:
        raise InvalidInput("give --scan or --z with --u1 and --u2")
    rec = bd.vsing_classify_rank2(d, parse_complex_vector(args.z), parse_complex(args.u1), parse_complex(args.u2),
                                  args.sign)
    return {"header": hdr, "record": rec.to_json(), "value": bd.gen_theta_rank2(d, rec.z, *rec.u)}


# ---------------------------------------------------------------------------
# pencils


def cmd_pencil_analyze(args, cfg: RunConfig) -> dict:
    p = pencils.Pencil.from_json(load_json(args.file))
    rep = pencils.analyze(p, args.seed)
    return {"header": cfg.header(tolerances={"exact": True}), **rep.to_json()}


def cmd_pencil_generate(args, cfg: RunConfig) -> dict:
    nu = pencils.parse_vertex(args.vertex)
    p = pencils.prescribed_vertex_generator(nu, args.seed)
    out = {"header": cfg.header(tolerances={"exact": True}, vertex=args.vertex), "pencil": p.to_json()}
    if args.analyze:
        out["report"] = pencils.analyze(p, args.seed).to_json()
    return out


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="thetasing", description="Theta-divisor singularities and pencils of quadrics.")
    ap.add_argument("--version", action="version", version=f"thetasing {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default=None)
    common.add_argument("--threads", type=int, default=1)
    top = ap.add_subparsers(dest="group", required=True)

    def group(name):
        return top.add_parser(name).add_subparsers(dest="action", required=True)

    th = group("theta")
    p = th.add_parser("eval", parents=[common])
    p.add_argument("--tau", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--order", type=int, default=0)
    p.add_argument("--index")
    p.set_defaults(func=cmd_theta_eval)

    sg = group("sing")
    p = sg.add_parser("find", parents=[common])
    p.add_argument("--tau", required=True)
    p.add_argument("--grid", type=int, default=4)
    p.set_defaults(func=cmd_sing_find)
    p = sg.add_parser("report", parents=[common])
    p.add_argument("--tau")
    p.add_argument("--poly")
    p.add_argument("--z", required=True)
    p.add_argument("--eps", type=float, default=1e-8)
    p.set_defaults(func=cmd_sing_report)

    jt = group("jets")
    p = jt.add_parser("expand", parents=[common])
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_jets_expand)
    p = jt.add_parser("check", parents=[common])
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--cases", type=int, default=20)
    p.set_defaults(func=cmd_jets_check)
    p = jt.add_parser("residual", parents=[common])
    p.add_argument("--tau")
    p.add_argument("--poly")
    p.add_argument("--z", required=True)
    p.add_argument("--fields", required=True, help="JSON list of vectors, or @file.json")
    p.add_argument("--base-tol", type=float, default=1e-8)
    p.add_argument("--extend", action="store_true")
    p.set_defaults(func=cmd_jets_residual)

    tg = group("tangency")
    p = tg.add_parser("check", parents=[common])
    p.add_argument("--tau", required=True)
    p.add_argument("--z")
    p.add_argument("--shifts", help="JSON list of shift vectors")
    p.add_argument("--b")
    p.add_argument("--grid", type=int, default=5)
    p.set_defaults(func=cmd_tangency_check)
    p = tg.add_parser("scan", parents=[common])
    p.add_argument("--tau", required=True)
    p.add_argument("--path", required=True)
    p.add_argument("--samples", type=int, default=41)
    p.add_argument("--grid", type=int, default=4)
    p.set_defaults(func=cmd_tangency_scan, default_fmt="csv")

    bo = group("boundary")
    p = bo.add_parser("rank1", parents=[common])
    p.add_argument("--base", required=True)
    p.add_argument("--omega", required=True)
    p.add_argument("--z")
    p.add_argument("--u")
    p.add_argument("--scan", action="store_true")
    p.add_argument("--grid", type=int, default=6)
    p.set_defaults(func=cmd_boundary_rank1)
    p = bo.add_parser("rank2", parents=[common])
    p.add_argument("--base", required=True)
    p.add_argument("--omega1", required=True)
    p.add_argument("--omega2", required=True)
    p.add_argument("--t", required=True, help='"re,im"')
    p.add_argument("--sign", type=int, choices=(-1, 1), default=-1)
    p.add_argument("--z")
    p.add_argument("--u1")
    p.add_argument("--u2")
    p.add_argument("--scan", action="store_true")
    p.add_argument("--grid", type=int, default=6)
    p.set_defaults(func=cmd_boundary_rank2)

    pe = group("pencil")
    p = pe.add_parser("analyze", parents=[common])
    p.add_argument("--file", required=True)
    p.set_defaults(func=cmd_pencil_analyze)
    p = pe.add_parser("generate", parents=[common])
    p.add_argument("--vertex", required=True)
    p.add_argument("--analyze", action="store_true")
    p.set_defaults(func=cmd_pencil_generate)
    return ap


def dispatch(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.tol <= 0:
        _log("error: --tol must be positive")
        return 2
    fmt = args.fmt or getattr(args, "default_fmt", "json")
    cfg = RunConfig(f"{args.group} {args.action}", {}, args.tol, args.seed, fmt, args.threads)
    try:
        result = args.func(args, cfg)
    except SolverBudgetExceeded as e:
        _log(f"error: {e}")
        return 3
    except (ThetaSingError, ValueError, ArithmeticError) as e:
        _log(f"error: {e}")
        return 2
    out.write(result if isinstance(result, str) else dumps(result) + "\n")
    return 0


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
