"""Generalised theta functions over torus rank 1 and 2 boundary points.

Rank 1, over a base (tau, xi) of dimension g-1 and extension class omega:

    f(z, u) = xi(z) + u xi(z - omega)

Rank 2, with shifts omega_1, omega_2 and cross term t (t = 0 is the degenerate
variant):

    f(z, u1, u2) = xi(z) + u1 xi_1 + u2 xi_2 + t u1 u2 xi_12,
    xi_I = xi(z - omega_I), omega_12 = omega_1 + omega_2.

Vertical singularities are the points where f and its derivatives in z and
in u_i d/du_i vanish.  Only the affine (u1, u2) chart is solved; u_i = 0 is
the boundary divisor D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, NotAVerticalSingularity, ZeroShift
from .sing import EPS_RANK, Quadric, corank_and_kernel, find_singular_points, numerical_rank
from .solve import (
    SolverConfig,
    cell_grid,
    levenberg_marquardt,
    newton_polish,
    torus_coordinates,
    torus_distance,
)
from .theta import ThetaContext, jet2, jet2_batch, multi_indices

# E1 + E2 + E3 = f holds for sign -1, so that sign matches the zero locus of f
ADOPTED_SIGN = -1

TYPE_DEEP = "i"      # on D, both u below the floor
TYPE_PARTIAL = "ii"  # on D, one u below the floor
TYPE_OFF = "iii"     # off D


def _vec(x, n: int) -> np.ndarray:
    v = np.asarray(x, dtype=complex).reshape(-1)
    if v.shape != (n,):
        raise InvalidInput(f"expected a vector of length {n}")
    return v


def _check_shift(base: ThetaContext, omega: np.ndarray, name: str, floor: float) -> None:
    if torus_distance(torus_coordinates(base.tau, omega)[0], 0.0) < floor:
        raise ZeroShift(f"{name} is zero modulo the lattice")


@dataclass(frozen=True, eq=False)
class Rank1Data:
    base: ThetaContext
    omega: np.ndarray

    @classmethod
    def make(cls, base: ThetaContext, omega, floor: float = 1e-4) -> "Rank1Data":
        omega = _vec(omega, base.g)
        _check_shift(base, omega, "omega", floor)
        return cls(base, omega)

    @property
    def g(self) -> int:
        return self.base.g + 1


@dataclass(frozen=True, eq=False)
class Rank2Data:
    base: ThetaContext
    omega1: np.ndarray
    omega2: np.ndarray
    t: complex

    @classmethod
    def make(cls, base: ThetaContext, omega1, omega2, t, floor: float = 1e-4) -> "Rank2Data":
        o1, o2 = _vec(omega1, base.g), _vec(omega2, base.g)
        _check_shift(base, o1, "omega1", floor)
        _check_shift(base, o2, "omega2", floor)
        _check_shift(base, o1 + o2, "omega1 + omega2", floor)
        return cls(base, o1, o2, complex(t))

    @property
    def g(self) -> int:
        return self.base.g + 2


@dataclass
class VerticalSingRecord:
    z: np.ndarray
    u: tuple
    location_type: str
    residual: float
    quadric: Quadric | None = None
    corank: int | None = None
    aux_residual: float | None = None
    components: dict = field(default_factory=dict, repr=False)

    def to_json(self) -> dict:
        out = {
            "z": [[float(c.real), float(c.imag)] for c in self.z],
            "u": [[float(c.real), float(c.imag)] for c in self.u],
            "type": self.location_type,
            "residual": self.residual,
        }
        if self.aux_residual is not None:
            out["aux_residual"] = self.aux_residual
        if self.quadric is not None:
            out["corank"] = self.corank
            out["quadric_indeterminate"] = self.quadric.indeterminate
            out["quadric"] = [[[float(c.real), float(c.imag)] for c in row] for row in self.quadric.mat]
        return out


# ---------------------------------------------------------------------------
# rank 1


def gen_theta_rank1(d: Rank1Data, z, u) -> complex:
    z = _vec(z, d.base.g)
    return d.base.value(z) + complex(u) * d.base.value(z - d.omega)


def _rank1_parts(d: Rank1Data, z, u):
    z = _vec(z, d.base.g)
    u = complex(u)
    v0, g0, H0 = jet2(d.base, z)
    v1, g1, H1 = jet2(d.base, z - d.omega)
    return z, u, (v0, g0, H0), (v1, g1, H1)


def vsing_residual_rank1(d: Rank1Data, z, u, tol: float = 1e-8,
                         config: SolverConfig = SolverConfig(), with_quadric: bool = True) -> VerticalSingRecord:
    """max(|f|, |xi(z)|, |u xi(z - omega)|, |grad f|) / max(1, |u|).

    The normalisation makes the value identical in the chart (z - omega, 1/u)
    with shift -omega.
    """
    z, u, (v0, g0, _), (v1, g1, _) = _rank1_parts(d, z, u)
    comps = {
        "f": abs(v0 + u * v1),
        "xi": abs(v0),
        "u_xi_shift": abs(u * v1),
        "grad": float(np.linalg.norm(g0 + u * g1)),
    }
    res = max(comps.values()) / max(1.0, abs(u))
    kind = TYPE_PARTIAL if abs(u) < config.u_floor else TYPE_OFF
    rec = VerticalSingRecord(z, (u,), kind, float(res), components=comps)
    if with_quadric and res < tol:
        Q = quadric_rank1(d, z, u, tol, config)
        rec.quadric = Q
        rec.corank = corank_and_kernel(Q, config.eps_rank)[0]
    return rec


def quadric_rank1(d: Rank1Data, z, u, tol: float = 1e-8, config: SolverConfig = SolverConfig()) -> Quadric:
    """Bordered g x g matrix [[0, c], [c^T, M]] of the quadric at a vertical singularity.

    M is the symmetric matrix of the form sum_{i<=j} (df/dtau_ij) x_i x_j,
    which by the heat equation is (d_i d_j f) / (4 pi i).  The border is
    grad xi(z - omega) off D and u grad xi(z - omega) on D, where the latter
    vanishes to first order and the quadric is a cone with vertex P_b.
    """
    rec = vsing_residual_rank1(d, z, u, tol, config, with_quadric=False)
    if rec.residual >= tol:
        raise NotAVerticalSingularity(f"residual {rec.residual:.3g} is not below {tol:g}")
    z, u, (v0, g0, H0), (v1, g1, H1) = _rank1_parts(d, z, u)
    gb = d.base.g
    M = (H0 + u * H1) / (4j * np.pi)
    border = g1 if abs(u) >= config.u_floor else u * g1
    Q = np.zeros((gb + 1, gb + 1), dtype=complex)
    Q[0, 1:] = border
    Q[1:, 0] = border
    Q[1:, 1:] = M
    Q[0, 0] = 0
    scale = float(np.linalg.norm(Q))
    d0 = d.base.derivatives(z, 3)
    d1 = d.base.derivatives(z - d.omega, 3)
    ref = max(
        [abs(d0[I]) for k in (2, 3) for I in multi_indices(gb, k)]
        + [abs(u) * abs(d1[I]) for k in (2, 3) for I in multi_indices(gb, k)]
        + [float(np.linalg.norm(g1))]
    )
    indeterminate = ref == 0 or scale <= config.eps_rank * ref
    return Quadric(gb + 1, Q, scale, bool(indeterminate))


def _jet2_arr(base: ThetaContext, z):
    v, gr, H = jet2(base, z)
    return np.asarray(v), gr, H


def _rank1_system(d: Rank1Data):
    """Unknowns (z, u): xi(z), u xi(z - omega), grad xi(z) + u grad xi(z - omega)."""
    n = d.base.g

    def assemble(u, j0, j1):
        v0, g0, H0 = j0
        v1, g1, H1 = j1
        F = [v0[..., None], (u * v1)[..., None], g0 + u[..., None] * g1]
        z0 = np.zeros_like(v0)[..., None]
        J = [
            np.concatenate([g0, z0], -1)[..., None, :],
            np.concatenate([u[..., None] * g1, v1[..., None]], -1)[..., None, :],
            np.concatenate([H0 + u[..., None, None] * H1, g1[..., :, None]], -1),
        ]
        return np.concatenate(F, -1), np.concatenate(J, -2)

    def fun(X):
        Z, u = X[:, :n], X[:, n]
        return assemble(u, jet2_batch(d.base, Z), jet2_batch(d.base, Z - d.omega))

    def fun1(x):
        F, J = assemble(np.array(x[n]), _jet2_arr(d.base, x[:n]), _jet2_arr(d.base, x[:n] - d.omega))
        return F, J

    return fun, fun1


U_SEEDS = (0.0, 1.0, -1.0, 1j, -1j, 2.0, 0.5, -2.0 + 1j)


@dataclass
class BoundaryScan:
    records: list
    min_residual: float


def _dedup_records(base: ThetaContext, records: list, radius: float) -> list:
    keep: list = []
    for r in sorted(records, key=lambda r: r.residual):
        tz = torus_coordinates(base.tau, r.z)[0]
        dup = False
        for k in keep:
            if torus_distance(tz, torus_coordinates(base.tau, k.z)[0]) < radius and all(
                abs(a - b) < radius * max(1.0, abs(a)) for a, b in zip(r.u, k.u)
            ):
                dup = True
                break
        if not dup:
            keep.append(r)
    keep.sort(key=lambda r: (r.location_type, tuple(np.round(torus_coordinates(base.tau, r.z)[0], 8))))
    return keep


def scan_rank1(d: Rank1Data, grid_per_dim: int = 6, tol: float = 1e-8,
               config: SolverConfig = SolverConfig(), u_seeds=U_SEEDS, polish: int = 64) -> BoundaryScan:
    """Vertical singularities in the (z, u) chart from a grid of seeds."""
    n = d.base.g
    zs = cell_grid(d.base.tau, grid_per_dim, 0.5)
    X0 = np.array([np.concatenate([z, [u]]) for z in zs for u in u_seeds])
    fun, fun1 = _rank1_system(d)
    result = levenberg_marquardt(fun, X0, config, tol)
    order = np.argsort(result.residual, kind="stable")[:polish]
    recs, best = [], math.inf
    for k in order:
        x, _ = newton_polish(fun1, result.Z[k])
        rec = vsing_residual_rank1(d, x[:n], x[n], tol, config, with_quadric=False)
        best = min(best, rec.residual)
        if rec.residual < tol:
            recs.append(vsing_residual_rank1(d, x[:n], x[n], tol, config))
    return BoundaryScan(_dedup_records(d.base, recs, config.dedup_radius), float(best))


# ---------------------------------------------------------------------------
# rank 2


def gen_theta_rank2(d: Rank2Data, z, u1, u2) -> complex:
    z = _vec(z, d.base.g)
    u1, u2 = complex(u1), complex(u2)
    b = d.base
    return (b.value(z) + u1 * b.value(z - d.omega1) + u2 * b.value(z - d.omega2)
            + d.t * u1 * u2 * b.value(z - d.omega1 - d.omega2))


def rank2_equations(d: Rank2Data, z, u1, u2, sign: int = ADOPTED_SIGN) -> dict:
    """The four groups of the vertical-singularity system.

    E1 = xi + sign t u1 u2 xi_12, E2 = u1 xi_1 + t u1 u2 xi_12,
    E3 = u2 xi_2 + t u1 u2 xi_12, E4 = grad f.  With sign = -1,
    E1 + E2 + E3 = f identically.
    """
    z = _vec(z, d.base.g)
    u1, u2 = complex(u1), complex(u2)
    b, t = d.base, d.t
    x0 = jet2(b, z)
    x1 = jet2(b, z - d.omega1)
    x2 = jet2(b, z - d.omega2)
    x12 = jet2(b, z - d.omega1 - d.omega2)
    c = t * u1 * u2
    f = x0[0] + u1 * x1[0] + u2 * x2[0] + c * x12[0]
    return {
        "f": f,
        "E1": x0[0] + sign * c * x12[0],
        "E2": u1 * x1[0] + c * x12[0],
        "E3": u2 * x2[0] + c * x12[0],
        "grad": x0[1] + u1 * x1[1] + u2 * x2[1] + c * x12[1],
    }


def _sing_residual(base: ThetaContext, w) -> float:
    v, gr, _ = jet2(base, w)
    return max(abs(v), float(np.linalg.norm(gr)))


def _pair_degeneracy(base: ThetaContext, a, b) -> float:
    va, ga, _ = jet2(base, a)
    vb, gb, _ = jet2(base, b)
    s = np.linalg.svd(np.array([ga, gb]), compute_uv=False)
    rank = float(s[1] / s[0]) if len(s) > 1 and s[0] > 0 else 0.0
    return max(abs(va), abs(vb), rank)


def vsing_classify_rank2(d: Rank2Data, z, u1, u2, sign: int = ADOPTED_SIGN,
                         config: SolverConfig = SolverConfig()) -> VerticalSingRecord:
    """Residual of the rank-2 system and the type of the point.

    The residual is max(|f|, |E1|, |E2|, |E3|, |grad f|) / max(1, |u1|, |u2|,
    |t u1 u2|), which reduces to the rank-1 residual at u2 = 0.  The auxiliary
    residual checks the condition each type imposes on the base:
    (i) z and z - omega_1 - omega_2 singular on Xi (for t = 0: z - omega_1
    and z - omega_2); (ii) Xi and its translate by the surviving shift
    tangent at z.
    """
    if sign not in (-1, 1):
        raise InvalidInput("sign must be +1 or -1")
    z = _vec(z, d.base.g)
    u1, u2 = complex(u1), complex(u2)
    eq = rank2_equations(d, z, u1, u2, sign)
    comps = {k: (float(np.linalg.norm(v)) if k == "grad" else abs(v)) for k, v in eq.items()}
    res = max(comps.values()) / max(1.0, abs(u1), abs(u2), abs(d.t * u1 * u2))
    small = (abs(u1) < config.u_floor, abs(u2) < config.u_floor)
    b = d.base
    if all(small):
        kind = TYPE_DEEP
        if d.t != 0:
            aux = max(_sing_residual(b, z), _sing_residual(b, z - d.omega1 - d.omega2))
        else:
            aux = max(_sing_residual(b, z), _sing_residual(b, z - d.omega1), _sing_residual(b, z - d.omega2))
    elif any(small):
        kind = TYPE_PARTIAL
        other = d.omega2 if small[0] else d.omega1
        aux = _pair_degeneracy(b, z, z - other)
    else:
        kind = TYPE_OFF
        aux = None
    return VerticalSingRecord(z, (u1, u2), kind, float(res), aux_residual=aux, components=comps)


def _rank2_system(d: Rank2Data, sign: int = ADOPTED_SIGN):
    n, t, s = d.base.g, d.t, sign

    def assemble(u1, u2, j0, j1, j2, j12):
        (v0, g0, H0), (v1, g1, H1), (v2, g2, H2), (v12, g12, H12) = j0, j1, j2, j12
        c = t * u1 * u2
        ce = c[..., None]
        cH = c[..., None, None]
        F = [
            (v0 + s * c * v12)[..., None],
            (u1 * v1 + c * v12)[..., None],
            (u2 * v2 + c * v12)[..., None],
            g0 + u1[..., None] * g1 + u2[..., None] * g2 + ce * g12,
        ]

        def row(dz, du1, du2):
            return np.concatenate([dz, du1[..., None], du2[..., None]], -1)[..., None, :]

        J = [
            row(g0 + s * ce * g12, s * t * u2 * v12, s * t * u1 * v12),
            row(u1[..., None] * g1 + ce * g12, v1 + t * u2 * v12, t * u1 * v12),
            row(u2[..., None] * g2 + ce * g12, t * u2 * v12, v2 + t * u1 * v12),
            np.concatenate([
                H0 + u1[..., None, None] * H1 + u2[..., None, None] * H2 + cH * H12,
                (g1 + (t * u2)[..., None] * g12)[..., :, None],
                (g2 + (t * u1)[..., None] * g12)[..., :, None],
            ], -1),
        ]
        return np.concatenate(F, -1), np.concatenate(J, -2)

    shifts = (0, d.omega1, d.omega2, d.omega1 + d.omega2)

    def fun(X):
        Z, u1, u2 = X[:, :n], X[:, n], X[:, n + 1]
        return assemble(u1, u2, *[jet2_batch(d.base, Z - w) for w in shifts])

    def fun1(x):
        return assemble(np.array(x[n]), np.array(x[n + 1]), *[_jet2_arr(d.base, x[:n] - w) for w in shifts])

    return fun, fun1


def scan_rank2(d: Rank2Data, grid_per_dim: int = 6, tol: float = 1e-8, sign: int = ADOPTED_SIGN,
               config: SolverConfig = SolverConfig(), u_seeds=(0.0, 1.0, -1.0, 1j, 0.5), polish: int = 64,
               include_deep: bool = True) -> BoundaryScan:
    """Vertical singularities in the (z, u1, u2) chart.

    Type (i) points (u1 = u2 = 0) are the singular points of Xi that also
    satisfy the auxiliary condition; they come from the singular-point search
    on the base when ``include_deep``.
    """
    n = d.base.g
    zs = cell_grid(d.base.tau, grid_per_dim, 0.5)
    X0 = np.array([np.concatenate([z, [a, b]]) for z in zs for a in u_seeds for b in u_seeds])
    fun, fun1 = _rank2_system(d, sign)
    result = levenberg_marquardt(fun, X0, config, tol)
    order = np.argsort(result.residual, kind="stable")[:polish]
    recs, best = [], math.inf
    for k in order:
        x, _ = newton_polish(fun1, result.Z[k])
        rec = vsing_classify_rank2(d, x[:n], x[n], x[n + 1], sign, config)
        best = min(best, rec.residual)
        if rec.residual < tol and (rec.aux_residual is None or rec.aux_residual < tol):
            recs.append(rec)
    if include_deep and n <= 4:
        for p in find_singular_points(d.base, config=config):
            rec = vsing_classify_rank2(d, p.z, 0, 0, sign, config)
            if rec.residual < tol and rec.aux_residual < tol:
                recs.append(rec)
    return BoundaryScan(_dedup_records(d.base, recs, config.dedup_radius), float(best))


def symmetric_offd_witness(base: ThetaContext, z, omega1) -> tuple[Rank2Data, tuple]:
    """An exact off-D solution of the sign -1 system.

    With omega_2 = 2z - omega_1, parity gives xi_2 = xi_1 and xi_12 = xi(z);
    u1 = u2 = -xi(z)/xi_1 and t = (xi_1/xi(z))^2 then make every group vanish.
    """
    z = _vec(z, base.g)
    omega1 = _vec(omega1, base.g)
    a = base.value(z)
    c = base.value(z - omega1)
    if abs(a) < 1e-8 or abs(c) < 1e-8:
        raise InvalidInput("need xi(z) and xi(z - omega1) nonzero")
    d = Rank2Data.make(base, omega1, 2 * z - omega1, (c / a) ** 2)
    u = -a / c
    return d, (u, u)


def rank_from_gradients(base: ThetaContext, z, shifts, eps: float = EPS_RANK) -> int:
    rows = [jet2(base, _vec(z, base.g) - np.asarray(w, dtype=complex))[1] for w in [np.zeros(base.g)] + list(shifts)]
    return numerical_rank(np.array(rows), eps)
