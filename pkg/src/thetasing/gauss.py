"""Gauss map of a theta divisor and tangential degeneracy of its translates.

Translates Xi, Xi_{u_1}, ..., Xi_{u_h} are tangentially degenerate at z when
theta(z - u_i) = 0 for all i (u_0 = 0) and the h+1 gradients
grad theta(z - u_i) span at most an h-dimensional space.  Points are reduced
to the fundamental cell before evaluation, so the residuals do not depend on
the lattice representative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, ZeroShift
from .solve import (
    SolverConfig,
    cell_grid,
    check_budget,
    dedup_on_torus,
    levenberg_marquardt,
    newton_polish,
    torus_coordinates,
    torus_distance,
)
from .theta import ThetaContext, gradient, jet2, jet2_batch, multi_indices, reduce_point


@dataclass
class GaussValue:
    direction: np.ndarray
    valid: bool


def projective_distance(a, b) -> float:
    """|1 - |<a, b>|| for unit vectors."""
    return abs(1.0 - abs(np.vdot(a, b)))


def gauss_map(ctx: ThetaContext, z, eps: float = 1e-8) -> GaussValue:
    d = ctx.derivatives(z, 2)
    grad = gradient(d, ctx.g)
    scale = max(1.0, max(abs(d[I]) for I in multi_indices(ctx.g, 2)))
    n = float(np.linalg.norm(grad))
    if n < eps * scale:
        return GaussValue(np.zeros(ctx.g, dtype=complex), False)
    return GaussValue(grad / n, True)


@dataclass
class TangencyWitness:
    z: np.ndarray
    shifts: list
    residual_theta: float
    residual_rank: float
    regular: bool

    @property
    def residual(self) -> float:
        return max(self.residual_theta, self.residual_rank)

    def to_json(self) -> dict:
        return {
            "z": [[float(c.real), float(c.imag)] for c in self.z],
            "shifts": [[[float(c.real), float(c.imag)] for c in u] for u in self.shifts],
            "residual_theta": self.residual_theta,
            "residual_rank": self.residual_rank,
            "regular": self.regular,
        }


def _near_lattice(ctx: ThetaContext, u, floor: float) -> bool:
    return torus_distance(torus_coordinates(ctx.tau, np.asarray(u, dtype=complex))[0], 0.0) < floor


def degeneracy_residual(ctx: ThetaContext, z, shifts, config: SolverConfig = SolverConfig()) -> TangencyWitness:
    g = ctx.g
    z = np.asarray(z, dtype=complex)
    shifts = [np.asarray(u, dtype=complex) for u in shifts]
    h = len(shifts)
    if not (1 <= h <= g - 1):
        raise InvalidInput(f"need 1 <= h <= g-1 shifts, got {h}")
    rows, vals = [], []
    for u in [np.zeros(g, dtype=complex)] + shifts:
        w = reduce_point(ctx, z - u).z0
        d = ctx.derivatives(w, 1)
        vals.append(abs(d[(0,) * g]))
        rows.append(gradient(d, g))
    G = np.array(rows)
    s = np.linalg.svd(G, compute_uv=False)
    rank_res = float(s[h] / s[0]) if s[0] > 0 else 0.0
    norms = np.linalg.norm(G, axis=1)
    regular = bool(
        all(not _near_lattice(ctx, u, config.u_floor) for u in shifts)
        and norms.min() >= config.eps_rank * max(1.0, norms.max())
    )
    return TangencyWitness(z, shifts, float(max(vals)), rank_res, regular)


# ---------------------------------------------------------------------------
# h = 1 solver


def _pair_system(ctx: ThetaContext, b: np.ndarray):
    """theta(z), theta(z - b) and the 2x2 minors of their gradients."""
    g = ctx.g
    pairs = [(k, l) for k in range(g) for l in range(k + 1, g)]

    def assemble(d1, d2):
        f1, f2 = d1[0], d2[0]
        g1, g2 = d1[1], d2[1]
        H1, H2 = d1[2], d2[2]
        F = [f1, f2]
        J = [g1, g2]
        for k, l in pairs:
            F.append(g1[..., k] * g2[..., l] - g1[..., l] * g2[..., k])
            J.append(H1[..., k, :] * g2[..., l, None] + g1[..., k, None] * H2[..., l, :]
                     - H1[..., l, :] * g2[..., k, None] - g1[..., l, None] * H2[..., k, :])
        return F, J

    def fun(Z):
        d1 = jet2_batch(ctx, Z)
        d2 = jet2_batch(ctx, Z - b)
        F, J = assemble(d1, d2)
        return np.stack(F, axis=1), np.stack(J, axis=1)

    def fun1(z):
        F, J = assemble(jet2(ctx, z), jet2(ctx, z - b))
        return np.array(F), np.array(J)

    return fun, fun1


@dataclass
class TangencySearch:
    b: np.ndarray
    witnesses: list            # regular witnesses below tol
    singular_witnesses: list   # witnesses with a vanishing gradient row
    min_residual: float        # smallest combined residual reached from any seed
    best: TangencyWitness | None = field(default=None, repr=False)


def find_tangency(ctx: ThetaContext, b, seeds=None, tol: float = 1e-8, grid_per_dim: int = 5,
                  config: SolverConfig = SolverConfig(), polish: int = 16) -> TangencySearch:
    """Points z where Xi and Xi_b are tangent (h = 1)."""
    g = ctx.g
    b = np.asarray(b, dtype=complex).reshape(g)
    if _near_lattice(ctx, b, config.u_floor):
        raise ZeroShift("shift is zero modulo the lattice")
    if seeds is None:
        seeds = cell_grid(ctx.tau, grid_per_dim, 0.5)
    seeds = np.atleast_2d(np.asarray(seeds, dtype=complex))
    fun, fun1 = _pair_system(ctx, b)
    result = levenberg_marquardt(fun, seeds, config, tol)
    check_budget(result, tol)
    order = np.argsort(result.residual, kind="stable")[:polish]
    cands = []
    for k in order:
        z, _ = newton_polish(fun1, result.Z[k])
        w = degeneracy_residual(ctx, z, [b], config)
        cands.append((w.residual, k, z, w))
    cands.sort(key=lambda c: (c[0], c[1]))
    best = cands[0][3] if cands else None
    good = [c for c in cands if c[0] < tol]
    keep = dedup_on_torus(ctx.tau, [c[2] for c in good], config.dedup_radius)
    regular = [good[i][3] for i in keep if good[i][3].regular]
    singular = [good[i][3] for i in keep if not good[i][3].regular]
    min_res = cands[0][0] if cands else math.inf
    return TangencySearch(b, regular, singular, float(min_res), best)


def n0_membership(ctx: ThetaContext, b, tol: float = 1e-8, **kw) -> tuple[bool, TangencySearch]:
    search = find_tangency(ctx, b, tol=tol, **kw)
    return bool(search.witnesses), search


# ---------------------------------------------------------------------------
# points of Xi and distance to 2 Xi


def project_to_divisor(ctx: ThetaContext, x, steps: int = 30, tol: float = 1e-14) -> np.ndarray:
    """Minimum-norm Newton iteration x <- x - theta grad^* / |grad|^2."""
    x = np.asarray(x, dtype=complex).copy()
    for _ in range(steps):
        d = ctx.derivatives(x, 1)
        f = d[(0,) * ctx.g]
        gr = gradient(d, ctx.g)
        n2 = float(np.vdot(gr, gr).real)
        if n2 == 0 or not np.isfinite(n2) or not np.isfinite(f) or abs(f) > 1e150:
            break
        step = -f * (np.conj(gr) / n2)
        if not np.all(np.isfinite(step)):
            break
        x = x + step
        if np.linalg.norm(step) < tol:
            break
    return x


def sample_theta_divisor(ctx: ThetaContext, rng: np.random.Generator, n: int = 1,
                         tol: float = 1e-13, max_tries: int = 200) -> np.ndarray:
    """Points on Xi: random start in the cell, Newton along a random complex line."""
    g = ctx.g
    out = []
    tries = 0
    while len(out) < n and tries < max_tries * n:
        tries += 1
        ab = rng.uniform(0, 1, 2 * g)
        z0 = ab[:g] + ctx.tau @ ab[g:]
        v = rng.normal(size=g) + 1j * rng.normal(size=g)
        v /= np.linalg.norm(v)
        s = 0j
        for _ in range(60):
            d = ctx.derivatives(z0 + s * v, 1)
            f = d[(0,) * g]
            df = complex(gradient(d, g) @ v)
            if df == 0:
                break
            step = -f / df
            s += step
            if abs(step) < 1e-15 or abs(s) > 2:
                break
        z = z0 + s * v
        if abs(s) <= 2 and abs(ctx.value(z)) < tol:
            out.append(reduce_point(ctx, z).z0)
    if len(out) < n:
        raise InvalidInput("could not sample enough points on the theta divisor")
    return np.array(out)


def half_lattice(ctx: ThetaContext) -> np.ndarray:
    """The 2^(2g) points (m + tau n)/2, m, n in {0,1}^g."""
    g = ctx.g
    bits = np.array(np.meshgrid(*([[0, 1]] * (2 * g)), indexing="ij")).reshape(2 * g, -1).T
    return (bits[:, :g] + bits[:, g:] @ ctx.tau.T) / 2


def dist_to_2xi(ctx: ThetaContext, b) -> tuple[float, np.ndarray]:
    """Distance from b to 2 Xi, through the preimages x with 2x = b.

    Every point of 2 Xi near b is 2y with y on Xi near one of the 2^(2g)
    preimages (b + omega)/2, so the distance is twice the smallest distance
    from a preimage to Xi.  Returns the distance and the nearest y found.
    """
    b = reduce_point(ctx, np.asarray(b, dtype=complex)).z0
    best, best_y = math.inf, None
    for om in half_lattice(ctx):
        x = b / 2 + om
        y = project_to_divisor(ctx, x)
        if np.linalg.norm(y - x) > 1 or abs(ctx.value(y)) > 1e-10:
            continue
        dist = 2 * float(np.linalg.norm(y - x))
        if dist < best:
            best, best_y = dist, y
    return best, best_y


def dist_to_2xi_sampled(ctx: ThetaContext, b, samples: np.ndarray) -> float:
    """min over sampled x on Xi of the lattice distance from b to 2x, in cell coordinates."""
    tb = torus_coordinates(ctx.tau, np.asarray(b, dtype=complex))[0]
    t2 = torus_coordinates(ctx.tau, 2 * np.asarray(samples))
    d = np.abs(t2 - tb) % 1.0
    return float(np.min(np.max(np.minimum(d, 1 - d), axis=1)))


# ---------------------------------------------------------------------------
# path scans


@dataclass
class PathScan:
    t: np.ndarray
    residual: np.ndarray
    dips: list  # (t_enter, t_exit, t_min, residual_min)

    def to_csv(self, header: str = "") -> str:
        lines = [header] if header else []
        lines.append("t,residual")
        lines += [f"{t:.17g},{r:.17g}" for t, r in zip(self.t, self.residual)]
        return "\n".join(lines) + "\n"


def find_dips(t: np.ndarray, r: np.ndarray, low: float, high: float) -> list:
    """Intervals entered when r < low and left when r > high."""
    dips = []
    inside, start, kmin = False, 0, 0
    for k, v in enumerate(r):
        if not inside and v < low:
            inside, start, kmin = True, k, k
        elif inside:
            if v < r[kmin]:
                kmin = k
            if v > high:
                dips.append((float(t[start]), float(t[k - 1]), float(t[kmin]), float(r[kmin])))
                inside = False
    if inside:
        dips.append((float(t[start]), float(t[-1]), float(t[kmin]), float(r[kmin])))
    return dips


def path_points(path: dict, t: np.ndarray) -> np.ndarray:
    """b(t) for {"base", "direction"} (b = base + t direction) or {"waypoints"} (piecewise linear)."""
    if "waypoints" in path:
        W = np.asarray(path["waypoints"], dtype=complex)
        s = np.clip(t, 0, 1) * (len(W) - 1)
        k = np.minimum(np.floor(s).astype(int), len(W) - 2)
        f = (s - k)[:, None]
        return W[k] * (1 - f) + W[k + 1] * f
    base = np.asarray(path["base"], dtype=complex)
    direction = np.asarray(path["direction"], dtype=complex)
    return base[None, :] + t[:, None] * direction[None, :]


def _min_residual_at(ctx, b, seeds, tol, config, polish):
    if _near_lattice(ctx, b, config.u_floor):
        return 0.0, None
    s = find_tangency(ctx, b, seeds=seeds, tol=tol, config=config, polish=polish)
    return s.min_residual, (s.best.z if s.best is not None else None)


def scan_path(ctx: ThetaContext, path: dict, samples: int = 41, tol: float = 1e-6,
              grid_per_dim: int = 4, config: SolverConfig = SolverConfig(),
              refine_steps: int = 60, progress=None) -> PathScan:
    """Minimum combined tangency residual along b(t), t in [0, 1].

    Each sample starts from a cell grid plus the best point of the previous
    sample.  A real path meets the divisor of tangency shifts only in
    isolated points, so every interior local minimum of the coarse samples is
    refined by golden-section search on t with warm-started solves; the
    refined samples are merged into the output.
    """
    if ctx.g not in (2, 3):
        raise InvalidInput("path scans are supported for g = 2, 3")
    t = np.linspace(0.0, 1.0, samples)
    B = path_points(path, t)
    grid = cell_grid(ctx.tau, grid_per_dim, 0.5)
    warm = np.empty((0, ctx.g), dtype=complex)
    res = np.empty(samples)
    best_z = [None] * samples
    for k, b in enumerate(B):
        res[k], z = _min_residual_at(ctx, b, np.vstack([warm, grid]), tol, config, 4)
        best_z[k] = z
        warm = np.atleast_2d(z) if z is not None else warm
        if progress:
            progress(k, samples, res[k])
    ts, rs = list(t), list(res)
    phi = (math.sqrt(5) - 1) / 2
    for k in range(1, samples - 1):
        if not (res[k] <= res[k - 1] and res[k] <= res[k + 1]) or best_z[k] is None:
            continue
        seeds = np.array([z for z in (best_z[k - 1], best_z[k], best_z[k + 1]) if z is not None])

        def f(tt):
            return _min_residual_at(ctx, path_points(path, np.array([tt]))[0], seeds, tol, config, 1)[0]

        a, c = t[k - 1], t[k + 1]
        x1, x2 = c - phi * (c - a), a + phi * (c - a)
        f1, f2 = f(x1), f(x2)
        for _ in range(refine_steps):
            if f1 <= f2:
                c, x2, f2 = x2, x1, f1
                x1 = c - phi * (c - a)
                f1 = f(x1)
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + phi * (c - a)
                f2 = f(x2)
        tt, rr = (x1, f1) if f1 <= f2 else (x2, f2)
        if rr < res[k]:
            ts.append(float(tt))
            rs.append(float(rr))
    order = np.argsort(ts, kind="stable")
    T, R = np.array(ts)[order], np.array(rs)[order]
    return PathScan(T, R, find_dips(T, R, tol, 10 * tol))
