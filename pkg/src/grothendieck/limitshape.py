"""Limit shape of homogeneous Grothendieck random partitions.

Pipeline:
  1. critical cubic of the action S(z) at scaled coordinates (xi, tau);
  2. liquid points (complex root pair) give the height gradient through the
     arguments of z_c and z_c - beta;
  3. on each horizontal row the frozen boundary is crossed where a quartic in
     the boundary parameter z vanishes; frozen stretches get the gradient of the
     zone picked by the real double root at the adjacent crossing;
  4. the height is integrated in xi from the far right, where it vanishes;
  5. the cross-section L(tau) solves h(L, tau) = tau and the rotated shape is
     u = L - 1, W = L - 1 + 2 tau.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .core import (BoundaryDetectionFailed, DegenerateAllZero, InvalidRegime, NoRoot,
                   PoleProximity, StencilLeavesLiquid)

GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(12)
_U = (GAUSS_NODES + 1) / 2
_SMOOTH = 3 * _U ** 2 - 2 * _U ** 3            # maps [0,1] onto [0,1] with zero slope at both ends
_SMOOTH_W = GAUSS_WEIGHTS / 2 * 6 * _U * (1 - _U)
INTEGRATION_TOL = 1e-12


@dataclass(frozen=True)
class AsymptoticParams:
    x: float
    y: float
    beta: float
    allow_positive_beta: bool = False

    def __post_init__(self):
        x, y, b = float(self.x), float(self.y), float(self.beta)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "beta", b)
        if not (x > 0 and y > 0 and x * y < 1):
            raise InvalidRegime("need x > 0, y > 0 and xy < 1")
        if b >= 0:
            if not self.allow_positive_beta:
                raise InvalidRegime("need beta < 0 (pass allow_positive_beta to explore beta > 0)")
            if not 0 < b < min(1 / x, y):
                raise InvalidRegime("positive beta must lie in (0, min(1/x, y))")

    @property
    def conjectural(self) -> bool:
        return self.beta > 0


# ---------------------------------------------------------------- cubic

def cubic_coefficients(p: AsymptoticParams, xi, tau):
    """(a3, a2, a1, a0) of the critical equation, broadcasting over xi and tau."""
    x, y, b = p.x, p.y, p.beta
    xi = np.asarray(xi, dtype=float)
    tau = np.asarray(tau, dtype=float)
    a3 = xi * x
    a2 = -(xi + b * x * (xi + tau - 1) + (xi + 1) * x * y - 1)
    a1 = b * (xi + tau + xi * x * y + tau * x * y - 2) + xi * y
    a0 = -b * y * (xi + tau - 1)
    return np.broadcast_arrays(a3, a2, a1, a0)


def discriminant(a3, a2, a1, a0):
    return (18 * a3 * a2 * a1 * a0 - 4 * a2 ** 3 * a0 + a2 ** 2 * a1 ** 2
            - 4 * a3 * a1 ** 3 - 27 * a3 ** 2 * a0 ** 2)


def _polish(coeffs, z):
    a3, a2, a1, a0 = (c[..., None] for c in coeffs)
    f = ((a3 * z + a2) * z + a1) * z + a0
    df = (3 * a3 * z + 2 * a2) * z + a1
    with np.errstate(divide="ignore", invalid="ignore"):
        step = np.where(df != 0, f / df, 0)
    return z - np.where(np.isfinite(step), step, 0)


def solve_cubic(a3, a2, a1, a0) -> np.ndarray:
    """Roots (last axis of length 3) by Cardano in complex arithmetic plus Newton polishing.

    A vanishing leading coefficient gives the two quadratic roots and inf.
    """
    a3, a2, a1, a0 = (np.asarray(c, dtype=float) for c in np.broadcast_arrays(a3, a2, a1, a0))
    if np.any((a3 == 0) & (a2 == 0) & (a1 == 0) & (a0 == 0)):
        raise DegenerateAllZero("all cubic coefficients vanish")
    out = np.empty(a3.shape + (3,), dtype=complex)
    cubic = a3 != 0
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.where(cubic, a2 / np.where(cubic, a3, 1), 0)
        c = np.where(cubic, a1 / np.where(cubic, a3, 1), 0)
        d = np.where(cubic, a0 / np.where(cubic, a3, 1), 0)
        pp = c - b * b / 3
        qq = 2 * b ** 3 / 27 - b * c / 3 + d
        s = np.sqrt((qq / 2) ** 2 + (pp / 3) ** 3 + 0j)
        u3 = np.where(np.abs(-qq / 2 + s) >= np.abs(-qq / 2 - s), -qq / 2 + s, -qq / 2 - s)
        u = u3 ** (1 / 3)
        v = np.where(u != 0, -pp / (3 * np.where(u != 0, u, 1)), 0)
        w = np.exp(2j * np.pi / 3)
        for k in range(3):
            out[..., k] = w ** k * u + w ** (-k) * v - b / 3
        if np.any(~cubic):
            # quadratic a2 z^2 + a1 z + a0, numerically stable form
            A, B, C = a2 + 0j, a1 + 0j, a0 + 0j
            sq = np.sqrt(B * B - 4 * A * C)
            sgn = np.where((np.conj(B) * sq).real >= 0, 1, -1)
            qd = -(B + sgn * sq) / 2
            r1 = np.where(A != 0, qd / np.where(A != 0, A, 1), -C / np.where(B != 0, B, 1))
            r2 = np.where(qd != 0, C / np.where(qd != 0, qd, 1), np.inf)
            out[~cubic, 0] = r1[~cubic]
            out[~cubic, 1] = np.where(A != 0, r2, np.inf)[~cubic]
            out[~cubic, 2] = np.inf
    return _polish((a3, a2, a1, a0), _polish((a3, a2, a1, a0), out))


def cubic_roots(p: AsymptoticParams, xi: float, tau: float) -> np.ndarray:
    return solve_cubic(*cubic_coefficients(p, xi, tau))


def root_residual(p: AsymptoticParams, xi: float, tau: float, z: complex) -> float:
    """|P(z)| / sum |a_k| |z|^k."""
    a = [float(c) for c in cubic_coefficients(p, xi, tau)]
    val = ((a[0] * z + a[1]) * z + a[2]) * z + a[3]
    scale = sum(abs(c) * abs(z) ** (3 - k) for k, c in enumerate(a))
    return abs(val) / scale if scale else 0.0


def critical_point(p: AsymptoticParams, xi, tau) -> np.ndarray:
    """Root with the largest imaginary part (the upper half-plane root in the liquid region)."""
    roots = solve_cubic(*cubic_coefficients(p, xi, tau))
    roots = np.where(np.isfinite(roots), roots, 0)
    idx = np.argmax(roots.imag, axis=-1)
    return np.take_along_axis(roots, idx[..., None], axis=-1)[..., 0]


def is_liquid(p: AsymptoticParams, xi, tau):
    return discriminant(*cubic_coefficients(p, xi, tau)) < 0


# ---------------------------------------------------------------- frozen boundary

def boundary_xi(p: AsymptoticParams, z):
    x, y, b = p.x, p.y, p.beta
    z = np.asarray(z, dtype=float)
    return (1 - x * y) * (y * (b + x * z ** 2 - 2 * z) + z ** 2 * (1 - b * x)) / ((1 - x * z) ** 2 * (y - z) ** 2)


def boundary_tau(p: AsymptoticParams, z):
    x, y, b = p.x, p.y, p.beta
    z = np.asarray(z, dtype=float)
    return 1 + (z - b) ** 2 * (1 - x * y) * (y - x * z ** 2) / ((-b) * (1 - x * z) ** 2 * (y - z) ** 2)


@dataclass(frozen=True)
class BoundaryPoint:
    z: float
    xi: float
    tau: float


def frozen_boundary(p: AsymptoticParams, z_grid: Sequence[float], pole_tol: float = 1e-9) -> list[BoundaryPoint]:
    """Physical part (xi >= 0, 0 <= tau <= 1) of the boundary curve."""
    z = np.asarray(z_grid, dtype=float)
    if np.any(np.abs(z - p.y) < pole_tol * (1 + p.y)) or np.any(np.abs(1 - p.x * z) < pole_tol):
        raise PoleProximity("z grid touches a pole of the parametrization (z = y or z = 1/x)")
    xi, tau = boundary_xi(p, z), boundary_tau(p, z)
    keep = (xi >= 0) & (tau >= 0) & (tau <= 1) & np.isfinite(xi) & np.isfinite(tau)
    return [BoundaryPoint(float(a), float(b), float(c)) for a, b, c in zip(z[keep], xi[keep], tau[keep])]


def default_z_grid(p: AsymptoticParams, n: int = 4000) -> np.ndarray:
    """Real z values spread over the pieces of the line between the poles y and 1/x."""
    y, xinv, b = p.y, 1 / p.x, p.beta
    big = 50 * max(xinv, abs(b), 1.0)
    pieces = [(-big, min(b, 0.0) - 1e-12), (min(b, 0.0), y), (y, xinv), (xinv, big)]
    out = []
    for lo, hi in pieces:
        pad = 1e-6 * (hi - lo)
        t = np.linspace(0, 1, n)
        # cluster nodes near the ends, where the curve runs off to infinity
        s = 0.5 - 0.5 * np.cos(np.pi * t)
        out.append(lo + pad + (hi - lo - 2 * pad) * s)
    return np.concatenate(out)


def boundary_slope_check(p: AsymptoticParams, z: float, h: float = 1e-6) -> tuple[float, float]:
    """(d tau / d xi along the curve, -(1 - z / beta)); the two should agree up to sign convention."""
    dxi = (boundary_xi(p, z + h) - boundary_xi(p, z - h)) / (2 * h)
    dtau = (boundary_tau(p, z + h) - boundary_tau(p, z - h)) / (2 * h)
    return float(dtau / dxi), float(-(1 - z / p.beta))


def row_crossings(p: AsymptoticParams, tau: float) -> list[tuple[float, float]]:
    """(xi, z) where the row at height tau meets the boundary, sorted by xi."""
    x, y, b = p.x, p.y, p.beta
    # (tau - 1)(-b)(1 - xz)^2 (y - z)^2 - (z - b)^2 (1 - xy)(y - x z^2) = 0
    left = P.polymul(P.polymul([1, -x], [1, -x]), P.polymul([y, -1], [y, -1])) * ((tau - 1) * (-b))
    right = P.polymul(P.polymul([-b, 1], [-b, 1]), [y, 0, -x]) * (1 - x * y)
    quartic = P.polysub(left, right)
    roots = P.polyroots(quartic) if np.any(quartic != 0) else np.array([])
    dq = P.polyder(quartic)
    out = []
    for r in roots:
        # near the cusp three roots coalesce and carry ~eps^(1/3) imaginary noise;
        # a spurious real crossing only splits a stretch, so be generous here
        if abs(r.imag) > 1e-4 * (1 + abs(r)):
            continue
        z = float(r.real)
        for _ in range(3):
            d = P.polyval(z, dq)
            if d == 0:
                break
            z -= P.polyval(z, quartic) / d
        if abs(z - y) < 1e-12 or abs(1 - x * z) < 1e-12:
            continue
        xi = float(boundary_xi(p, z))
        if np.isfinite(xi) and xi > 0:
            out.append((xi, z))
    return sorted(out)


# ---------------------------------------------------------------- zones and rows

def frozen_gradient(p: AsymptoticParams, z: float) -> tuple[float, float]:
    """Limit of the angle formula as z_c tends to a real point z from above."""
    arg_z = np.pi if z < 0 else 0.0
    arg_zb = np.pi if z < p.beta else 0.0
    return -arg_z / np.pi, (arg_zb - arg_z) / np.pi


def zone_of(p: AsymptoticParams, z: float, rightmost: bool) -> str:
    if p.beta < 0:
        if z > 0:
            return "Ia" if rightmost else "Ib"
        return "II" if z > p.beta else "III"
    # conjectural regime: label by the same interval logic around 0 and beta
    if z > p.beta:
        return "Ia" if rightmost else "Ib"
    return "II" if z > 0 else "III"


@dataclass
class Stretch:
    lo: float
    hi: float
    liquid: bool
    zone: str = "LIQUID"
    z: float = float("nan")

    @property
    def slope(self) -> float:
        """-d h / d xi on a frozen stretch."""
        return 1.0 if self.zone in ("II", "III") else 0.0


@dataclass
class Row:
    p: AsymptoticParams
    tau: float
    xi_max: float
    stretches: list[Stretch]
    xi_grid: np.ndarray = field(default_factory=lambda: np.zeros(0))
    H: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def stretch_at(self, xi: float) -> Stretch:
        for s in self.stretches:
            if s.lo <= xi <= s.hi:
                return s
        return self.stretches[-1]

    def _gauss(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        nodes = a[:, None] + (b - a)[:, None] * _SMOOTH
        zc = critical_point(self.p, nodes, np.full_like(nodes, self.tau))
        return (np.angle(zc) / np.pi) @ _SMOOTH_W * (b - a)

    def _adaptive(self, a: np.ndarray, b: np.ndarray, depth: int = 0) -> np.ndarray:
        """Batched adaptive Gauss-Legendre on liquid pieces [a_k, b_k]."""
        if a.size == 0:
            return a
        m = 0.5 * (a + b)
        whole = self._gauss(a, b)
        halves = self._gauss(a, m) + self._gauss(m, b)
        bad = np.abs(whole - halves) > INTEGRATION_TOL * (b - a) + 1e-16
        bad &= (b - a) > 1e-10
        if depth >= 30 or bad.sum() > 4096:
            bad[:] = False
        out = halves
        if bad.any():
            k = int(bad.sum())
            sub = self._adaptive(np.concatenate([a[bad], m[bad]]), np.concatenate([m[bad], b[bad]]), depth + 1)
            out[bad] = sub[:k] + sub[k:]
        return out

    def _pieces(self, edges: np.ndarray):
        """Split consecutive intervals of `edges` by stretch; return (frozen part per cell, liquid pieces)."""
        ncell = len(edges) - 1
        frozen = np.zeros(ncell)
        owner, la, lb = [], [], []
        for s in self.stretches:
            lo = np.maximum(edges[:-1], s.lo)
            hi = np.minimum(edges[1:], s.hi)
            idx = np.nonzero(hi > lo)[0]
            if s.liquid:
                owner.append(idx)
                la.append(lo[idx])
                lb.append(hi[idx])
            else:
                frozen[idx] += s.slope * (hi[idx] - lo[idx])
        cat = lambda v: np.concatenate(v) if v else np.zeros(0)
        return frozen, cat(owner).astype(int), cat(la), cat(lb)

    def cell_integrals(self, edges: Sequence[float]) -> np.ndarray:
        """int over each [edges_k, edges_k+1] of (-d h / d xi)."""
        edges = np.asarray(edges, dtype=float)
        frozen, owner, a, b = self._pieces(edges)
        out = frozen
        np.add.at(out, owner, self._adaptive(a, b))
        return out

    def integral(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        return float(self.cell_integrals([a, b])[0])

    def fill(self, xi_grid: np.ndarray) -> None:
        self.xi_grid = np.asarray(xi_grid, dtype=float)
        cells = self.cell_integrals(np.append(self.xi_grid, self.xi_max)
                                    if self.xi_max > self.xi_grid[-1] else self.xi_grid)
        tail = cells[len(self.xi_grid) - 1:].sum()
        cells = cells[:len(self.xi_grid) - 1]
        self.H = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]]) + tail

    def height(self, xi: float) -> float:
        g = self.xi_grid
        if xi >= g[-1]:
            return self.integral(xi, self.xi_max)
        k = int(np.searchsorted(g, xi, side="right"))
        return float(self.H[k]) + self.integral(xi, g[k])


def row_structure(p: AsymptoticParams, tau: float, xi_max: float) -> Row:
    crossings = [c for c in row_crossings(p, tau) if c[0] < xi_max]
    cuts = [0.0] + [c[0] for c in crossings] + [xi_max]
    zs = [None] + [c[1] for c in crossings] + [None]
    raw = []
    for k in range(len(cuts) - 1):
        lo, hi = cuts[k], cuts[k + 1]
        if hi - lo <= 1e-14 * max(1.0, xi_max):
            continue
        mid = 0.5 * (lo + hi)
        # a tangency (double crossing) can leave a sliver whose midpoint sign is noise
        liquid = bool(is_liquid(p, mid, tau)) and hi - lo > 1e-7 * max(1.0, xi_max)
        raw.append([lo, hi, liquid, zs[k], zs[k + 1]])
    merged: list[list] = []
    for item in raw:
        if merged and merged[-1][2] == item[2]:
            merged[-1][1] = item[1]
            merged[-1][4] = item[4]
        else:
            merged.append(item)
    stretches = []
    for k, (lo, hi, liquid, zl, zr) in enumerate(merged):
        if liquid:
            stretches.append(Stretch(lo, hi, True))
            continue
        rightmost = k == len(merged) - 1
        cands = [z for z, edge in ((zl, k > 0), (zr, not rightmost)) if edge and z is not None]
        if not cands:
            raise BoundaryDetectionFailed(f"row tau={tau}: frozen stretch [{lo:.4g},{hi:.4g}] has no adjacent crossing")
        zones = [zone_of(p, z, rightmost) for z in cands]
        if len(set(zones)) != 1:
            if not p.conjectural:
                raise BoundaryDetectionFailed(f"row tau={tau}: inconsistent zones {set(zones)} on [{lo:.4g},{hi:.4g}]")
            # beta > 0: no continuity argument applies; follow the crossing on the right,
            # which is where the integration arrives from
            zones, cands = zones[-1:], cands[-1:]
        stretches.append(Stretch(lo, hi, False, zones[0], cands[0]))
    if not stretches:
        raise BoundaryDetectionFailed(f"row tau={tau}: empty row")
    return Row(p, tau, xi_max, stretches)


# ---------------------------------------------------------------- points

@dataclass(frozen=True)
class LiquidPoint:
    xi: float
    tau: float
    z_c: complex
    zone: str


def classify_point(p: AsymptoticParams, xi: float, tau: float, xi_max: float | None = None) -> LiquidPoint:
    if is_liquid(p, xi, tau):
        return LiquidPoint(xi, tau, complex(critical_point(p, xi, tau)), "LIQUID")
    xm = max(xi_max or boundary_xi_max(p), xi) * 1.0 + 1.0
    s = row_structure(p, tau, xm).stretch_at(xi)
    if s.liquid:  # discriminant borderline: fall back to the root
        return LiquidPoint(xi, tau, complex(critical_point(p, xi, tau)), "LIQUID")
    return LiquidPoint(xi, tau, complex(s.z), s.zone)


def height_gradient(lp: LiquidPoint, p: AsymptoticParams) -> tuple[float, float]:
    if lp.zone == "LIQUID":
        a = np.angle(lp.z_c)
        ab = np.angle(lp.z_c - p.beta)
        return float(-a / np.pi), float((ab - a) / np.pi)
    return frozen_gradient(p, lp.z_c.real)


# ---------------------------------------------------------------- surface

@dataclass
class ShapeGrid:
    p: AsymptoticParams
    tau_grid: np.ndarray
    xi_grid: np.ndarray
    xi_max: float
    rows: list[Row]
    H: np.ndarray
    L: np.ndarray | None = None
    boundary: list[BoundaryPoint] = field(default_factory=list)

    @property
    def W(self) -> list[tuple[float, float]]:
        return shape_W(self)


def boundary_xi_max(p: AsymptoticParams, taus: Sequence[float] | None = None) -> float:
    taus = np.linspace(0, 1, 101) if taus is None else taus
    best = 0.0
    for t in taus:
        cr = row_crossings(p, float(t))
        if cr:
            best = max(best, cr[-1][0])
    return best


def height_surface(p: AsymptoticParams, grid: Sequence[float], xi_max: float | None = None,
                   step: float | None = None, xi_points: int = 400, workers: int = 1) -> ShapeGrid:
    taus = np.asarray(grid, dtype=float)
    if xi_max is None:
        xi_max = 1.5 * boundary_xi_max(p, np.union1d(taus, np.linspace(0, 1, 101)))
    if step is None:
        step = xi_max / xi_points
    n = int(np.ceil(xi_max / step))
    xi_grid = np.linspace(0, n * step, n + 1)
    xi_grid = xi_grid[xi_grid <= xi_max + 1e-12]

    def build(t):
        row = row_structure(p, float(t), xi_max)
        row.fill(xi_grid)
        return row

    if workers > 1:
        # rows are independent; map keeps them in tau order
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(build, taus))
    else:
        rows = [build(t) for t in taus]
    H = np.array([r.H for r in rows])
    return ShapeGrid(p, taus, xi_grid, xi_max, rows, H)


def solve_L(p: AsymptoticParams, sg: ShapeGrid, tol: float = 1e-12) -> np.ndarray:
    L = np.empty(len(sg.tau_grid))
    for k, (t, row) in enumerate(zip(sg.tau_grid, sg.rows)):
        if t >= 1:
            L[k] = 0.0
            continue
        target = t + (1e-10 if t == 0 else 0.0)
        if row.H[0] < target - 1e-8:
            if sg.p.conjectural:
                # beta > 0: the surface need not reach tau at xi = 0; leave the row undefined
                L[k] = np.nan
                continue
            raise NoRoot(f"h(0, {t}) = {row.H[0]:.6g} < tau")
        idx = np.nonzero(row.H > target)[0]
        j = int(idx[-1]) if len(idx) else 0
        lo = row.xi_grid[j]
        hi = row.xi_grid[j + 1] if j + 1 < len(row.xi_grid) else row.xi_max
        while hi - lo > tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if row.height(mid) > target:
                lo = mid
            else:
                hi = mid
        L[k] = 0.5 * (lo + hi)
    sg.L = L
    return L


def shape_W(sg: ShapeGrid) -> list[tuple[float, float]]:
    if sg.L is None:
        solve_L(sg.p, sg)
    return [(float(l - 1), float(l - 1 + 2 * t)) for t, l in zip(sg.tau_grid, sg.L)]


def limit_shape(p: AsymptoticParams, tau_steps: int = 200, xi_points: int = 400,
                taus: Sequence[float] | None = None, step: float | None = None,
                workers: int = 1) -> ShapeGrid:
    """Full pipeline on a uniform tau grid (or the given one)."""
    taus = np.linspace(0, 1, tau_steps + 1) if taus is None else np.asarray(taus, dtype=float)
    sg = height_surface(p, taus, step=step, xi_points=xi_points, workers=workers)
    solve_L(p, sg)
    sg.boundary = frozen_boundary(p, default_z_grid(p))
    return sg


def shape_function(sg: ShapeGrid):
    """W as a callable of u (|u| outside the computed curve)."""
    pts = sorted(shape_W(sg))
    us = np.array([u for u, _ in pts])
    ws = np.array([w for _, w in pts])

    def W(u):
        u = np.asarray(u, dtype=float)
        inside = (u >= us[0]) & (u <= us[-1])
        return np.where(inside, np.interp(u, us, ws), np.abs(u))
    return W


# ---------------------------------------------------------------- diagnostics

def burgers_residual(p: AsymptoticParams, xi: float, tau: float, h: float) -> float:
    pts = [(xi + h, tau), (xi - h, tau), (xi, tau + h), (xi, tau - h), (xi, tau)]
    if not all(bool(is_liquid(p, a, b)) for a, b in pts):
        raise StencilLeavesLiquid(f"stencil of size {h} around ({xi}, {tau}) leaves the liquid region")
    z = [complex(critical_point(p, a, b)) for a, b in pts]
    dxi = (z[0] - z[1]) / (2 * h)
    dtau = (z[2] - z[3]) / (2 * h)
    return abs(dxi - (1 - z[4] / p.beta) * dtau)


def cusp_polynomial(p: AsymptoticParams) -> np.ndarray:
    """Descending coefficients of the cusp polynomial."""
    x, y, b = p.x, p.y, p.beta
    return np.array([x * (1 + x * y - x * b), -3 * x * y, 3 * x * y * b, y * (y - b - x * y * b)])


def cubic_discriminant(coeffs: Sequence[float]) -> float:
    a, b, c, d = coeffs
    return float(discriminant(a, b, c, d))


def cusp_discriminant_closed_form(p: AsymptoticParams) -> float:
    x, y, b = p.x, p.y, p.beta
    return -27 * x * x * y * y * (1 - x * b) ** 2 * (1 - x * y) ** 2 * (y - b) ** 2


def cusp_point(p: AsymptoticParams) -> tuple[float, float, float]:
    coeffs = cusp_polynomial(p)
    roots = solve_cubic(*coeffs)
    real = roots[np.argmin(np.abs(roots.imag))].real
    return float(boundary_xi(p, real)), float(boundary_tau(p, real)), float(real)


def vkls_omega(u):
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) <= 2
    uc = np.clip(u, -2, 2)
    val = 2 / np.pi * (uc * np.arcsin(uc / 2) + np.sqrt(4 - uc ** 2))
    return np.where(inside, val, np.abs(u))


def vkls_deviation(p: AsymptoticParams, tau_steps: int = 400, xi_points: int = 400,
                   workers: int = 1) -> tuple[float, ShapeGrid]:
    """(xy)^(-1/2) sup_u |W(u) - sqrt(xy) Omega(u / sqrt(xy))| on a tau grid dense where W departs from |u|."""
    r = np.sqrt(p.x * p.y)
    # W = |u| once tau exceeds the curved part; the curved part sits at tau of order sqrt(xy)
    reach = min(1.0, 12 * r + 4 * abs(p.beta) * p.y / r)
    taus = np.union1d(np.linspace(0, reach, tau_steps + 1), np.linspace(0, 1, 41))
    sg = height_surface(p, taus, xi_points=xi_points, workers=workers)
    solve_L(p, sg)
    pts = np.array(shape_W(sg))
    dev = np.abs(pts[:, 1] - r * vkls_omega(pts[:, 0] / r))
    return float(dev.max() / r), sg


def _angles(p: AsymptoticParams, xi: float, tau: float) -> tuple[float, float]:
    lp = classify_point(p, xi, tau)
    if lp.zone == "LIQUID":
        return float(np.angle(lp.z_c)), float(np.angle(lp.z_c - p.beta))
    z = lp.z_c.real
    return (np.pi if z < 0 else 0.0), (np.pi if z < p.beta else 0.0)


def L_slope(p: AsymptoticParams, L: float, tau: float) -> float:
    """dL/dtau predicted from the angles at (L, tau)."""
    a, b = _angles(p, L, tau)
    return -(np.pi - b + a) / a


def W_slope(p: AsymptoticParams, u: float, W: float) -> float:
    """dW/du predicted from the angles at (u + 1, (W - u) / 2)."""
    a, b = _angles(p, u + 1, (W - u) / 2)
    return (np.pi - b - a) / (np.pi - b + a)


def gradient_grid(sg: ShapeGrid) -> tuple[np.ndarray, np.ndarray]:
    """(d h / d xi, d h / d tau) at every grid node, frozen nodes from their zone."""
    p = sg.p
    gx = np.zeros(sg.H.shape)
    gt = np.zeros(sg.H.shape)
    for r, row in enumerate(sg.rows):
        for s in row.stretches:
            sel = (sg.xi_grid >= s.lo) & (sg.xi_grid <= s.hi)
            if not sel.any():
                continue
            if s.liquid:
                zc = critical_point(p, sg.xi_grid[sel], np.full(sel.sum(), row.tau))
                a = np.angle(zc)
                gx[r, sel] = -a / np.pi
                gt[r, sel] = (np.angle(zc - p.beta) - a) / np.pi
            else:
                gx[r, sel], gt[r, sel] = frozen_gradient(p, s.z)
    return gx, gt
