"""Two-dimensional process, its correlation kernels and marginals.

Levels m = 1..N each carry N particles x^m_1 > ... > x^m_N, and going from
level m to m+1 every particle stays or moves one step left. The diagonal
(x^1_1, x^2_2, ..., x^N_N) has the law of the one-level ensemble.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .core import (ContourInfeasible, IndexOutOfRange, SingularGram, UnsupportedIndex, WrongSize,
                   exact_det, exact_inverse)
from .measures import (GrothendieckModel, TiltedEnsemble, elementary_neg, gram_matrix,
                       normalization)


@dataclass(frozen=True)
class Config2D:
    x: tuple[tuple[int, ...], ...]

    @property
    def N(self) -> int:
        return len(self.x)

    def is_valid(self) -> bool:
        N = self.N
        for row in self.x:
            if len(row) != N or row[-1] < 0 or any(row[j] <= row[j + 1] for j in range(N - 1)):
                return False
        return all(self.x[m][j] - self.x[m + 1][j] in (0, 1)
                   for m in range(N - 1) for j in range(N))

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.x[m][m] for m in range(self.N))


@dataclass(frozen=True)
class KernelQuery:
    a: int
    t: int
    b: int
    s: int


def weight_2d(E: TiltedEnsemble, X: Config2D) -> Fraction:
    if X.N != E.N or not X.is_valid():
        return Fraction(0)
    N = E.N
    top = exact_det([[E.phi[i](X.x[0][j]) for j in range(N)] for i in range(N)])
    if top == 0:
        return top
    bottom = exact_det([[E.psi[i](X.x[N - 1][j]) for j in range(N)] for i in range(N)])
    w = top * bottom
    for m in range(N - 1):
        drop = sum(X.x[m]) - sum(X.x[m + 1])
        w *= (-E.betas[m]) ** drop
    return w


def enumerate_configs_2d(N: int, cap: int) -> Iterator[Config2D]:
    """All valid configurations with x[m][1] <= cap."""
    def below(row):
        for drops in itertools.product((0, 1), repeat=N):
            nxt = tuple(p - d for p, d in zip(row, drops))
            if nxt[-1] >= 0 and all(nxt[j] > nxt[j + 1] for j in range(N - 1)):
                yield nxt

    def extend(levels):
        if len(levels) == N:
            yield Config2D(tuple(levels))
            return
        for nxt in below(levels[-1]):
            yield from extend(levels + [nxt])

    for top in itertools.combinations(range(cap, -1, -1), N):
        yield from extend([top])


# ---------------------------------------------------------------- Eynard-Mehta kernel

class EMKernel:
    """Exact kernel K(a, t; b, s) of the 2D process, with the Gram inverse cached."""

    def __init__(self, E: TiltedEnsemble):
        self.E = E
        G = gram_matrix(E)
        try:
            self.Ginv = exact_inverse(G)
        except ZeroDivisionError:
            raise SingularGram("Gram matrix is singular") from None
        self._phi = lru_cache(maxsize=None)(self._phi_raw)
        self._psi = lru_cache(maxsize=None)(self._psi_raw)

    def _phi_raw(self, i: int, t: int, a: int) -> Fraction:
        return self.E.apply_D_range(self.E.phi[i], 1, t, a)

    def _psi_raw(self, j: int, s: int, b: int) -> Fraction:
        return self.E.apply_D_dagger_range(self.E.psi[j], s, self.E.N, b)

    def __call__(self, a: int, t: int, b: int, s: int) -> Fraction:
        N = self.E.N
        if not (1 <= t <= N and 1 <= s <= N):
            raise IndexOutOfRange(f"levels ({t}, {s}) outside 1..{N}")
        val = Fraction(0)
        if t > s and 0 <= b - a <= t - s:
            val -= elementary_neg(self.E.betas[s - 1:t - 1])[b - a]
        for i in range(N):
            pa = self._phi(i, t, a)
            if pa == 0:
                continue
            for j in range(N):
                g = self.Ginv[j][i]
                if g:
                    val += g * pa * self._psi(j, s, b)
        return val

    def matrix(self, pts: Sequence[tuple[int, int]]) -> list[list[Fraction]]:
        return [[self(a, t, b, s) for (b, s) in pts] for (a, t) in pts]


def em_kernel(E: TiltedEnsemble, q: KernelQuery) -> Fraction:
    return _em_cached(E)(q.a, q.t, q.b, q.s)


@lru_cache(maxsize=32)
def _em_cached(E: TiltedEnsemble) -> EMKernel:
    return EMKernel(E)


# ---------------------------------------------------------------- contour kernel

def contour_radii(M: GrothendieckModel, t: int, s: int) -> tuple[float, float]:
    """Circle radii (R_z, R_w) placed in log space between the singularities."""
    xs = [float(v) for v in M.xs]
    ys = [abs(float(v)) for v in M.ys]
    zb = [abs(float(b)) for b in M.betas[t - 1:]]
    upper = min((1 / x for x in xs if x > 0), default=np.inf)
    lz = max(zb, default=0.0)
    ymax = max(ys)
    if t <= s:
        lo = max(lz, ymax)
        if not lo < upper:
            raise ContourInfeasible(f"no radii with {lo:.4g} < |w| < |z| < {upper:.4g}")
        if lo == 0:
            lo = min(upper, 1.0) * 1e-3
        if not np.isfinite(upper):
            upper = max(lo, 1.0) * 1e3
        step = (np.log(upper) - np.log(lo)) / 3
        return float(np.exp(np.log(lo) + 2 * step)), float(np.exp(np.log(lo) + step))
    if not lz < upper:
        raise ContourInfeasible(f"no radius with {lz:.4g} < |z| < {upper:.4g}")
    if lz == 0:
        lz = min(upper, 1.0) * 1e-3
    if not np.isfinite(upper):
        upper = max(lz, 1.0) * 1e3
    rz = float(np.sqrt(lz * upper))
    return rz, 2.0 * max(rz, ymax)


def _F(M: GrothendieckModel, t: int, z: np.ndarray) -> np.ndarray:
    out = np.ones_like(z)
    for x, y in zip(M.xs, M.ys):
        out = out * (1 - float(y) / z) / (1 - z * float(x))
    for b in M.betas[t - 1:]:
        out = out / (1 - float(b) / z)
    return out


def contour_kernel(M: GrothendieckModel, q: KernelQuery, nodes: int = 512) -> complex:
    """Double contour integral by the trapezoidal rule on two circles."""
    N = M.N
    a, t, b, s = q.a, q.t, q.b, q.s
    if not (1 <= t <= N and 1 <= s <= N):
        raise IndexOutOfRange(f"levels ({t}, {s}) outside 1..{N}")
    rz, rw = contour_radii(M, t, s)
    theta = 2 * np.pi * (np.arange(nodes) + 0.5) / nodes
    z = rz * np.exp(1j * theta)
    w = rw * np.exp(1j * theta)
    g = z ** (N - a) * _F(M, t, z)
    h = w ** (b - N + 1) / _F(M, s, w)
    total = 0j
    chunk = max(1, 2 ** 22 // nodes)
    for k in range(0, nodes, chunk):
        zk = z[k:k + chunk, None]
        total += np.sum(g[k:k + chunk, None] * h[None, :] / (zk - w[None, :]))
    return complex(total / (nodes * nodes))


# ---------------------------------------------------------------- marginals

@dataclass(frozen=True)
class CorrelationSpec:
    indices: tuple[int, ...]
    targets: tuple[int, ...]

    def __post_init__(self):
        if len(self.indices) != len(self.targets):
            raise WrongSize("one target per index")
        if any(i >= j for i, j in zip(self.indices, self.indices[1:])):
            raise IndexOutOfRange("indices must be strictly increasing")
        if any(a <= b for a, b in zip(self.targets, self.targets[1:])) or any(a < 0 for a in self.targets):
            raise IndexOutOfRange("targets must be strictly decreasing and nonnegative")


def _coefficient_weights(degree: int, power: int) -> list[Fraction]:
    """Weights c_k with sum_k c_k p(k) = [z^power] p(z) for deg p <= degree, nodes 0..degree."""
    if power > degree:
        return [Fraction(0)] * (degree + 1)
    V = [[Fraction(k) ** n for n in range(degree + 1)] for k in range(degree + 1)]
    Vinv = exact_inverse(V)  # coefficients = Vinv @ values
    return Vinv[power]


def marginal_probability(E: TiltedEnsemble, spec: CorrelationSpec) -> Fraction:
    """Probability that l_{i_p} = a_p for all p, by generating-function coefficient extraction."""
    if not spec.indices:
        return Fraction(1)
    N = E.N
    if spec.indices[0] < 1 or spec.indices[-1] > N:
        raise IndexOutOfRange(f"indices {spec.indices} outside 1..{N}")
    K = _em_cached(E)
    pts: list[tuple[int, int]] = []
    owner: list[tuple[int, str]] = []
    for p, (i, a) in enumerate(zip(spec.indices, spec.targets)):
        for c in range(a):
            pts.append((c, i))
            owner.append((p, "z"))
        pts.append((a, i))
        owner.append((p, "w"))
    Kmat = K.matrix(pts)
    k = len(spec.indices)
    zdeg = [min(a, N) for a in spec.targets]
    zweights = [_coefficient_weights(d, N - i) for d, i in zip(zdeg, spec.indices)]
    n = len(pts)
    total = Fraction(0)
    for zvals in itertools.product(*[range(d + 1) for d in zdeg]):
        cz = Fraction(1)
        for p, zv in enumerate(zvals):
            cz *= zweights[p][zv]
        if cz == 0:
            continue
        for wvals in itertools.product((0, 1), repeat=k):
            cw = 1
            for wv in wvals:
                cw *= 1 if wv == 1 else -1
            scale = [1 - (zvals[p] if kind == "z" else wvals[p]) for p, kind in owner]
            mat = [[(1 if u == v else 0) - scale[v] * Kmat[u][v] for v in range(n)] for u in range(n)]
            total += cz * cw * exact_det(mat)
    return total


def correlation_function(E: TiltedEnsemble, points: Sequence[int]) -> Fraction:
    """Probability that every given position is occupied by some l_i."""
    pts = sorted(set(int(p) for p in points), reverse=True)
    if len(pts) != len(list(points)):
        raise WrongSize("points must be pairwise distinct")
    if not pts:
        return Fraction(1)
    total = Fraction(0)
    for I in itertools.combinations(range(1, E.N + 1), len(pts)):
        total += marginal_probability(E, CorrelationSpec(I, tuple(pts)))
    return total


def diagonal_kernel_det(E: TiltedEnsemble, ells: Sequence[int]) -> Fraction:
    """det[K(l_i, i; l_j, j)], which equals the weight only when all gaps are >= 2."""
    K = _em_cached(E)
    return exact_det(K.matrix([(l, i + 1) for i, l in enumerate(ells)]))


def diagonal_marginal(E: TiltedEnsemble, cap: int) -> dict[tuple[int, ...], Fraction]:
    """Normalized law of (x^1_1, ..., x^N_N) from brute-force enumeration."""
    Z = normalization(E)
    out: dict = {}
    for X in enumerate_configs_2d(E.N, cap):
        w = weight_2d(E, X)
        if w:
            d = X.diagonal()
            out[d] = out.get(d, Fraction(0)) + w / Z
    return out


# ---------------------------------------------------------------- N = 2 closed forms

def one_point_closed_form(M: GrothendieckModel, i: int) -> Fraction:
    if M.N != 2 or not M.params.homogeneous:
        raise WrongSize("closed forms are for N = 2 with homogeneous parameters")
    x, y, b = M.xs[0], M.ys[0], M.betas[0]
    base = (x * y) ** (2 * i) * (1 - x * x * y * y)
    tail = (1 - x * y) ** 4 / (1 - b * x) ** 2
    if i == 0:
        return base
    if i == 1:
        return base + tail
    if i == 2:
        return base + x * tail * (b * (b * x - 2) + x * y * y + y * (4 - 2 * b * x))
    if i == 3:
        return base + x * x * y * tail * (x * x * y ** 3 + y * (b * b * x * x - 8 * b * x + 9)
                                          + 2 * b * (2 * b * x - 3) - 2 * x * y * y * (b * x - 2))
    raise UnsupportedIndex(f"closed form known only for positions 0..3, got {i}")


def two_point_closed_form(M: GrothendieckModel, i: int, j: int) -> Fraction:
    """Weight of lambda = (i - 1, j), equal to the two-point correlation at {i > j}."""
    if M.N != 2 or not M.params.homogeneous:
        raise WrongSize("closed forms are for N = 2 with homogeneous parameters")
    if not i > j >= 0:
        raise UnsupportedIndex("need i > j >= 0")
    x, y, b = M.xs[0], M.ys[0], M.betas[0]
    return ((1 - x * y) ** 4 / (1 - x * b) ** 2 * x ** (i + j - 1) * y ** (i + j - 2)
            * (b * x * (i - j - 1) - i + j) * ((j - i) * (y - b) - b))
