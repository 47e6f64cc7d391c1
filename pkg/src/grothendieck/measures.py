"""Tilted biorthogonal ensembles and the Grothendieck measure.

An ensemble is N functions phi_i, N functions psi_j on {0, 1, 2, ...} and
N-1 tilt parameters beta_r. The shift-difference operators

    D_r f(k)      = f(k) - beta_r f(k+1)
    D^dag_r f(k)  = f(k) - beta_r f(k-1) [k >= 1]

commute, so products over a range of r expand with elementary symmetric
polynomials of (-beta_r).  All arithmetic here is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Mapping, Sequence, Union

from .core import (DivergentSum, IndexOutOfRange, InvalidRegime, ModelParams, Partition,
                   ParticleConfig, SingularGram, WrongSize, ZeroParameter, exact_det,
                   rational)


# ---------------------------------------------------------------- descriptors

@dataclass(frozen=True)
class Geometric:
    """k -> C(k, order) * base**(k - order), i.e. the order-th derivative of base**k over order!.

    order > 0 is used for repeated parameters: it spans the same space as the
    limit of distinct geometric functions.
    """
    base: Fraction
    order: int = 0

    def __call__(self, k: int) -> Fraction:
        if k < self.order:
            return Fraction(0)
        return comb(k, self.order) * Fraction(self.base) ** (k - self.order)


@dataclass(frozen=True)
class FiniteSupport:
    values: tuple[tuple[int, Fraction], ...]

    @classmethod
    def from_dict(cls, d: Mapping[int, object]) -> "FiniteSupport":
        return cls(tuple(sorted((int(k), rational(v)) for k, v in d.items())))

    def __call__(self, k: int) -> Fraction:
        for kk, v in self.values:
            if kk == k:
                return v
        return Fraction(0)

    @property
    def support_max(self) -> int:
        return max((k for k, v in self.values if v != 0), default=-1)


Descriptor = Union[Geometric, FiniteSupport, Callable[[int], Fraction]]


def elementary_neg(betas: Sequence[Fraction]) -> list[Fraction]:
    """Coefficients e_m(-b_1, ..., -b_n), m = 0..n, i.e. of prod(1 - b t)."""
    e = [Fraction(1)]
    for b in betas:
        e = [a - b * c for a, c in zip(e + [Fraction(0)], [Fraction(0)] + e)]
    return e


@dataclass(frozen=True)
class TiltedEnsemble:
    N: int
    phi: tuple
    psi: tuple
    betas: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.phi) != self.N or len(self.psi) != self.N or len(self.betas) != self.N - 1:
            raise WrongSize("ensemble needs N phi's, N psi's and N-1 betas")
        object.__setattr__(self, "betas", tuple(rational(b) for b in self.betas))

    def beta(self, r: int) -> Fraction:
        if not 1 <= r <= self.N - 1:
            raise IndexOutOfRange(f"operator index {r} outside 1..{self.N - 1}")
        return self.betas[r - 1]

    def _range(self, a: int, b: int) -> list[Fraction]:
        if a < 1 or b > self.N or a > b:
            raise IndexOutOfRange(f"operator range [{a},{b}) outside [1,{self.N})")
        return list(self.betas[a - 1:b - 1])

    def apply_D(self, f: Descriptor, r: int, k: int) -> Fraction:
        return f(k) - self.beta(r) * f(k + 1)

    def apply_D_dagger(self, f: Descriptor, r: int, k: int) -> Fraction:
        b = self.beta(r)
        return f(k) - b * f(k - 1) if k >= 1 else f(k)

    def apply_D_range(self, f: Descriptor, a: int, b: int, k: int) -> Fraction:
        """D^{[a,b)} = D_a D_{a+1} ... D_{b-1}."""
        e = elementary_neg(self._range(a, b))
        return sum((c * f(k + m) for m, c in enumerate(e)), Fraction(0))

    def apply_D_dagger_range(self, f: Descriptor, a: int, b: int, k: int) -> Fraction:
        e = elementary_neg(self._range(a, b))
        return sum((c * f(k - m) for m, c in enumerate(e) if k - m >= 0), Fraction(0))


def apply_D(E: TiltedEnsemble, f: Descriptor, r: int, k: int) -> Fraction:
    return E.apply_D(f, r, k)


def apply_D_dagger(E: TiltedEnsemble, f: Descriptor, r: int, k: int) -> Fraction:
    return E.apply_D_dagger(f, r, k)


def tilted_weight(E: TiltedEnsemble, X: ParticleConfig | Sequence[int]) -> Fraction:
    pts = X.points if isinstance(X, ParticleConfig) else tuple(X)
    N = E.N
    if len(pts) != N:
        return Fraction(0)
    left = [[E.apply_D_range(E.phi[i], 1, j, pts[j - 1]) for j in range(1, N + 1)] for i in range(N)]
    right = [[E.apply_D_dagger_range(E.psi[i], j, N, pts[j - 1]) for j in range(1, N + 1)]
             for i in range(N)]
    return exact_det(left) * exact_det(right)


# ---------------------------------------------------------------- Gram matrix

def _series_mul(A: dict, B: dict, d: int, e: int) -> dict:
    out: dict = {}
    for (i, j), a in A.items():
        for (k, l), b in B.items():
            if i + k <= d and j + l <= e:
                out[(i + k, j + l)] = out.get((i + k, j + l), 0) + a * b
    return out


def _geometric_pair_sum(x: Fraction, dx: int, y: Fraction, dy: int, m: int) -> Fraction:
    """sum_k Geometric(y, dy)(k) * Geometric(x, dx)(k + m) in closed form.

    Equals the (dx, dy) Taylor coefficient of x**m / (1 - x y), computed with
    truncated bivariate series in (a, b) = (x - x0, y - y0).
    """
    c = 1 - x * y
    # v = y0 a + x0 b + a b, and 1/(c - v) = sum v^n / c^(n+1)
    v = {(1, 0): y, (0, 1): x, (1, 1): Fraction(1)}
    inv: dict = {(0, 0): 1 / c}
    power = {(0, 0): Fraction(1)}
    for n in range(1, dx + dy + 1):
        power = _series_mul(power, v, dx, dy)
        for key, val in power.items():
            inv[key] = inv.get(key, 0) + val / c ** (n + 1)
    xm = {(p, 0): comb(m, p) * x ** (m - p) for p in range(min(m, dx) + 1)}
    return _series_mul(xm, inv, dx, dy).get((dx, dy), Fraction(0))


def gram_matrix(E: TiltedEnsemble) -> list[list[Fraction]]:
    N = E.N
    e = elementary_neg(list(E.betas))
    G = [[Fraction(0)] * N for _ in range(N)]
    for i, ph in enumerate(E.phi):
        for j, ps in enumerate(E.psi):
            if isinstance(ph, Geometric) and isinstance(ps, Geometric):
                if abs(ph.base * ps.base) >= 1:
                    raise DivergentSum(f"|x*y| >= 1 for x={ph.base}, y={ps.base}")
                G[i][j] = sum((c * _geometric_pair_sum(ph.base, ph.order, ps.base, ps.order, m)
                               for m, c in enumerate(e)), Fraction(0))
            else:
                if isinstance(ps, FiniteSupport):
                    ks = [k for k, _ in ps.values]
                elif isinstance(ph, FiniteSupport):
                    ks = range(ph.support_max + 1)
                else:
                    raise DivergentSum("Gram sum needs a closed form or a finite support")
                G[i][j] = sum((ps(k) * E.apply_D_range(ph, 1, N, k) for k in ks), Fraction(0))
    return G


def normalization(E: TiltedEnsemble) -> Fraction:
    Z = exact_det(gram_matrix(E))
    if Z == 0:
        raise SingularGram("Gram matrix is singular; the weights cannot be normalized")
    return Z


# ---------------------------------------------------------------- polynomials

def _poly_mul(p: list, q: list) -> list:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _poly_derivative_value(p: list, k: int, v: Fraction) -> Fraction:
    """p^{(k)}(v) / k!"""
    return sum((comb(n, k) * c * v ** (n - k) for n, c in enumerate(p) if n >= k and c), Fraction(0))


def confluent_bialternant(columns: Sequence[list], values: Sequence[Fraction]) -> Fraction:
    """det[f_j(v_i)] / prod_{i<j}(v_i - v_j), with repeated v's resolved by derivative rows."""
    N = len(values)
    order: list[tuple[Fraction, int]] = []
    seen: dict = {}
    for v in values:
        seen[v] = seen.get(v, 0) + 1
        order.append((v, seen[v] - 1))
    num = [[_poly_derivative_value(f, k, v) for f in columns] for v, k in order]
    mono = [[Fraction(0)] * (N - 1 - j) + [Fraction(1)] for j in range(N)]
    den = [[_poly_derivative_value(f, k, v) for f in mono] for v, k in order]
    return exact_det(num) / exact_det(den)


# ---------------------------------------------------------------- Grothendieck

@dataclass(frozen=True)
class GrothendieckModel:
    params: ModelParams

    @classmethod
    def homogeneous(cls, N: int, x, y, beta) -> "GrothendieckModel":
        return cls(ModelParams.homogeneous_model(N, x, y, beta))

    @classmethod
    def from_vectors(cls, xs, ys, betas) -> "GrothendieckModel":
        return cls(ModelParams(tuple(xs), tuple(ys), tuple(betas)))

    @property
    def N(self) -> int:
        return self.params.N

    @property
    def xs(self):
        return self.params.xs

    @property
    def ys(self):
        return self.params.ys

    @property
    def betas(self):
        return self.params.betas

    def ensemble(self) -> TiltedEnsemble:
        """Geometric specialization; repeated parameters get derivative descriptors."""
        def descriptors(vals):
            seen: dict = {}
            out = []
            for v in vals:
                out.append(Geometric(v, seen.get(v, 0)))
                seen[v] = seen.get(v, 0) + 1
            return tuple(out)
        return TiltedEnsemble(self.N, descriptors(self.xs), descriptors(self.ys), self.betas)


def _as_parts(lam, N: int) -> list[int]:
    if isinstance(lam, Partition):
        return list(lam.padded(N))
    parts = [int(p) for p in lam]
    if len(parts) > N:
        raise WrongSize(f"{parts} has more than {N} entries")
    return parts + [0] * (N - len(parts))


def _G_columns(parts: list[int], betas: Sequence[Fraction]) -> list[list]:
    N = len(parts)
    cols = []
    for j in range(1, N + 1):
        p = [Fraction(0)] * (parts[j - 1] + N - j) + [Fraction(1)]
        for r in range(1, j):
            p = _poly_mul(p, [Fraction(1), -betas[r - 1]])
        cols.append(p)
    return cols


def g_bialternant(parts: Sequence[int], xs: Sequence[Fraction], betas: Sequence[Fraction]) -> Fraction:
    """G for an integer vector of length N and raw parameter lists.

    Negative entries are handled by the shift G_{lambda + c} = (x_1...x_N)^c G_lambda.
    """
    parts = list(parts)
    shift = max(0, -min(parts))
    value = confluent_bialternant(_G_columns([p + shift for p in parts], betas), xs)
    if shift:
        prod = Fraction(1)
        for x in xs:
            prod *= x
        if prod == 0:
            raise ZeroParameter("shift normalization needs nonzero x's")
        value /= prod ** shift
    return value


def grothendieck_G(lam, M: GrothendieckModel | ModelParams) -> Fraction:
    P = M.params if isinstance(M, GrothendieckModel) else M
    return g_bialternant(_as_parts(lam, P.N), P.xs, P.betas)


def grothendieck_Gbar(lam, M: GrothendieckModel | ModelParams) -> Fraction:
    """Dual bialternant with factors (1 - beta_j / y)...(1 - beta_{N-1} / y).

    Column j is y^(l_j - (N - j)) * prod_{r=j}^{N-1} (y - beta_r), a polynomial.
    """
    P = M.params if isinstance(M, GrothendieckModel) else M
    N = P.N
    if any(y == 0 for y in P.ys):
        raise ZeroParameter("Gbar needs nonzero y's")
    parts = _as_parts(lam, N)
    if min(parts) < 0:
        raise WrongSize("Gbar is defined on partitions")
    cols = []
    for j in range(1, N + 1):
        p = [Fraction(0)] * parts[j - 1] + [Fraction(1)]
        for r in range(j, N):
            p = _poly_mul(p, [-P.betas[r - 1], Fraction(1)])
        cols.append(p)
    return confluent_bialternant(cols, P.ys)


def gbar_by_reversal(lam, M: GrothendieckModel | ModelParams) -> Fraction:
    """Gbar_lambda(y | beta) computed as G_{lambda^rev}(1/y | reversed beta)."""
    P = M.params if isinstance(M, GrothendieckModel) else M
    if any(y == 0 for y in P.ys):
        raise ZeroParameter("reversal needs nonzero y's")
    parts = _as_parts(lam, P.N)
    rev = [-p for p in reversed(parts)]
    return g_bialternant(rev, [1 / y for y in P.ys], list(reversed(P.betas)))


def prefactor(M: GrothendieckModel | ModelParams) -> Fraction:
    """prod(1 - x_i y_j) / prod(1 - x_i beta_r)."""
    P = M.params if isinstance(M, GrothendieckModel) else M
    num = Fraction(1)
    for x in P.xs:
        for y in P.ys:
            num *= 1 - x * y
    den = Fraction(1)
    for x in P.xs:
        for b in P.betas:
            den *= 1 - x * b
    if den == 0:
        raise InvalidRegime("some beta_r equals 1/x_i: normalization vanishes")
    return num / den


def grothendieck_weight(lam, M: GrothendieckModel | ModelParams) -> Fraction:
    return prefactor(M) * grothendieck_G(lam, M) * grothendieck_Gbar(lam, M)


def cauchy_normalization(M: GrothendieckModel | ModelParams) -> Fraction:
    """Closed form of det G for the geometric specialization (zero for repeated parameters)."""
    P = M.params if isinstance(M, GrothendieckModel) else M
    N = P.N
    val = 1 / prefactor(P)
    for i in range(N):
        for j in range(i + 1, N):
            val *= (P.xs[i] - P.xs[j]) * (P.ys[i] - P.ys[j])
    return val


def schur_weight(lam, M: GrothendieckModel | ModelParams) -> Fraction:
    """Schur measure prod(1 - x_i y_j) s_lambda(x) s_lambda(y), the beta = 0 case."""
    P = M.params if isinstance(M, GrothendieckModel) else M
    Z = ModelParams(P.xs, P.ys, (Fraction(0),) * (P.N - 1))
    return grothendieck_weight(lam, Z)


def truncated_total(M: GrothendieckModel | ModelParams, tol: float = 1e-10,
                    start: int = 8, max_part_limit: int = 512) -> tuple[Fraction, int]:
    """Sum of weights over lambda_1 <= M, doubling M until the increment is below tol."""
    from .core import enumerate_partitions
    P = M.params if isinstance(M, GrothendieckModel) else M
    total = Fraction(0)
    done = -1
    m = start
    while True:
        inc = Fraction(0)
        for lam in enumerate_partitions(P.N, m):
            if lam.part(1) > done:
                inc += grothendieck_weight(lam, P)
        total += inc
        done = m
        if abs(inc) < tol or m >= max_part_limit:
            return total, m
        m *= 2
