"""Partitions, particle encodings, rotated profiles and shared numerics.

Exact values are ``fractions.Fraction``; kernels and limit shapes use
Python/numpy complex floats. Conversions between the two are explicit.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Sequence, Union

Scalar = Union[Fraction, float, complex]


# ---------------------------------------------------------------- errors

class GrothendieckError(Exception):
    exit_code = 4


class UsageError(GrothendieckError):
    exit_code = 2


class RegimeError(GrothendieckError):
    exit_code = 3


class NumericError(GrothendieckError):
    exit_code = 4


class TooManyParts(UsageError): pass
class NotDecreasing(UsageError): pass
class IndexOutOfRange(UsageError): pass
class ZeroParameter(UsageError): pass
class UnsupportedIndex(UsageError): pass
class SizeLimit(UsageError): pass
class WrongSize(UsageError): pass
class InvalidRegime(RegimeError): pass
class DivergentSum(RegimeError): pass
class ContourInfeasible(RegimeError): pass
class SingularGram(NumericError): pass
class DegenerateAllZero(NumericError): pass
class BoundaryDetectionFailed(NumericError): pass
class PoleProximity(NumericError): pass
class NoRoot(NumericError): pass
class StencilLeavesLiquid(NumericError): pass


# ---------------------------------------------------------------- numbers

def rational(value) -> Fraction:
    """Parse ints, Fractions and strings like "1/3" or "-25" exactly."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted where exact rationals are required")
    return Fraction(value)


def to_complex(value: Scalar) -> complex:
    return complex(value)


def exact_det(matrix: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    a = [list(map(Fraction, row)) for row in matrix]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            f = a[r][col]
            if f:
                f /= p
                row_r, row_c = a[r], a[col]
                for c in range(col + 1, n):
                    row_r[c] -= f * row_c[c]
    return det


def exact_inverse(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    """Gauss-Jordan inverse over the rationals. Raises ZeroDivisionError if singular."""
    n = len(matrix)
    a = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [vr - f * vc for vr, vc in zip(a[r], a[col])]
    return [row[n:] for row in a]


# ---------------------------------------------------------------- partitions

@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]
    n_rows_cap: int | None = field(default=None, compare=False)

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p < 0 for p in parts):
            raise NotDecreasing(f"negative part in {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise NotDecreasing(f"parts not weakly decreasing: {parts}")
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        if self.n_rows_cap is not None and len(parts) > self.n_rows_cap:
            raise TooManyParts(f"{parts} has more than {self.n_rows_cap} parts")
        object.__setattr__(self, "parts", parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def part(self, j: int) -> int:
        """1-based part, zero beyond the length."""
        return self.parts[j - 1] if j <= len(self.parts) else 0

    def padded(self, N: int) -> tuple[int, ...]:
        if len(self.parts) > N:
            raise TooManyParts(f"{self.parts} has more than {N} parts")
        return self.parts + (0,) * (N - len(self.parts))

    @property
    def size(self) -> int:
        return sum(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return Partition(())
        return Partition(tuple(sum(1 for p in self.parts if p > i) for i in range(self.parts[0])))

    def to_json(self) -> str:
        return json.dumps(list(self.parts))

    @classmethod
    def from_json(cls, text: str, N: int | None = None) -> "Partition":
        return cls(tuple(json.loads(text)), N)


@dataclass(frozen=True)
class ParticleConfig:
    points: tuple[int, ...]

    def __post_init__(self):
        pts = tuple(int(p) for p in self.points)
        if any(p < 0 for p in pts) or any(pts[i] <= pts[i + 1] for i in range(len(pts) - 1)):
            raise NotDecreasing(f"particle positions must be strictly decreasing and >= 0: {pts}")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)


def partition_to_particles(lam: Partition, N: int) -> ParticleConfig:
    parts = lam.padded(N)
    return ParticleConfig(tuple(parts[j] + N - 1 - j for j in range(N)))


def particles_to_partition(X: ParticleConfig | Sequence[int]) -> Partition:
    if not isinstance(X, ParticleConfig):
        X = ParticleConfig(tuple(X))
    N = len(X)
    return Partition(tuple(X.points[j] - (N - 1 - j) for j in range(N)), N)


def enumerate_partitions(N: int, max_part: int) -> Iterator[Partition]:
    """All partitions with at most N parts, each at most max_part."""
    for combo in itertools.combinations_with_replacement(range(max_part, -1, -1), N):
        yield Partition(combo, N)


# ---------------------------------------------------------------- parameters

class Regime(Enum):
    STRICT = "STRICT"
    EXTENDED = "EXTENDED"
    OUTSIDE = "OUTSIDE"


@dataclass(frozen=True)
class ModelParams:
    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]
    betas: tuple[Fraction, ...]

    def __post_init__(self):
        xs = tuple(rational(v) for v in self.xs)
        ys = tuple(rational(v) for v in self.ys)
        betas = tuple(rational(v) for v in self.betas)
        if len(xs) != len(ys) or len(betas) != max(len(xs) - 1, 0) or not xs:
            raise WrongSize("need N x's, N y's and N-1 betas")
        for x in xs:
            for y in ys:
                if abs(x * y) >= 1:
                    raise DivergentSum(f"|x*y| = {abs(x * y)} >= 1")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "betas", betas)

    @classmethod
    def homogeneous_model(cls, N: int, x, y, beta) -> "ModelParams":
        return cls((rational(x),) * N, (rational(y),) * N, (rational(beta),) * (N - 1))

    @property
    def N(self) -> int:
        return len(self.xs)

    @property
    def homogeneous(self) -> bool:
        return len(set(self.xs)) == 1 and len(set(self.ys)) == 1 and len(set(self.betas)) <= 1

    @property
    def regime(self) -> Regime:
        if all(v >= 0 for v in self.xs + self.ys) and all(b <= 0 for b in self.betas):
            return Regime.STRICT
        ok = all(v > 0 for v in self.xs + self.ys) and all(
            b <= 1 / x and b <= y for b in self.betas for x in self.xs for y in self.ys)
        return Regime.EXTENDED if ok else Regime.OUTSIDE


# ---------------------------------------------------------------- profiles

@dataclass(frozen=True)
class Profile:
    """Piecewise-linear rotated profile; equal to |u| outside the breakpoints."""
    breakpoints: tuple[tuple[int, int], ...] = field(default=((0, 0),))

    def __call__(self, u: float | Fraction):
        bp = self.breakpoints
        if u <= bp[0][0] or u >= bp[-1][0]:
            return abs(u)
        lo, hi = 0, len(bp) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if bp[mid][0] <= u:
                lo = mid
            else:
                hi = mid
        (u0, v0), (u1, v1) = bp[lo], bp[hi]
        return v0 + (v1 - v0) * (u - u0) / (u1 - u0)

    def norm(self) -> Fraction:
        """Half the area between the profile and |u|."""
        us = sorted({u for u, _ in self.breakpoints} | {0})
        us = [u for u in us if self.breakpoints[0][0] <= u <= self.breakpoints[-1][0]]
        area = Fraction(0)
        for a, b in zip(us, us[1:]):
            fa = Fraction(self(a)) - abs(a)
            fb = Fraction(self(b)) - abs(b)
            area += (fa + fb) * (b - a) / 2
        return area / 2

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u", "v"])
        w.writerows(self.breakpoints)
        return buf.getvalue()


def profile_of(lam: Partition, N: int) -> Profile:
    """Boundary of the diagram rotated by 45 degrees: (col, row) -> (col - row, col + row).

    The corner (lam_i, i) lands at u = lam_i - i, v = lam_i + i, so the particle
    l_i = lam_i + N - i sits at u = l_i - N.
    """
    parts = lam.padded(N)
    rows = len(lam)
    path = [(0, rows)]
    for i in range(rows, 0, -1):
        path.append((parts[i - 1], i))
        path.append((parts[i - 1], i - 1))
    pts = []
    for x, y in path:
        p = (x - y, x + y)
        if not pts or pts[-1] != p:
            pts.append(p)
    # drop interior points of straight segments
    out = [pts[0]]
    for k in range(1, len(pts) - 1):
        (u0, v0), (u1, v1), (u2, v2) = out[-1], pts[k], pts[k + 1]
        if (v1 - v0) * (u2 - u1) != (v2 - v1) * (u1 - u0):
            out.append(pts[k])
    if len(pts) > 1:
        out.append(pts[-1])
    return Profile(tuple(out))
