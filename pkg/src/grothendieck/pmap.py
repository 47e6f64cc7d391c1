"""Principal minors, cycle sums and the Nanson-type membership tests.

A table of 2^n numbers A_I comes from a genuine n x n matrix only if certain
polynomial relations hold between the cycle sums T_I. The order-4 relation is
an explicit 4 x 4 determinant; for n >= 5 the relation is a product over sign
choices of square roots and is evaluated numerically.
"""
from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterator, Mapping, Sequence

import numpy as np

from .core import SizeLimit, WrongSize, exact_det
from .measures import GrothendieckModel
from .schur2d import correlation_function


@dataclass(frozen=True)
class MinorTable:
    n: int
    values: Mapping[frozenset, object]

    def __getitem__(self, I) -> object:
        return self.values[frozenset(I)]


@dataclass(frozen=True)
class ClusterTable:
    n: int
    values: Mapping[frozenset, object]

    def __getitem__(self, I) -> object:
        return self.values[frozenset(I)]


def _subsets(n: int, min_size: int = 0) -> Iterator[tuple[int, ...]]:
    for k in range(min_size, n + 1):
        yield from itertools.combinations(range(1, n + 1), k)


def principal_minors(A: Sequence[Sequence]) -> MinorTable:
    n = len(A)
    if n > 12:
        raise SizeLimit(f"{n} x {n} is beyond the 12 x 12 guard")
    exact = all(isinstance(v, (int, Fraction)) for row in A for v in row)
    vals: dict = {}
    for I in _subsets(n):
        sub = [[A[i - 1][j - 1] for j in I] for i in I]
        if not I:
            vals[frozenset()] = Fraction(1) if exact else 1.0
        elif exact:
            vals[frozenset(I)] = exact_det(sub)
        else:
            vals[frozenset(I)] = complex(np.linalg.det(np.array(sub, dtype=complex)))
    return MinorTable(n, vals)


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


def cluster_from_minors(m: MinorTable) -> ClusterTable:
    """T_I = sum over set partitions of I into blocks of (-1)^(|I|+#blocks) (#blocks-1)! prod A_block."""
    vals: dict = {}
    for I in _subsets(m.n, 2):
        k = len(I)
        total = 0
        for part in set_partitions(list(I)):
            b = len(part)
            term = (-1) ** (k + b) * factorial(b - 1)
            for block in part:
                term = term * m[block]
            total = total + term
        vals[frozenset(I)] = total
    return ClusterTable(m.n, vals)


def cycle_sums(A: Sequence[Sequence]) -> ClusterTable:
    """Direct sums of a_{i,pi(i)} products over full cycles pi on I."""
    n = len(A)
    vals: dict = {}
    for I in _subsets(n, 2):
        first, rest = I[0], I[1:]
        total = 0
        for perm in itertools.permutations(rest):
            cyc = (first,) + perm
            term = 1
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                term = term * A[a - 1][b - 1]
            total = total + term
        vals[frozenset(I)] = total
    return ClusterTable(n, vals)


def nanson4(T: ClusterTable):
    """Half the determinant of the order-4 Nanson matrix; zero on genuine cluster tables."""
    if T.n != 4:
        raise WrongSize("nanson4 needs a table with n = 4")
    t = lambda *I: T[I]
    rows = [
        [t(1, 2, 3) * t(1, 4), t(1, 2, 4) * t(1, 3), t(1, 3, 4) * t(1, 2),
         2 * t(1, 2) * t(1, 3) * t(1, 4) * t(2, 3, 4) + t(1, 2, 3) * t(1, 2, 4) * t(1, 3, 4)],
        [t(1, 2, 4) * t(2, 3), t(1, 2, 3) * t(2, 4), t(2, 3, 4) * t(1, 2),
         2 * t(1, 2) * t(2, 3) * t(2, 4) * t(1, 3, 4) + t(1, 2, 3) * t(1, 2, 4) * t(2, 3, 4)],
        [t(1, 3, 4) * t(2, 3), t(2, 3, 4) * t(1, 3), t(1, 2, 3) * t(3, 4),
         2 * t(1, 3) * t(2, 3) * t(3, 4) * t(1, 2, 4) + t(1, 2, 3) * t(1, 3, 4) * t(2, 3, 4)],
        [t(2, 3, 4) * t(1, 4), t(1, 3, 4) * t(2, 4), t(1, 2, 4) * t(3, 4),
         2 * t(1, 4) * t(2, 4) * t(3, 4) * t(1, 2, 3) + t(1, 2, 4) * t(1, 3, 4) * t(2, 3, 4)],
    ]
    if all(isinstance(v, (int, Fraction)) for row in rows for v in row):
        return exact_det(rows) / 2
    return complex(np.linalg.det(np.array(rows, dtype=complex))) / 2


@dataclass(frozen=True)
class NansonResult:
    value: complex
    scale: float
    factors: int
    closest: float

    @property
    def relative(self) -> float:
        return abs(self.value) / self.scale if self.scale else 0.0


def nanson_n(T: ClusterTable, n: int | None = None) -> NansonResult:
    """Product over sign assignments of the square roots R_ij of

        2^(n-2) T_12...T_1n T_{2..n} - 1/2 sum_sigma prod (T_{1ab} +- R_ab)

    where sigma runs over the (n-1)-cycles on {2..n}. Assignments related by a
    global sign flip give the same factor and are counted once. ``scale`` is the
    product over factors of the sum of absolute values of their terms, and
    ``closest`` is the smallest per-factor ratio |factor| / (sum of |terms|):
    it measures how nearly one sign identity holds, and separates genuine
    tables from perturbed ones far better than the product does.
    """
    n = T.n if n is None else n
    if n < 4 or n > 7:
        raise SizeLimit("nanson_n supports 4 <= n <= 7")
    t = {I: complex(v) for I, v in T.values.items()}
    tt = lambda *I: t[frozenset(I)]
    others = list(range(2, n + 1))
    pairs = list(itertools.combinations(others, 2))
    R = {p: cmath.sqrt(tt(1, *p) ** 2 - 4 * tt(1, p[0]) * tt(1, p[1]) * tt(*p)) for p in pairs}
    lhs = 2 ** (n - 2) * tt(*others)
    for i in others:
        lhs *= tt(1, i)
    cycles = [(others[0],) + perm for perm in itertools.permutations(others[1:])]
    value = 1 + 0j
    scale = 1.0
    count = 0
    closest = np.inf
    for signs in itertools.product((1, -1), repeat=len(pairs) - 1):
        eps = dict(zip(pairs, (1,) + signs))
        terms = [lhs]
        for cyc in cycles:
            prod = -0.5 + 0j
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                key = (min(a, b), max(a, b))
                sgn = 1 if a < b else -1
                prod *= tt(1, a, b) + sgn * eps[key] * R[key]
            terms.append(prod)
        f = sum(terms)
        value *= f
        size = sum(abs(x) for x in terms)
        scale *= size
        closest = min(closest, abs(f) / size if size else 0.0)
        count += 1
    return NansonResult(value, scale, count, float(closest))


# ---------------------------------------------------------------- witness

def witness_scale(beta: Fraction) -> Fraction:
    beta = Fraction(beta)
    if beta in (0, 1, 4):
        return Fraction(0)
    return (beta - 2) ** 32 / ((beta - 4) * (beta - 1) * beta ** 4)


def grothendieck_minor_table(M: GrothendieckModel, points: Sequence[int]) -> MinorTable:
    """Correlations rho_I over subsets of the given positions, used as prospective minors.

    Orders above N vanish because there are only N particles.
    """
    pts = list(points)
    E = M.ensemble()
    vals: dict = {}
    for I in _subsets(len(pts)):
        if len(I) > M.N:
            vals[frozenset(I)] = Fraction(0)
        else:
            vals[frozenset(I)] = correlation_function(E, [pts[i - 1] for i in I])
    return MinorTable(len(pts), vals)


def determinantality_witness(M: GrothendieckModel, points: Sequence[int]) -> Fraction:
    if len(points) != 4 or len(set(points)) != 4:
        raise WrongSize("the witness uses 4 distinct positions")
    return nanson4(cluster_from_minors(grothendieck_minor_table(M, points)))
