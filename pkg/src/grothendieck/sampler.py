"""Exact sampling by two-stage RSK dynamics.

Stage 1 row-inserts N words built from an N x N matrix of geometric
variables, which grows a Schur-measure tableau T(N). Stage 2 applies N-1
dual steps, one per row of an (N-1) x N Bernoulli matrix, each adding a
vertical strip. The shape after step s is the Schur-process level mu^{N-s}
and the Grothendieck sample reads lambda_i = mu^i_i.

PRNG: numpy PCG64 seeded with SeedSequence(seed, spawn_key=(stream_id,)).
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import InvalidRegime, Partition
from .measures import GrothendieckModel


@dataclass
class Tableau:
    rows: list[list[int]] = field(default_factory=list)

    def copy(self) -> "Tableau":
        return Tableau([r[:] for r in self.rows])

    @property
    def shape(self) -> Partition:
        return Partition(tuple(len(r) for r in self.rows))

    def is_semistandard(self) -> bool:
        for r, row in enumerate(self.rows):
            if any(a > b for a, b in zip(row, row[1:])):
                return False
            if r and (len(row) > len(self.rows[r - 1])
                      or any(self.rows[r - 1][c] >= row[c] for c in range(len(row)))):
                return False
        return True

    def insert(self, letter: int) -> None:
        """Schensted row insertion: bump the leftmost entry strictly greater."""
        x = letter
        for row in self.rows:
            pos = bisect_right(row, x)
            if pos == len(row):
                row.append(x)
                return
            row[pos], x = x, row[pos]
        self.rows.append([x])


def rsk_insert_word(T: Tableau, counts: Sequence[int]) -> Tableau:
    """Insert 1^{c_1} 2^{c_2} ... N^{c_N}; the shape grows by a horizontal strip."""
    out = T.copy()
    for letter, c in enumerate(counts, start=1):
        for _ in range(int(c)):
            out.insert(letter)
    return out


def dual_rsk_insert_word(T: Tableau, bits: Sequence[int]) -> Tableau:
    """Insert the letters {j : b_j = 1} in decreasing order; the shape grows by a vertical strip.

    Equivalent to column-inserting them in increasing order. Bumping ">= letter"
    instead would break column strictness of T.
    """
    out = T.copy()
    for letter in range(len(bits), 0, -1):
        if bits[letter - 1]:
            out.insert(letter)
    return out


@dataclass(frozen=True)
class RngSpec:
    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(
            np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))))


def _check(M: GrothendieckModel) -> tuple[int, float, float, float]:
    if not M.params.homogeneous:
        raise InvalidRegime("the sampler handles homogeneous parameters only")
    N = M.N
    x, y = float(M.xs[0]), float(M.ys[0])
    beta = float(M.betas[0]) if N > 1 else 0.0
    if beta > 0:
        raise InvalidRegime("the sampler needs beta <= 0")
    if not (x >= 0 and y >= 0 and x * y < 1):
        raise InvalidRegime("the sampler needs x, y >= 0 and xy < 1")
    return N, x, y, beta


def _run(M: GrothendieckModel, rng: RngSpec) -> list[Partition]:
    N, x, y, beta = _check(M)
    gen = rng.generator()
    q = x * y
    U = gen.random((N, N))
    if q > 0:
        A = np.floor(np.log1p(-U) / np.log(q)).astype(np.int64)
    else:
        A = np.zeros((N, N), dtype=np.int64)
    p = -beta * x / (1 - beta * x)
    B = gen.random((max(N - 1, 0), N)) < p
    T = Tableau()
    for t in range(N):
        T = rsk_insert_word(T, A[t])
    shapes = [T.shape]
    for s in range(N - 1):
        T = dual_rsk_insert_word(T, B[s])
        shapes.append(T.shape)
    return shapes[::-1]  # mu^1, ..., mu^N


def sample_schur_process(M: GrothendieckModel, rng: RngSpec) -> list[Partition]:
    return _run(M, rng)


def sample_grothendieck(M: GrothendieckModel, rng: RngSpec) -> Partition:
    mus = _run(M, rng)
    return Partition(tuple(mus[i].part(i + 1) for i in range(M.N)), M.N)


def samples(M: GrothendieckModel, seed: int, count: int, first_stream: int = 0) -> list[Partition]:
    return [sample_grothendieck(M, RngSpec(seed, first_stream + k)) for k in range(count)]


def is_vertical_strip(big: Partition, small: Partition) -> bool:
    n = max(len(big), len(small))
    return all(0 <= big.part(i) - small.part(i) <= 1 for i in range(1, n + 1))
