"""Test matrices: Moler, Frank and binomial families, plus seeded Gaussians.

Integer-valued matrices are built in exact integer arithmetic before the
conversion to floating point, so construction adds no roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .exceptions import EntryOverflow
from .linalg import eig_hermitian, svd

NAMES = ("moler_orth", "binomial", "frank", "frank_modified", "rect_binomial", "random")


def _to_matrix(rows) -> np.ndarray:
    return np.array(rows, dtype=np.float64).astype(np.complex128)


def moler(n: int) -> np.ndarray:
    """Moler matrix with parameter -1: ``min(i, j) - 2`` off the diagonal, ``i`` on it."""
    if n < 2:
        raise ValueError("moler needs n >= 2")
    return _to_matrix(
        [[i if i == j else min(i, j) - 2 for j in range(1, n + 1)] for i in range(1, n + 1)]
    )


def moler_orthogonal_factor(n: int) -> np.ndarray:
    """Eigenvector matrix of ``moler(n)``, each column's largest entry made positive real."""
    if n < 2:
        raise ValueError("moler_orthogonal_factor needs n >= 2")
    Q = eig_hermitian(moler(n)).Q.copy()
    for j in range(n):
        k = int(np.argmax(np.abs(Q[:, j])))
        Q[:, j] *= abs(Q[k, j]) / Q[k, j]
    return Q


def nearly_orthogonal(n: int) -> np.ndarray:
    """Orthogonal factor of the Moler matrix plus ``1e-3`` in every entry."""
    return moler_orthogonal_factor(n) + 1e-3


def binomial_int(n: int) -> list[list[int]]:
    """Exact integer entries of the order ``n`` binomial (Krawtchouk) matrix.

    Satisfies ``B @ B == 2**(n-1) * I``.
    """
    if not 2 <= n <= 40:
        raise ValueError("binomial needs 2 <= n <= 40")
    B = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            lo = max(0, i - 1 - (n - j))
            hi = min(i - 1, j - 1)
            row.append(sum((-1) ** k * comb(j - 1, k) * comb(n - j, i - 1 - k) for k in range(lo, hi + 1)))
        B.append(row)
    worst = max(abs(x) for row in B for x in row)
    if worst > 2**53:
        raise EntryOverflow(f"binomial({n}) has an entry of magnitude {worst} > 2**53")
    return B


def binomial(n: int) -> np.ndarray:
    return _to_matrix(binomial_int(n))


def frank_int(n: int) -> list[list[int]]:
    if n < 2:
        raise ValueError("frank needs n >= 2")
    return [
        [n + 1 - max(i, j) if j >= i - 1 else 0 for j in range(1, n + 1)]
        for i in range(1, n + 1)
    ]


def frank(n: int) -> np.ndarray:
    """Upper Hessenberg Frank matrix, ``n + 1 - max(i, j)`` on and above the subdiagonal."""
    return _to_matrix(frank_int(n))


def frank_modified(n: int) -> np.ndarray:
    """Frank matrix with its second-smallest singular value set equal to the smallest."""
    if n < 3:
        raise ValueError("frank_modified needs n >= 3")
    P, sigma, Q = svd(frank(n))
    sigma = sigma.copy()
    sigma[n - 2] = sigma[n - 1]
    return (P * sigma[None, :]) @ Q.conj().T


def rect_binomial(n: int, ncols: int) -> np.ndarray:
    """Leading ``ncols`` columns of ``binomial(n)``."""
    if not 1 <= ncols <= n:
        raise ValueError("rect_binomial needs 1 <= ncols <= n")
    return binomial(n)[:, :ncols].copy()


def _uniform(seed: int, count: int) -> np.ndarray:
    # Philox is a counter-based generator: the stream is a pure function of the seed.
    rng = np.random.Generator(np.random.Philox(key=seed))
    return rng.random(count)


def standard_normal(seed: int, count: int) -> np.ndarray:
    """``count`` N(0, 1) draws via Box-Muller on Philox uniforms."""
    pairs = (count + 1) // 2
    u = _uniform(seed, 2 * pairs)
    u1 = 1.0 - u[0::2]  # (0, 1], keeps log finite
    u2 = u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    return z[:count]


def random_gaussian(m: int, n: int, seed: int = 0, field: str = "real") -> np.ndarray:
    """Seeded ``m x n`` Gaussian matrix; complex fields draw independent N(0,1) parts."""
    if m < 1 or n < 1:
        raise ValueError("dimensions must be positive")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    if field == "real":
        return standard_normal(seed, m * n).reshape(m, n).astype(np.complex128)
    if field == "complex":
        z = standard_normal(seed, 2 * m * n)
        return (z[: m * n] + 1j * z[m * n:]).reshape(m, n)
    raise ValueError(f"unknown field {field!r}")


@dataclass(frozen=True)
class GallerySpec:
    name: str
    n: int
    m: int | None = None
    seed: int = 0
    field: str = "real"

    def __post_init__(self):
        name = self.name.replace("-", "_")
        if name not in NAMES:
            raise ValueError(f"unknown gallery matrix {self.name!r}; choose from {', '.join(NAMES)}")
        object.__setattr__(self, "name", name)
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.m is not None and self.m < self.n:
            raise ValueError("m must be >= n")

    def build(self) -> np.ndarray:
        if self.name == "moler_orth":
            return nearly_orthogonal(self.n)
        if self.name == "binomial":
            return binomial(self.n)
        if self.name == "frank":
            return frank(self.n)
        if self.name == "frank_modified":
            return frank_modified(self.n)
        if self.name == "rect_binomial":
            # m is the row count (binomial order), n the number of kept columns
            return rect_binomial(self.m if self.m is not None else 16, self.n)
        return random_gaussian(self.m if self.m is not None else self.n, self.n, self.seed, self.field)


def build(name: str, n: int, m: int | None = None, seed: int = 0, field: str = "real") -> np.ndarray:
    return GallerySpec(name, n, m, seed, field).build()
