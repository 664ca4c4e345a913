"""Dense complex matrix kernels.

Everything here works on 2-D ``complex128`` numpy arrays. Real input is
promoted to complex on entry so that one code path serves real data,
complex data and the complex-step perturbations used by the oracles.

The factorizations are written out rather than delegated to LAPACK:

* LU with partial pivoting (``lu_factor``, ``lu_solve``, ``inverse``)
* Householder QR with a positive diagonal (``qr_reduced``)
* cyclic Jacobi for Hermitian eigenproblems (``eig_hermitian``)
* one-sided Jacobi for the SVD (``svd``)

Both Jacobi methods sweep in round-robin order, so each round rotates
``n // 2`` disjoint index pairs at once with a single matrix product.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .exceptions import (
    NotConverged,
    NotHermitian,
    NotPositiveDefinite,
    RankDeficient,
    SingularMatrix,
)

EPS = np.finfo(float).eps

_PIVOT_FLOOR = 1e-300
_RANK_TOL = 1e-14
_HERMITIAN_TOL = 1e-10
_EIG_OFF_TOL = 1e-14
_PD_TOL = 1e-14
_MAX_SWEEPS = 60


class SvdFactors(NamedTuple):
    P: np.ndarray
    sigma: np.ndarray
    Q: np.ndarray


class EigFactors(NamedTuple):
    Q: np.ndarray
    lam: np.ndarray


class QrFactors(NamedTuple):
    Q: np.ndarray
    R: np.ndarray


def as_matrix(M, *, copy: bool = False) -> np.ndarray:
    """Validate ``M`` as a non-empty finite 2-D matrix and return it as complex128."""
    A = np.array(M, dtype=np.complex128, copy=copy) if copy else np.asarray(M, dtype=np.complex128)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got an array with ndim={A.ndim}")
    if A.size == 0:
        raise ValueError("matrix must be non-empty")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def adjoint(M: np.ndarray, plain: bool = False) -> np.ndarray:
    """Conjugate transpose, or plain transpose when ``plain`` is set."""
    return M.T if plain else M.conj().T


def sym(B: np.ndarray) -> np.ndarray:
    return 0.5 * (B + B.conj().T)


def skew(B: np.ndarray) -> np.ndarray:
    return 0.5 * (B - B.conj().T)


def fro(M: np.ndarray) -> float:
    # diverging iterates may overflow here; callers test the result for finiteness
    with np.errstate(over="ignore"):
        return float(np.sqrt(np.sum(M.real**2 + M.imag**2)))


def norm(M, kind: str = "fro") -> float:
    """Matrix norm: ``"one"``, ``"inf"``, ``"fro"`` or ``"two"``."""
    M = np.asarray(M)
    if M.size == 0:
        raise ValueError("matrix must be non-empty")
    if kind == "one":
        return float(np.max(np.sum(np.abs(M), axis=0)))
    if kind == "inf":
        return float(np.max(np.sum(np.abs(M), axis=1)))
    if kind == "fro":
        return fro(M)
    if kind == "two":
        return float(svd(M).sigma[0])
    raise ValueError(f"unknown norm kind {kind!r}")


# --------------------------------------------------------------------------
# LU


def lu_factor(M) -> tuple[np.ndarray, np.ndarray]:
    """Partial-pivoted LU. Returns the packed factors and the row permutation.

    Raises
    ------
    SingularMatrix
        If a pivot magnitude falls below 1e-300.
    """
    LU = as_matrix(M, copy=True)
    n, m = LU.shape
    if n != m:
        raise ValueError(f"LU needs a square matrix, got {n}x{m}")
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(LU[k:, k])))
        if abs(LU[p, k]) < _PIVOT_FLOOR:
            raise SingularMatrix(f"pivot {k} underflows (|u_kk| = {abs(LU[p, k]):.3e})")
        if p != k:
            LU[[k, p]] = LU[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        LU[k + 1:, k] /= LU[k, k]
        LU[k + 1:, k + 1:] -= np.outer(LU[k + 1:, k], LU[k, k + 1:])
    return LU, perm


def lu_solve(LU: np.ndarray, perm: np.ndarray, B) -> np.ndarray:
    B = np.asarray(B, dtype=np.complex128)
    vec = B.ndim == 1
    Y = B[perm].reshape(len(perm), -1).copy()
    n = LU.shape[0]
    for i in range(1, n):
        Y[i] -= LU[i, :i] @ Y[:i]
    for i in range(n - 1, -1, -1):
        Y[i] = (Y[i] - LU[i, i + 1:] @ Y[i + 1:]) / LU[i, i]
    return Y[:, 0] if vec else Y


def lu_solve_adjoint(LU: np.ndarray, perm: np.ndarray, B) -> np.ndarray:
    """Solve ``M^* Y = B`` from the factors of ``M`` returned by ``lu_factor``."""
    B = np.asarray(B, dtype=np.complex128)
    vec = B.ndim == 1
    n = LU.shape[0]
    Z = solve_triangular(np.triu(LU).conj().T, B.reshape(n, -1), lower=True)
    L = np.tril(LU, -1) + np.eye(n)
    W = solve_triangular(L.conj().T, Z)
    Y = np.empty_like(W)
    Y[perm] = W
    return Y[:, 0] if vec else Y


def solve_triangular(T: np.ndarray, B, lower: bool = False) -> np.ndarray:
    """Substitution with a triangular ``T``; only the relevant triangle is read."""
    B = np.asarray(B, dtype=np.complex128)
    vec = B.ndim == 1
    Y = B.reshape(T.shape[0], -1).copy()
    n = T.shape[0]
    order = range(n) if lower else range(n - 1, -1, -1)
    for i in order:
        part = slice(0, i) if lower else slice(i + 1, n)
        if abs(T[i, i]) < _PIVOT_FLOOR:
            raise SingularMatrix(f"diagonal entry {i} underflows")
        Y[i] = (Y[i] - T[i, part] @ Y[part]) / T[i, i]
    return Y[:, 0] if vec else Y


def solve(M, B) -> np.ndarray:
    LU, perm = lu_factor(M)
    return lu_solve(LU, perm, B)


def inverse(M) -> np.ndarray:
    LU, perm = lu_factor(M)
    return lu_solve(LU, perm, np.eye(LU.shape[0], dtype=np.complex128))


def determinant(M) -> complex:
    LU, perm = lu_factor(M)
    # parity of the permutation from its cycle decomposition
    seen = np.zeros(len(perm), dtype=bool)
    sign = 1
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return complex(sign * np.prod(np.diag(LU)))


# --------------------------------------------------------------------------
# QR


def qr_reduced(A) -> QrFactors:
    """Householder reduced QR with ``R[i, i] > 0``.

    Raises
    ------
    RankDeficient
        If any ``|R[i, i]| <= 1e-14 * ||A||_F``.
    """
    A = as_matrix(A)
    m, n = A.shape
    if m < n:
        raise ValueError(f"reduced QR needs rows >= cols, got {m}x{n}")
    anorm = fro(A)
    R = A.copy()
    vs = []
    for k in range(n):
        x = R[k:, k]
        nx = fro(x[:, None])
        if nx == 0.0:
            vs.append(None)
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * nx
        v /= fro(v[:, None])
        R[k:, k:] -= 2.0 * np.outer(v, v.conj() @ R[k:, k:])
        vs.append(v)
    Q = np.eye(m, n, dtype=np.complex128)
    for k in range(n - 1, -1, -1):
        v = vs[k]
        if v is not None:
            Q[k:, :] -= 2.0 * np.outer(v, v.conj() @ Q[k:, :])
    R = np.triu(R[:n, :])
    d = np.diag(R).copy()
    mag = np.abs(d)
    if np.any(mag <= _RANK_TOL * anorm):
        i = int(np.argmin(mag))
        raise RankDeficient(f"|R[{i},{i}]| = {mag[i]:.3e} <= {_RANK_TOL:g}*||A||_F")
    phases = d / mag
    R = phases.conj()[:, None] * R
    Q = Q * phases[None, :]
    R[np.diag_indices(n)] = mag
    return QrFactors(Q, R)


# --------------------------------------------------------------------------
# Jacobi machinery


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint pair sets covering every (p, q), p < q, once per sweep."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    N = len(players)
    rounds = []
    for _ in range(N - 1):
        ps, qs = [], []
        for i in range(N // 2):
            a, b = players[i], players[N - 1 - i]
            if a >= 0 and b >= 0:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _rotation(n, p, q, a, b, g, active):
    """Unitary ``J`` such that ``J^* M J`` zeroes ``M[p, q]`` for each active pair.

    ``a``, ``b`` are the real diagonal entries and ``g`` the complex
    off-diagonal entry of each 2x2 Hermitian block.
    """
    J = np.eye(n, dtype=np.complex128)
    if not np.any(active):
        return J
    p, q, a, b, g = p[active], q[active], a[active], b[active], g[active]
    t = np.abs(g)
    phase = g / t
    tau = (b - a) / (2.0 * t)
    sgn = np.where(tau >= 0, 1.0, -1.0)
    tn = sgn / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + tn * tn)
    s = c * tn
    J[p, p] = c
    J[p, q] = s
    J[q, p] = -s * phase.conj()
    J[q, q] = c * phase.conj()
    return J


def _off(M: np.ndarray) -> float:
    D = M - np.diag(np.diag(M))
    return fro(D)


def eig_hermitian(M) -> EigFactors:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi.

    The input is symmetrized first. Sweeps continue until the
    off-diagonal Frobenius mass is at most ``1e-14 * ||M||_F``.
    Eigenvalues are returned in ascending order.

    Raises
    ------
    NotHermitian
        If ``||M - M^*||_F > 1e-10 * ||M||_F``.
    """
    M = as_matrix(M)
    n, m = M.shape
    if n != m:
        raise ValueError(f"eig_hermitian needs a square matrix, got {n}x{m}")
    mnorm = fro(M)
    if fro(M - M.conj().T) > _HERMITIAN_TOL * mnorm:
        raise NotHermitian("input is not Hermitian to within 1e-10 relative")
    A = sym(M)
    V = np.eye(n, dtype=np.complex128)
    if n > 1 and mnorm > 0:
        rounds = _round_robin(n)
        target = _EIG_OFF_TOL * mnorm
        for _ in range(_MAX_SWEEPS):
            if _off(A) <= target:
                break
            rotated = False
            for p, q in rounds:
                a = A[p, p].real
                b = A[q, q].real
                g = A[p, q]
                t = np.abs(g)
                active = (t > EPS * np.sqrt(np.abs(a * b))) & (t > 1e-300)
                if np.any(active):
                    rotated = True
                    J = _rotation(n, p, q, a, b, g, active)
                    A = J.conj().T @ A @ J
                    V = V @ J
            if not rotated:
                break
        else:
            if _off(A) > 1e-10 * mnorm:
                raise NotConverged("Jacobi eigensolver did not converge")
    lam = np.diag(A).real.copy()
    order = np.argsort(lam, kind="stable")
    return EigFactors(V[:, order], lam[order])


def _complete_basis(P: np.ndarray, missing: np.ndarray) -> np.ndarray:
    """Fill columns ``missing`` of ``P`` with unit vectors orthogonal to the rest."""
    m = P.shape[0]
    have = [j for j in range(P.shape[1]) if j not in set(missing.tolist())]
    for j in missing:
        B = P[:, have]
        best, best_norm = None, -1.0
        for k in range(m):
            e = np.zeros(m, dtype=np.complex128)
            e[k] = 1.0
            for _ in range(2):
                e = e - B @ (B.conj().T @ e)
            ne = fro(e[:, None])
            if ne > best_norm:
                best, best_norm = e, ne
        P[:, j] = best / best_norm
        have.append(j)
    return P


def svd(A) -> SvdFactors:
    """Thin SVD ``A = P diag(sigma) Q^*`` by one-sided (Hestenes) Jacobi.

    ``sigma`` is descending and has ``min(m, n)`` entries. Columns of
    ``P`` belonging to exactly zero singular values are completed to an
    orthonormal set, so rank deficiency shows up only as zeros in
    ``sigma``.
    """
    A = as_matrix(A)
    m, n = A.shape
    if m < n:
        f = svd(A.conj().T)
        return SvdFactors(f.Q, f.sigma, f.P)
    W = A.copy()
    V = np.eye(n, dtype=np.complex128)
    if n > 1:
        rounds = _round_robin(n)
        tol = max(m, 1) * EPS
        for _ in range(_MAX_SWEEPS):
            rotated = False
            for p, q in rounds:
                G = W.conj().T @ W
                a = G[p, p].real
                b = G[q, q].real
                g = G[p, q]
                t = np.abs(g)
                active = (t > tol * np.sqrt(a * b)) & (t > 1e-300)
                if np.any(active):
                    rotated = True
                    J = _rotation(n, p, q, a, b, g, active)
                    W = W @ J
                    V = V @ J
            if not rotated:
                break
    sigma = np.sqrt(np.sum(W.real**2 + W.imag**2, axis=0))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    W = W[:, order]
    V = V[:, order]
    P = np.zeros((m, n), dtype=np.complex128)
    nz = sigma > 1e-290
    P[:, nz] = W[:, nz] / sigma[nz]
    if not np.all(nz):
        P = _complete_basis(P, np.flatnonzero(~nz))
        sigma[~nz] = 0.0
    return SvdFactors(P, sigma, V)


# --------------------------------------------------------------------------
# Hermitian positive definite functions


def _hpd_eig(M) -> EigFactors:
    f = eig_hermitian(M)
    lmax = f.lam[-1]
    if lmax <= 0 or f.lam[0] <= _PD_TOL * lmax:
        raise NotPositiveDefinite(
            f"smallest eigenvalue {f.lam[0]:.3e} is not above {_PD_TOL:g} * {lmax:.3e}"
        )
    return f


def hpd_function(M, fn) -> np.ndarray:
    """Apply the scalar function ``fn`` to the eigenvalues of HPD ``M``."""
    Q, lam = _hpd_eig(M)
    return sym((Q * fn(lam)[None, :]) @ Q.conj().T)


def sqrtm_hpd(M) -> np.ndarray:
    return hpd_function(M, np.sqrt)


def invsqrtm_hpd(M) -> np.ndarray:
    return hpd_function(M, lambda x: 1.0 / np.sqrt(x))
