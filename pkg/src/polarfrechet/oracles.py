"""Reference methods for the polar factor derivative, plus identity checks.

Four independent routes to ``L(A, E)``:

* ``svd_frechet``: closed form in the singular basis (the ground truth),
* ``lyapunov_frechet``: solve ``H Y + Y H = U^* E - E^* U`` by diagonalizing ``H``,
* ``complex_step_frechet``: Newton iteration on ``A + ihE`` with plain transposes,
* ``central_difference_frechet``: symmetric difference of the SVD polar factor.

Also here: the matrix sign Newton iteration used to check the block
identities, condition numbers of the polar factor map, and the probe of
how well the computable residuals track the exact ones.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import ComplexInput, NearSingularWarning, NotConverged, RankDeficient
from .gallery import random_gaussian, standard_normal
from .iteration import (
    IterationConfig,
    residual_beta,
    residual_gamma,
    run_coupled,
    scale_factor,
)
from .linalg import (
    as_matrix,
    eig_hermitian,
    fro,
    inverse,
    lu_factor,
    lu_solve,
    lu_solve_adjoint,
    qr_reduced,
    skew,
    solve_triangular,
    sqrtm_hpd,
    svd,
    sym,
)

_NEAR_SINGULAR = 1e-13


@dataclass
class FrechetOracleResult:
    U: np.ndarray
    K: np.ndarray
    method: str
    meta: dict = field(default_factory=dict)


class SignCheckReport(NamedTuple):
    lhs: np.ndarray
    rhs: np.ndarray
    deviation: float


# --------------------------------------------------------------------------
# SVD route


def _svd_square(A, E):
    P, sigma, Q = svd(A)
    if sigma[-1] <= 1e-300:
        raise RankDeficient(f"smallest singular value {sigma[-1]:.3e} is zero to working precision")
    if 2 * sigma[-1] < _NEAR_SINGULAR * sigma[0]:
        warnings.warn(
            f"sigma_i + sigma_j = {2 * sigma[-1]:.2e} < 1e-13 * sigma_1; derivative may be inaccurate",
            NearSingularWarning,
            stacklevel=3,
        )
    Qa = Q.conj().T
    U = P @ Qa
    Hinv = (Q / sigma[None, :]) @ Qa
    if E is None:
        return U, None, Hinv, sigma
    F = P.conj().T @ E @ Q
    G = (F - F.conj().T) / (sigma[:, None] + sigma[None, :])
    return U, P @ G @ Qa, Hinv, sigma


def _svd_route(A, E):
    m, n = A.shape
    if m == n:
        return _svd_square(A, E)
    Q, R = qr_reduced(A)
    Qa = Q.conj().T
    QtE = None if E is None else Qa @ E
    UR, KR, Hinv, sigma = _svd_square(R, QtE)
    U = Q @ UR
    if E is None:
        return U, None, Hinv, sigma
    K = Q @ KR + (E - Q @ QtE) @ Hinv
    return U, K, Hinv, sigma


def polar_unitary_svd(A) -> np.ndarray:
    """Unitary polar factor from the SVD (after QR reduction when rectangular)."""
    A = as_matrix(A)
    if A.shape[0] < A.shape[1]:
        raise ValueError("need rows >= cols")
    return _svd_route(A, None)[0]


def svd_frechet(A, E) -> FrechetOracleResult:
    """``L(A, E) = P G Q^*`` with ``G_ij = (F_ij - conj(F_ji)) / (s_i + s_j)``, ``F = P^* E Q``.

    Rectangular ``A`` goes through ``A = QR`` first and picks up the
    range-perpendicular term ``(I - QQ^*) E H^{-1}``.

    Warns
    -----
    NearSingularWarning
        When ``2 sigma_n < 1e-13 sigma_1``; the result is still returned.
    """
    A, E = as_matrix(A), as_matrix(E)
    if E.shape != A.shape:
        raise ValueError(f"E has shape {E.shape}, expected {A.shape}")
    if A.shape[0] < A.shape[1]:
        raise ValueError("need rows >= cols")
    U, K, _, sigma = _svd_route(A, E)
    return FrechetOracleResult(U, K, "svd_explicit", {"sigma": sigma})


# --------------------------------------------------------------------------
# Lyapunov route


def lyapunov_frechet(A, E) -> FrechetOracleResult:
    A, E = as_matrix(A), as_matrix(E)
    if E.shape != A.shape:
        raise ValueError(f"E has shape {E.shape}, expected {A.shape}")
    if A.shape[0] < A.shape[1]:
        raise ValueError("need rows >= cols")
    H = sqrtm_hpd(A.conj().T @ A)
    V, lam = eig_hermitian(H)
    Va = V.conj().T
    Hinv = (V / lam[None, :]) @ Va
    U = A @ Hinv
    Ua = U.conj().T
    UtE = Ua @ E
    C = UtE - UtE.conj().T
    Y = V @ ((Va @ C @ V) / (lam[:, None] + lam[None, :])) @ Va
    K = U @ Y
    if A.shape[0] > A.shape[1]:
        K = K + (E - U @ UtE) @ Hinv
    return FrechetOracleResult(U, K, "lyapunov", {"Y": Y, "H": H})


# --------------------------------------------------------------------------
# complex step


def _transpose_newton(Z, scaling, tol, max_iter):
    """Newton X-iteration with plain transposes; stops once real and imaginary parts settle."""
    square = Z.shape[0] == Z.shape[1]
    for k in range(1, max_iter + 1):
        if square:
            Zinv = inverse(Z)
            mu = scale_factor(Z, scaling, plain=True, inv=Zinv)
            Z1 = 0.5 * (mu * Z + Zinv.T / mu)
        else:
            Ginv = inverse(Z.T @ Z)
            mu = scale_factor(Z, scaling, plain=True, inv=Ginv)
            Z1 = 0.5 * mu * Z @ (np.eye(Z.shape[1]) + Ginv / mu**2)
        d_re = fro((Z1 - Z).real)
        d_im = fro((Z1 - Z).imag)
        Z = Z1
        if d_re <= tol * fro(Z.real) and d_im <= tol * fro(Z.imag):
            # quadratic convergence: one more step lands on the roundoff floor
            if square:
                Zinv = inverse(Z)
                Z = 0.5 * (Z + Zinv.T)
            else:
                Z = 0.5 * Z @ (np.eye(Z.shape[1]) + inverse(Z.T @ Z))
            return Z, k + 1, True
    return Z, max_iter, False


def complex_step_frechet(A, E, h: float = 1e-100, *, scaling=None, tol=1e-13, max_iter=100):
    """``Im(F(A + ihE)) / h`` where ``F`` is the Newton polar iteration with transposes.

    Only meaningful for real ``A`` and ``E``.

    Raises
    ------
    ComplexInput
        If ``A`` or ``E`` has a nonzero imaginary part.
    """
    A, E = as_matrix(A), as_matrix(E)
    if E.shape != A.shape:
        raise ValueError(f"E has shape {E.shape}, expected {A.shape}")
    if np.any(A.imag != 0) or np.any(E.imag != 0):
        raise ComplexInput("complex-step derivatives need real A and E")
    if not h > 0:
        raise ValueError("h must be positive")
    m, n = A.shape
    if m < n:
        raise ValueError("need rows >= cols")
    square = m == n
    if scaling is None:
        scaling = "one_inf" if square else "one_inf_rect"
    allowed = ("none", "one_inf", "frobenius") if square else ("none", "one_inf_rect", "frobenius_rect")
    if scaling not in allowed:
        raise ValueError(f"scaling {scaling!r} does not apply to a {m}x{n} matrix")
    scheme = "newton_square" if square else "newton_rect"

    real_run = run_coupled(A.real.astype(np.complex128), None, IterationConfig(scheme=scheme, scaling=scaling))
    U = real_run.U.real.astype(np.complex128)
    if not np.any(E != 0):
        return FrechetOracleResult(U, np.zeros_like(A), "complex_step", {"h": h, "iterations": 0, "converged": True})
    Z, iters, ok = _transpose_newton(A + 1j * h * E.real, scaling, tol, max_iter)
    K = (Z.imag / h).astype(np.complex128)
    return FrechetOracleResult(U, K, "complex_step", {"h": h, "iterations": iters, "converged": ok})


# --------------------------------------------------------------------------
# finite differences


def central_difference_frechet(A, E, h: float = 6e-6) -> FrechetOracleResult:
    """``(P(A + hE) - P(A - hE)) / 2h`` with ``P`` from the SVD.

    Raises
    ------
    RankDeficient
        If either perturbed matrix loses full column rank.
    """
    A, E = as_matrix(A), as_matrix(E)
    if E.shape != A.shape:
        raise ValueError(f"E has shape {E.shape}, expected {A.shape}")
    if not h > 0:
        raise ValueError("h must be positive")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearSingularWarning)
        Up = polar_unitary_svd(A + h * E)
        Um = polar_unitary_svd(A - h * E)
        U = polar_unitary_svd(A)
    return FrechetOracleResult(U, (Up - Um) / (2 * h), "central_difference", {"h": h})


# --------------------------------------------------------------------------
# matrix sign


def sign_newton(Z, tol: float = 1e-12, max_iter: int = 100) -> np.ndarray:
    """Unscaled Newton iteration ``Z <- (Z + Z^{-1}) / 2`` for the matrix sign.

    Stops when ``||Z_{k+1} - Z_k||_F <= tol ||Z_k||_F`` and returns ``Z_{k+1}``.

    Raises
    ------
    NotConverged
        If the tolerance is not met within ``max_iter`` steps.
    SingularMatrix
        If an iterate is numerically singular.
    """
    Z = as_matrix(Z)
    if Z.shape[0] != Z.shape[1]:
        raise ValueError("sign needs a square matrix")
    for _ in range(max_iter):
        Z1 = 0.5 * (Z + inverse(Z))
        if fro(Z1 - Z) <= tol * fro(Z):
            return Z1
        Z = Z1
    raise NotConverged(f"sign iteration did not converge in {max_iter} steps")


def _block(a, b, c, d):
    return np.block([[a, b], [c, d]])


def verify_block_sign(A, E, tol: float = 1e-12) -> dict:
    """Sign of the block matrices built from the polar data of ``(A, E)``.

    Returns reports keyed by

    ``"skew"``
        ``sign([[H, W], [0, -H]])`` against ``[[I, U^* K], [0, -I]]`` with ``W = skew(U^* E)``.
    ``"hermitian"``
        ``sign([[H, S], [0, H]])`` against ``I`` with ``S = sym(U^* E)``.
    ``"signpolar"`` (square ``A`` only)
        ``sign([[0, A], [A^*, 0]])`` against ``[[0, U], [U^*, 0]]``.
    """
    A, E = as_matrix(A), as_matrix(E)
    ref = svd_frechet(A, E)
    U, K = ref.U, ref.K
    Ua = U.conj().T
    H = sym(Ua @ A)
    B = Ua @ E
    Om, S = skew(B), sym(B)
    n = A.shape[1]
    I = np.eye(n)
    O = np.zeros((n, n))
    reports = {}

    lhs = sign_newton(_block(H, Om, O, -H), tol)
    rhs = _block(I, Ua @ K, O, -I)
    reports["skew"] = SignCheckReport(lhs, rhs, fro(lhs - rhs))

    lhs = sign_newton(_block(H, S, O, H), tol)
    rhs = np.eye(2 * n)
    reports["hermitian"] = SignCheckReport(lhs, rhs, fro(lhs - rhs))

    if A.shape[0] == n:
        lhs = sign_newton(_block(O, A, A.conj().T, O), tol)
        rhs = _block(O, U, Ua, O)
        reports["signpolar"] = SignCheckReport(lhs, rhs, fro(lhs - rhs))
    return reports


# --------------------------------------------------------------------------
# conditioning


def _sigma(A):
    sigma = svd(as_matrix(A)).sigma
    if sigma[-1] <= 1e-300:
        raise RankDeficient("smallest singular value is zero to working precision")
    return sigma


def condition_polar(A) -> float:
    """Condition number ``1 / sigma_n`` of the polar factor map at ``A``."""
    A = as_matrix(A)
    if A.shape[0] < A.shape[1]:
        raise ValueError("need rows >= cols")
    return float(1.0 / _sigma(A)[-1])


def condition_polar_real_square(A) -> float:
    """``2 / (sigma_n + sigma_{n-1})``, the condition number under real perturbations."""
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError("needs a square matrix")
    if np.any(A.imag != 0):
        raise ComplexInput("needs a real matrix")
    if A.shape[0] < 2:
        raise ValueError("needs n >= 2")
    sigma = _sigma(A)
    return float(2.0 / (sigma[-1] + sigma[-2]))


def power_sigma_min(A, iters: int = 100, seed: int = 0) -> float:
    """Estimate ``sigma_n`` by power iteration on ``(A^* A)^{-1}``.

    ``A`` is factored once (LU when square, QR otherwise) and each step
    applies ``A^{-1} A^{-*}`` (or ``R^{-1} R^{-*}``) through solves, so the
    Gram matrix and its squared condition number never appear.
    """
    A = as_matrix(A)
    if A.shape[0] == A.shape[1]:
        LU, perm = lu_factor(A)

        def apply(v):
            return lu_solve(LU, perm, lu_solve_adjoint(LU, perm, v))
    else:
        R = qr_reduced(A).R
        Ra = R.conj().T

        def apply(v):
            return solve_triangular(R, solve_triangular(Ra, v, lower=True))

    v = standard_normal(seed, A.shape[1]).astype(np.complex128)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters + 1):
        w = apply(v)
        lam = float(np.real(np.vdot(v, w)))
        v = w / np.linalg.norm(w)
    return float(1.0 / np.sqrt(lam))


# --------------------------------------------------------------------------
# residual approximation probe


def _probe_data(seed: int, t: float, n: int):
    if not 0 < t <= 0.5:
        raise ValueError("t must lie in (0, 0.5]")
    base = 4 * int(seed)
    G = [random_gaussian(n, n, base + i, "complex") for i in range(4)]
    D = sym(G[0])
    D /= fro(D)
    Om = skew(G[1])
    Om *= t / fro(Om)
    S = sym(G[2])
    S *= t / fro(S)
    U = qr_reduced(G[3]).Q
    H = np.eye(n) + t * D
    return U @ H, U @ (Om + S), H, Om, S


def residual_accuracy_probe(seed: int, t: float, n: int = 6) -> tuple[float, float]:
    """Distance between the computable residuals and the exact ones near ``H = I``.

    Builds ``H = I + tD`` (``||D||_F = 1``), skew ``W`` and Hermitian ``S``
    of norm ``t``, ``X = U H`` and ``E = U (W + S)``, and returns
    ``(||beta - (HW - WH)||_F, ||gamma - (HS + SH)||_F)``.
    """
    X, E, H, Om, S = _probe_data(seed, t, n)
    beta = residual_beta(X, E)
    gamma = residual_gamma(X, E)
    return fro(beta - (H @ Om - Om @ H)), fro(gamma - (H @ S + S @ H))


def probe_identity_deviation(seed: int, t: float, n: int = 6) -> float:
    """Largest relative failure of ``beta + gamma = X^*E + E^*X`` and of its exact counterpart."""
    X, E, H, Om, S = _probe_data(seed, t, n)
    XtE = X.conj().T @ E
    target = XtE + XtE.conj().T
    computable = residual_beta(X, E) + residual_gamma(X, E)
    exact = (H @ Om - Om @ H) + (H @ S + S @ H)
    scale = fro(X) * fro(E)
    return max(fro(computable - target), fro(exact - target)) / scale
