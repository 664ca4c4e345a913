"""Coupled iterations for the polar factor and its Fréchet derivative.

Each scheme advances a pair ``(X_k, E_k)``: ``X_k`` converges to the
unitary polar factor ``U`` of ``A`` and ``E_k`` to the derivative
``L(A, E)`` of the map ``A -> U`` in the direction ``E``. Convergence is
judged from the computable residuals

    alpha_k = X^* X - I
    beta_k  = (X^* X X^* E - X^* E X^* X) / 2
    gamma_k = X^* E + E^* X - beta_k

and the run stops once ``||alpha_k|| <= delta ||X_k||`` and
``||beta_k|| + ||gamma_k|| <= epsilon ||E_k||`` (Frobenius norms).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .linalg import adjoint, as_matrix, eig_hermitian, fro, inverse, norm, qr_reduced, skew, sym

SCHEMES = ("newton_square", "newton_rect", "newton_schulz")
SCALINGS = ("none", "one_inf", "frobenius", "one_inf_rect", "frobenius_rect")
ADJOINTS = ("conjugate_transpose", "plain_transpose")

_SCALINGS_FOR = {
    "newton_square": set(SCALINGS),
    "newton_rect": {"none", "one_inf_rect", "frobenius_rect"},
    "newton_schulz": {"none"},
}

# A converged X whose H = sym(X^* A) has an eigenvalue below this (relative to
# the largest) is a sign-flipped fixed point, not the polar factor.
_H_NEGATIVE_TOL = 1e-8

StepFunction = Callable[..., "tuple[np.ndarray, np.ndarray]"]


@dataclass(frozen=True)
class IterationConfig:
    """Settings for :func:`run_coupled`.

    ``scheme`` may also be a callable ``step(X, E, mu, plain) -> (X', E')``
    implementing some other member of the iteration family.
    ``diagnostic_reference`` is an optional ``(U_exact, K_exact)`` pair that
    turns on the error and exact-residual trace columns.
    """

    scheme: Union[str, StepFunction] = "newton_square"
    scaling: str = "none"
    delta: float = 1e-14
    epsilon: float = 1e-14
    max_iter: int = 100
    adjoint: str = "conjugate_transpose"
    diagnostic_reference: Optional[tuple] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if isinstance(self.scheme, str):
            if self.scheme not in SCHEMES:
                raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
            if self.scaling not in _SCALINGS_FOR[self.scheme]:
                raise ValueError(f"scaling {self.scaling!r} is not available with {self.scheme}")
        elif not callable(self.scheme):
            raise TypeError("scheme must be a name or a step callable")
        if self.scaling not in SCALINGS:
            raise ValueError(f"unknown scaling {self.scaling!r}; choose from {SCALINGS}")
        if not (self.delta > 0 and self.epsilon > 0):
            raise ValueError("delta and epsilon must be positive")
        if int(self.max_iter) < 1:
            raise ValueError("max_iter must be a positive integer")
        if self.adjoint not in ADJOINTS:
            raise ValueError(f"unknown adjoint mode {self.adjoint!r}")

    @property
    def plain(self) -> bool:
        return self.adjoint == "plain_transpose"


@dataclass
class TraceRow:
    k: int
    alpha_norm: float
    beta_norm: float
    gamma_norm: float
    mu: float = 1.0
    err_X: Optional[float] = None
    err_E: Optional[float] = None
    beta_exact_norm: Optional[float] = None
    gamma_exact_norm: Optional[float] = None


@dataclass
class CoupledResult:
    U: np.ndarray
    K: np.ndarray
    H: np.ndarray
    iterations: int
    converged: bool
    trace: list = field(default_factory=list)
    message: str = ""


# --------------------------------------------------------------------------
# single steps


def newton_step_square(X, E, mu=1.0, plain=False, Xinv=None):
    """One (scaled) Newton step for square ``X``.

    Returns ``((mu X + X^{-*}/mu) / 2, (mu E - X^{-*} E^* X^{-*} / mu) / 2)``.
    """
    if Xinv is None:
        Xinv = inverse(X)
    Xia = adjoint(Xinv, plain)
    X1 = 0.5 * (mu * X + Xia / mu)
    E1 = 0.5 * (mu * E - (Xia @ adjoint(E, plain) @ Xia) / mu)
    return X1, E1


def newton_step_rect(X, E, mu=1.0, plain=False, Ginv=None):
    """Newton step written with the Gram matrix, valid for ``rows >= cols``.

    ``Ginv`` may carry a precomputed inverse of ``(mu X)^* (mu X)``.
    """
    nu = mu * X
    F = mu * E
    nua = adjoint(nu, plain)
    if Ginv is None:
        Ginv = inverse(nua @ nu)
    I = np.eye(X.shape[1])
    X1 = 0.5 * nu @ (I + Ginv)
    sym_part = adjoint(F, plain) @ nu + nua @ F
    E1 = 0.5 * (F @ (I + Ginv) - nu @ Ginv @ sym_part @ Ginv)
    return X1, E1


def newton_schulz_step(X, E, mu=1.0, plain=False):
    """Inversion-free step ``X (3I - X^* X) / 2`` and its derivative."""
    if mu != 1.0:
        X, E = mu * X, mu * E
    Xa = adjoint(X, plain)
    T = 3.0 * np.eye(X.shape[1]) - Xa @ X
    X1 = 0.5 * X @ T
    E1 = 0.5 * E @ T - 0.5 * X @ (adjoint(E, plain) @ X + Xa @ E)
    return X1, E1


_STEPS = {
    "newton_square": newton_step_square,
    "newton_rect": newton_step_rect,
    "newton_schulz": newton_schulz_step,
}


# --------------------------------------------------------------------------
# scaling and residuals


def scale_factor(X, scaling: str, plain: bool = False, inv=None) -> float:
    """Scaling parameter for the current iterate.

    ``inv`` may carry ``X^{-1}`` (square kinds) or ``(X^* X)^{-1}`` (rect
    kinds) when the caller has it already.
    """
    if scaling == "none":
        return 1.0
    if scaling in ("one_inf", "frobenius"):
        B = X
        exponent = 0.25 if scaling == "one_inf" else 0.5
    elif scaling in ("one_inf_rect", "frobenius_rect"):
        B = adjoint(X, plain) @ X
        exponent = 0.125 if scaling == "one_inf_rect" else 0.25
    else:
        raise ValueError(f"unknown scaling {scaling!r}")
    Binv = inverse(B) if inv is None else inv
    if scaling.startswith("one_inf"):
        ratio = (norm(Binv, "one") * norm(Binv, "inf")) / (norm(B, "one") * norm(B, "inf"))
        return float(ratio**exponent)
    return float((fro(Binv) / fro(B)) ** exponent)


def residual_alpha(X, plain: bool = False) -> np.ndarray:
    return adjoint(X, plain) @ X - np.eye(X.shape[1])


def residual_beta(X, E, plain: bool = False) -> np.ndarray:
    Xa = adjoint(X, plain)
    XtX = Xa @ X
    XtE = Xa @ E
    return 0.5 * (XtX @ XtE - XtE @ XtX)


def residual_gamma(X, E, plain: bool = False) -> np.ndarray:
    XtE = adjoint(X, plain) @ E
    return XtE + adjoint(XtE, plain) - residual_beta(X, E, plain)


def _residuals(X, E, plain):
    Xa = adjoint(X, plain)
    XtX = Xa @ X
    XtE = Xa @ E
    alpha = XtX - np.eye(X.shape[1])
    beta = 0.5 * (XtX @ XtE - XtE @ XtX)
    gamma = XtE + adjoint(XtE, plain) - beta
    return alpha, beta, gamma


def should_terminate(row: TraceRow, X_norm: float, E_norm: float, config: IterationConfig) -> bool:
    """Both stopping tests, non-strict; the derivative test is vacuous when ``E_norm == 0``."""
    if not row.alpha_norm <= config.delta * X_norm:
        return False
    if E_norm == 0:
        return True
    return row.beta_norm + row.gamma_norm <= config.epsilon * E_norm


# --------------------------------------------------------------------------
# drivers


def _diagnostics(X, E, ref):
    U, K = ref
    nU, nK = fro(U), fro(K)
    err_x = fro(X - U) / nU
    err_e = fro(E - K) / nK if nK > 0 else fro(E - K)
    Ua = U.conj().T
    Hk = sym(Ua @ X)
    B = Ua @ E
    Om, S = skew(B), sym(B)
    return err_x, err_e, fro(Hk @ Om - Om @ Hk), fro(Hk @ S + S @ Hk)


def _all_finite(*Ms) -> bool:
    return all(np.all(np.isfinite(M)) for M in Ms)


def _hermitian_factor(U, A, plain):
    B = adjoint(U, plain) @ A
    return 0.5 * (B + adjoint(B, plain))


# a diverging iterate overflows; that is detected and reported, so stay quiet about it
@np.errstate(over="ignore", invalid="ignore")
def run_coupled(A, E=None, config: IterationConfig | None = None) -> CoupledResult:
    """Iterate ``(X_k, E_k)`` from ``(A, E)`` until the stopping tests pass or ``max_iter``.

    The trace holds one row per examined iterate, starting with ``k = 0``.
    ``converged`` is False if the budget runs out, if an iterate stops
    being finite, or if the limit is not a polar factor (``U^* A`` not
    positive definite). None of these raise.

    Raises
    ------
    SingularMatrix
        If a Newton step meets a numerically singular iterate.
    """
    config = config or IterationConfig()
    A = as_matrix(A)
    m, n = A.shape
    if m < n:
        raise ValueError(f"need rows >= cols, got {m}x{n}")
    E = np.zeros_like(A) if E is None else as_matrix(E)
    if E.shape != A.shape:
        raise ValueError(f"E has shape {E.shape}, expected {A.shape}")
    scheme = config.scheme
    if isinstance(scheme, str):
        if scheme == "newton_square" and m != n:
            raise ValueError("newton_square needs a square matrix; use newton_rect or polar_via_qr")
        step = _STEPS[scheme]
    else:
        step = scheme
    plain = config.plain
    ref = config.diagnostic_reference
    if ref is not None:
        ref = (as_matrix(ref[0]), as_matrix(ref[1]))

    X, Ek = A, E
    trace: list[TraceRow] = []
    converged = False
    message = "iteration limit reached"
    for k in range(int(config.max_iter) + 1):
        if not _all_finite(X, Ek):
            message = "iterates are no longer finite"
            break
        alpha, beta, gamma = _residuals(X, Ek, plain)
        na, nb, ng = fro(alpha), fro(beta), fro(gamma)
        if not all(math.isfinite(v) for v in (na, nb, ng)):
            message = "residuals are no longer finite"
            break

        inv = None
        if scheme == "newton_square":
            inv = inverse(X)
        elif scheme == "newton_rect":
            inv = inverse(adjoint(X, plain) @ X)
        # reuse the step's inverse when the scaling needs the same one
        square_kind = config.scaling in ("one_inf", "frobenius")
        reusable = square_kind if scheme == "newton_square" else scheme == "newton_rect"
        mu = scale_factor(X, config.scaling, plain, inv if reusable else None)

        row = TraceRow(k, na, nb, ng, mu)
        if ref is not None:
            row.err_X, row.err_E, row.beta_exact_norm, row.gamma_exact_norm = _diagnostics(X, Ek, ref)
        trace.append(row)

        if should_terminate(row, fro(X), fro(Ek), config):
            converged = True
            message = "converged"
            break
        if k == config.max_iter:
            break

        if scheme == "newton_square":
            X, Ek = newton_step_square(X, Ek, mu, plain, Xinv=inv)
        elif scheme == "newton_rect":
            X, Ek = newton_step_rect(X, Ek, mu, plain, Ginv=inv / mu**2)
        else:
            X, Ek = step(X, Ek, mu, plain)

    iterations = trace[-1].k if trace else 0
    H = _hermitian_factor(X, A, plain) if _all_finite(X) else np.full((n, n), np.nan + 0j)
    if converged and not plain:
        lam = eig_hermitian(H).lam
        if lam[0] < -_H_NEGATIVE_TOL * max(abs(lam[-1]), 1e-300):
            converged = False
            message = "limit is not the polar factor (U^* A is not positive definite)"
    return CoupledResult(X, Ek, H, iterations, converged, trace, message)


def polar_via_qr(A, E=None, config: IterationConfig | None = None) -> CoupledResult:
    """Reduce to the square ``R`` of ``A = QR``, iterate there, and recombine.

    ``U = Q P(R)`` and ``K = Q L(R, Q^* E) + (I - Q Q^*) E H^{-1}``.
    """
    config = config or IterationConfig()
    A = as_matrix(A)
    E = np.zeros_like(A) if E is None else as_matrix(E)
    if E.shape != A.shape:
        raise ValueError(f"E has shape {E.shape}, expected {A.shape}")
    Q, R = qr_reduced(A)
    Qa = Q.conj().T
    QtE = Qa @ E

    scheme = config.scheme
    scaling = config.scaling
    if scheme == "newton_rect":
        scheme = "newton_square"
    ref = config.diagnostic_reference
    if ref is not None:
        ref = (Qa @ as_matrix(ref[0]), Qa @ as_matrix(ref[1]))
    inner = IterationConfig(
        scheme=scheme,
        scaling=scaling,
        delta=config.delta,
        epsilon=config.epsilon,
        max_iter=config.max_iter,
        adjoint=config.adjoint,
        diagnostic_reference=ref,
    )
    res = run_coupled(R, QtE, inner)
    U = Q @ res.U
    H = sym(res.U.conj().T @ R)
    perp = E - Q @ QtE
    K = Q @ res.K
    if np.any(perp != 0):
        K = K + perp @ inverse(H)
    return CoupledResult(U, K, H, res.iterations, res.converged, res.trace, res.message)


# --------------------------------------------------------------------------
# export

CSV_HEADER = ("k", "alpha", "beta", "gamma", "mu", "err_x", "err_e", "beta_exact", "gamma_exact")


def _sci(v) -> str:
    return "" if v is None else f"{v:.5e}"


def trace_to_csv(trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in trace:
        w.writerow([
            r.k,
            _sci(r.alpha_norm),
            _sci(r.beta_norm),
            _sci(r.gamma_norm),
            _sci(r.mu),
            _sci(r.err_X),
            _sci(r.err_E),
            _sci(r.beta_exact_norm),
            _sci(r.gamma_exact_norm),
        ])
    return buf.getvalue()
