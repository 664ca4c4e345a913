"""One entry point over every way this package computes ``(U, H, L(A, E))``."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import NearSingularWarning
from .iteration import IterationConfig, polar_via_qr, run_coupled
from .linalg import as_matrix, sym
from .oracles import (
    complex_step_frechet,
    lyapunov_frechet,
    polar_unitary_svd,
    svd_frechet,
)

METHODS = ("newton", "newton-rect", "newton-schulz", "qr-newton", "svd", "lyapunov", "complex-step")

SCALING_NAMES = {
    "none": "none",
    "1inf": "one_inf",
    "fro": "frobenius",
    "1inf-rect": "one_inf_rect",
    "fro-rect": "frobenius_rect",
}

_SCHEME = {
    "newton": "newton_square",
    "newton-rect": "newton_rect",
    "newton-schulz": "newton_schulz",
    "qr-newton": "newton_square",
}

_DEFAULT_SCALING = {
    "newton": "one_inf",
    "newton-rect": "one_inf_rect",
    "newton-schulz": "none",
    "qr-newton": "one_inf",
}

ITERATIVE = tuple(_SCHEME)


@dataclass
class PolarOutcome:
    U: np.ndarray
    H: np.ndarray
    K: Optional[np.ndarray]
    method: str
    iterations: int = 0
    converged: bool = True
    trace: list = field(default_factory=list)
    message: str = "converged"


def resolve_scaling(method: str, scaling: Optional[str]) -> str:
    """Map a short scaling name (or ``None`` for the method's default) to its long form."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if scaling is None:
        return _DEFAULT_SCALING.get(method, "one_inf")
    if scaling in SCALING_NAMES.values():
        return scaling
    if scaling not in SCALING_NAMES:
        raise ValueError(f"unknown scaling {scaling!r}; choose from {', '.join(SCALING_NAMES)}")
    return SCALING_NAMES[scaling]


def compute_polar(
    A,
    E=None,
    method: str = "newton",
    scaling: Optional[str] = None,
    delta: float = 1e-14,
    epsilon: float = 1e-14,
    max_iter: int = 100,
    diagnostic: bool = False,
) -> PolarOutcome:
    """Polar factors of ``A`` and, when ``E`` is given, the derivative in direction ``E``.

    Parameters
    ----------
    A : array_like, shape (m, n), m >= n
    E : array_like, optional
        Direction; ``K`` is ``None`` in the outcome when omitted.
    method : str
        One of ``METHODS``. The first four iterate; ``svd``, ``lyapunov``
        and ``complex-step`` are direct.
    scaling : str, optional
        Short (``1inf``) or long (``one_inf``) scaling name. Defaults to
        the natural choice for the method.
    diagnostic : bool
        Iterative methods only: fill the error columns of the trace
        using the SVD result as reference.
    """
    A = as_matrix(A)
    has_e = E is not None
    E = as_matrix(E) if has_e else np.zeros_like(A)
    if E.shape != A.shape:
        raise ValueError(f"E has shape {E.shape}, expected {A.shape}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    long_scaling = None
    if scaling is not None or method in ITERATIVE:
        long_scaling = resolve_scaling(method, scaling)

    if method == "newton" and A.shape[0] != A.shape[1]:
        raise ValueError("method 'newton' needs a square matrix; use newton-rect or qr-newton")
    if method in ITERATIVE:
        ref = None
        if diagnostic:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NearSingularWarning)
                r = svd_frechet(A, E)
            ref = (r.U, r.K)
        config = IterationConfig(
            scheme=_SCHEME[method],
            scaling=long_scaling,
            delta=delta,
            epsilon=epsilon,
            max_iter=max_iter,
            diagnostic_reference=ref,
        )
        runner = polar_via_qr if method == "qr-newton" else run_coupled
        res = runner(A, E, config)
        return PolarOutcome(
            res.U, res.H, res.K if has_e else None, method,
            res.iterations, res.converged, res.trace, res.message,
        )

    if scaling is not None and method != "complex-step":
        raise ValueError(f"method {method!r} takes no scaling")
    iterations, converged, message = 0, True, "converged"
    if method == "svd":
        if has_e:
            r = svd_frechet(A, E)
            U, K = r.U, r.K
        else:
            U, K = polar_unitary_svd(A), None
    elif method == "lyapunov":
        r = lyapunov_frechet(A, E)
        U, K = r.U, (r.K if has_e else None)
    else:
        r = complex_step_frechet(A, E, scaling=long_scaling)
        U, K = r.U, (r.K if has_e else None)
        iterations, converged = r.meta["iterations"], r.meta["converged"]
        if not converged:
            message = "complex-step iteration did not settle"
    return PolarOutcome(U, sym(U.conj().T @ A), K, method, iterations, converged, message=message)
