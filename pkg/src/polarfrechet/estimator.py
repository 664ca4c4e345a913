"""scikit-learn style front end."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .linalg import as_matrix, eig_hermitian
from .methods import METHODS, compute_polar


def check_matrix(M, name: str = "A") -> np.ndarray:
    """Validate a dense 2-D finite matrix and return it as complex128.

    ``sklearn.utils.check_array`` rejects complex input, so validation is done here.
    """
    try:
        return as_matrix(M)
    except ValueError as exc:
        raise ValueError(f"{name}: {exc}") from None


class PolarFrechet(BaseEstimator):
    """Polar decomposition ``A = U H`` with the derivative of ``U`` along a direction.

    Parameters
    ----------
    method : str, default="newton"
        Any name from ``METHODS``.
    scaling : str or None, default=None
        Scaling for the iterative methods; ``None`` picks the method's default.
    delta, epsilon : float, default=1e-14
        Stopping tolerances on ``X`` and on ``E``.
    max_iter : int, default=100

    Attributes
    ----------
    unitary_ : ndarray of shape (m, n)
    hermitian_ : ndarray of shape (n, n)
    derivative_ : ndarray of shape (m, n) or None
        Derivative along the ``E`` passed to ``fit``.
    n_iter_ : int
    converged_ : bool
    trace_ : list of TraceRow

    Examples
    --------
    >>> import numpy as np
    >>> est = PolarFrechet().fit(np.diag([2.0, 3.0]), np.array([[0.0, 1.0], [0.0, 0.0]]))
    >>> bool(np.allclose(est.unitary_, np.eye(2)))
    True
    """

    def __init__(self, method="newton", scaling=None, delta=1e-14, epsilon=1e-14, max_iter=100):
        self.method = method
        self.scaling = scaling
        self.delta = delta
        self.epsilon = epsilon
        self.max_iter = max_iter

    def fit(self, A, E=None):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        A = check_matrix(A, "A")
        E = None if E is None else check_matrix(E, "E")
        out = compute_polar(
            A, E, self.method, self.scaling, self.delta, self.epsilon, self.max_iter
        )
        self.unitary_ = out.U
        self.hermitian_ = out.H
        self.derivative_ = out.K
        self.n_iter_ = out.iterations
        self.converged_ = out.converged
        self.trace_ = out.trace
        self.n_features_in_ = A.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "unitary_"):
            raise NotFittedError("call fit before transform")

    def transform(self, E):
        """Derivative of the unitary factor at the fitted ``A`` along a new ``E``.

        Reuses the fitted factors: solves ``H Y + Y H = U^* E - E^* U`` in the
        eigenbasis of ``H`` and adds the range-perpendicular part.
        """
        self._check_fitted()
        U, H = self.unitary_, self.hermitian_
        E = check_matrix(E, "E")
        if E.shape != U.shape:
            raise ValueError(f"E has shape {E.shape}, expected {U.shape}")
        V, lam = eig_hermitian(H)
        Va = V.conj().T
        UtE = U.conj().T @ E
        C = Va @ (UtE - UtE.conj().T) @ V
        Y = V @ (C / (lam[:, None] + lam[None, :])) @ Va
        perp = E - U @ UtE
        return U @ Y + perp @ ((V / lam[None, :]) @ Va)

    def fit_transform(self, A, E=None):
        return self.fit(A, E).derivative_
