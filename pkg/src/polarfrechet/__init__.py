"""Polar decomposition and the Fréchet derivative of its unitary factor.

Coupled Newton, rectangular Newton and Newton-Schulz iterations compute
``U`` and ``L(A, E)`` together; SVD, Lyapunov, complex-step and
finite-difference routes provide independent references.
"""

from .estimator import PolarFrechet, check_matrix
from .exceptions import (
    ComplexInput,
    EntryOverflow,
    LinAlgError,
    MatrixFormatError,
    NearSingularWarning,
    NotConverged,
    NotHermitian,
    NotPositiveDefinite,
    RankDeficient,
    SingularMatrix,
)
from .gallery import GallerySpec
from .iteration import (
    CoupledResult,
    IterationConfig,
    TraceRow,
    newton_schulz_step,
    newton_step_rect,
    newton_step_square,
    polar_via_qr,
    residual_alpha,
    residual_beta,
    residual_gamma,
    run_coupled,
    scale_factor,
    should_terminate,
    trace_to_csv,
)
from .matrixio import read_matrices, read_matrix, write_matrices, write_matrix
from .methods import METHODS, PolarOutcome, compute_polar
from .oracles import (
    FrechetOracleResult,
    SignCheckReport,
    central_difference_frechet,
    complex_step_frechet,
    condition_polar,
    condition_polar_real_square,
    lyapunov_frechet,
    power_sigma_min,
    residual_accuracy_probe,
    sign_newton,
    svd_frechet,
    verify_block_sign,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
