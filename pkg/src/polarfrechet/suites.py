"""Seeded property suites behind ``polarfrechet verify``.

Each suite returns a list of :class:`Check`; a suite passes when every
check does.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import NearSingularWarning
from .gallery import random_gaussian
from .iteration import IterationConfig, run_coupled
from .linalg import fro, svd
from .oracles import (
    central_difference_frechet,
    complex_step_frechet,
    lyapunov_frechet,
    probe_identity_deviation,
    residual_accuracy_probe,
    svd_frechet,
    verify_block_sign,
)

SUITES = ("identities", "oracles", "appendix")

_E_STREAM = 10_000_000


@dataclass
class Check:
    name: str
    value: float
    low: float
    high: float

    @property
    def passed(self) -> bool:
        return bool(self.low <= self.value <= self.high)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.low > 0:
            bound = f"in [{self.low:.3g}, {self.high:.3g}]"
        else:
            bound = f"<= {self.high:.1e}"
        return f"{status}  {self.name}: {self.value:.3e} ({bound})"


def well_conditioned_case(n: int, seed: int, kappa_max: float = 1e2, field: str = "real"):
    """Seeded pair ``(A, E)`` with ``cond_2(A) <= kappa_max``.

    Gaussian ``A`` is redrawn from successive sub-streams of ``seed``
    until the condition bound holds. ``E`` is Gaussian from its own stream.
    """
    for attempt in range(1000):
        A = random_gaussian(n, n, 1000 * seed + attempt, field)
        s = svd(A).sigma
        if s[-1] > 0 and s[0] / s[-1] <= kappa_max:
            break
    else:  # pragma: no cover - astronomically unlikely for kappa_max >= 10
        raise RuntimeError("no well-conditioned draw found")
    E = random_gaussian(n, n, _E_STREAM + seed, field)
    return A, E


def _rel(X, Y) -> float:
    d = fro(Y)
    return fro(X - Y) / d if d > 0 else fro(X - Y)


def identities(seed: int = 0, n: int = 6, cases: int = 20, tol: float = 1e-9) -> list[Check]:
    """Block sign identities on ``cases`` draws with condition number at most 1e3."""
    worst = {"skew": 0.0, "hermitian": 0.0, "signpolar": 0.0}
    square = 0.0
    for c in range(cases):
        A, E = well_conditioned_case(n, seed * cases + c, kappa_max=1e3)
        for key, rep in verify_block_sign(A, E).items():
            worst[key] = max(worst[key], rep.deviation)
            square = max(square, fro(rep.lhs @ rep.lhs - np.eye(rep.lhs.shape[0])))
    checks = [Check(f"sign block identity ({key})", v, 0.0, tol) for key, v in worst.items()]
    checks.append(Check("sign iterate squares to I", square, 0.0, 1e-10))
    return checks


def oracles(
    seed: int = 0,
    sizes=(4, 8, 16),
    cases: int = 50,
    cd_step: float = 6e-6,
    kappa_max: float = 1e2,
) -> list[Check]:
    """Pairwise agreement of the derivative methods on real well-conditioned matrices."""
    worst = dict.fromkeys(
        ("lyapunov-svd", "complex_step-svd", "lyapunov-complex_step", "central_difference-svd", "newton-svd"),
        0.0,
    )
    cfg = IterationConfig(scaling="one_inf")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearSingularWarning)
        for n in sizes:
            for c in range(cases):
                A, E = well_conditioned_case(n, seed * cases + c + 7919 * n, kappa_max)
                ref = svd_frechet(A, E).K
                K_ly = lyapunov_frechet(A, E).K
                K_cs = complex_step_frechet(A, E).K
                K_cd = central_difference_frechet(A, E, h=cd_step).K
                K_nw = run_coupled(A, E, cfg).K
                pairs = {
                    "lyapunov-svd": (K_ly, ref),
                    "complex_step-svd": (K_cs, ref),
                    "lyapunov-complex_step": (K_ly, K_cs),
                    "central_difference-svd": (K_cd, ref),
                    "newton-svd": (K_nw, ref),
                }
                for key, (X, Y) in pairs.items():
                    worst[key] = max(worst[key], _rel(X, Y))
    limits = {"central_difference-svd": 1e-5, "newton-svd": 1e-11}
    return [Check(f"{key} relative gap", v, 0.0, limits.get(key, 1e-10)) for key, v in worst.items()]


def appendix(seed: int = 0, seeds: int = 10, ts=(0.2, 0.1, 0.05), n: int = 6) -> list[Check]:
    """Second-order accuracy of the computable residuals near ``H = I``."""
    checks = []
    identity = 0.0
    for t in ts:
        lo_b = lo_g = np.inf
        hi_b = hi_g = 0.0
        for s in range(seed * seeds, (seed + 1) * seeds):
            b1, g1 = residual_accuracy_probe(s, t, n)
            b2, g2 = residual_accuracy_probe(s, t / 2, n)
            lo_b, hi_b = min(lo_b, b1 / b2), max(hi_b, b1 / b2)
            lo_g, hi_g = min(lo_g, g1 / g2), max(hi_g, g1 / g2)
            identity = max(identity, probe_identity_deviation(s, t, n), probe_identity_deviation(s, t / 2, n))
        for label, lo, hi in (("beta", lo_b, hi_b), ("gamma", lo_g, hi_g)):
            checks.append(Check(f"{label} error ratio t={t:g} (min)", lo, 3.2, 4.8))
            checks.append(Check(f"{label} error ratio t={t:g} (max)", hi, 3.2, 4.8))
    checks.append(Check("beta + gamma = X*E + E*X (relative)", identity, 0.0, 1e-13))
    return checks


def run_suite(name: str, seed: int = 0, **kwargs) -> list[Check]:
    if name == "identities":
        return identities(seed, **kwargs)
    if name == "oracles":
        return oracles(seed, **kwargs)
    if name == "appendix":
        return appendix(seed, **kwargs)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")


__all__ = ["Check", "SUITES", "appendix", "identities", "oracles", "run_suite", "well_conditioned_case"]
