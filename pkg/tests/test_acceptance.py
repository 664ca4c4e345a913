"""Acceptance criteria, one check per criterion at the stated tolerances.

Run directly (``python3 tests/test_acceptance.py``) for a plain pass/fail
listing; under pytest the same lines appear in the terminal summary.
"""

import sys
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polarfrechet import gallery as g  # noqa: E402
from polarfrechet import suites  # noqa: E402
from polarfrechet.exceptions import NearSingularWarning  # noqa: E402
from polarfrechet.iteration import IterationConfig, polar_via_qr, run_coupled  # noqa: E402
from polarfrechet.linalg import qr_reduced, svd, sym  # noqa: E402
from polarfrechet.oracles import (  # noqa: E402
    condition_polar_real_square,
    lyapunov_frechet,
    power_sigma_min,
    sign_newton,
    svd_frechet,
)


def _rel(X, Y):
    return float(np.linalg.norm(X - Y) / np.linalg.norm(Y))


def _within(x, target, frac):
    return abs(x / target - 1) <= frac


def _factor(x, target, f=2.0):
    return target / f <= x <= target * f


def _stats(A):
    s = svd(A).sigma
    return s[-1], s[-2], s[0] / s[-1]


def _reference(A, E):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearSingularWarning)
        r = svd_frechet(A, E)
    return r.U, r.K


def _scaled_run(A, E, rect=False, **kw):
    ref = _reference(A, E)
    cfg = IterationConfig(
        scheme="newton_rect" if rect else "newton_square",
        scaling="one_inf_rect" if rect else "one_inf",
        diagnostic_reference=ref,
        **kw,
    )
    return run_coupled(A, E, cfg)


# --------------------------------------------------------------------------


def criterion_1_square():
    checks = []
    sn, sn1, k = _stats(g.nearly_orthogonal(16))
    checks.append(("moler_orth", abs(sn - 0.99) <= 0.02 and abs(sn1 - 1.0) <= 0.02 and abs(k - 1.0) <= 0.05,
                   (sn, sn1, k)))
    sn, sn1, k = _stats(g.binomial(16))
    checks.append(("binomial", _within(sn, 2.6, .1) and _within(sn1, 2.6, .1) and _within(k, 4.7e3, .1),
                   (sn, sn1, k)))
    sn, sn1, k = _stats(g.frank(16))
    checks.append(("frank", _factor(sn, 3.5e-13) and _within(sn1, 0.87, .05) and _factor(k, 2.3e14),
                   (sn, sn1, k)))
    sn, sn1, k = _stats(g.frank_modified(16))
    checks.append(("frank_modified", _factor(sn, 3.5e-13) and _factor(sn1, 3.5e-13) and _factor(k, 2.3e14),
                   (sn, sn1, k)))
    ok = all(c[1] for c in checks)
    detail = "; ".join(f"{n} ({a:.2e}, {b:.2e}, {c:.2e})" for n, _, (a, b, c) in checks)
    return ok, detail


def criterion_1_rect():
    sn, sn1, k = _stats(g.rect_binomial(16, 5))
    ok = _within(sn, 0.25, .1) and _within(sn1, 2.3, .1) and _within(k, 58, .1)
    return ok, f"rect_binomial(16,5) ({sn:.2e}, {sn1:.2e}, {k:.2e}) vs (2.5e-01, 2.3e+00, 5.8e+01)"


def criterion_2():
    E16 = g.random_gaussian(16, 16, 1)
    runs = {
        "moler_orth": _scaled_run(g.nearly_orthogonal(16), E16),
        "binomial": _scaled_run(g.binomial(16), E16),
        "rect": _scaled_run(g.rect_binomial(16, 5), g.random_gaussian(16, 5, 1), rect=True),
    }
    ok = True
    parts = []
    for name, r in runs.items():
        last = r.trace[-1]
        good = r.converged and r.iterations <= 30 and last.err_X <= 1e-12 and last.err_E <= 1e-11
        ok &= good
        parts.append(f"{name} k={r.iterations} errX={last.err_X:.1e} errE={last.err_E:.1e}")
    return ok, "; ".join(parts)


def criterion_3():
    E = g.random_gaussian(16, 16, 1)
    fr = _scaled_run(g.frank(16), E).trace[-1]
    fm = _scaled_run(g.frank_modified(16), E).trace[-1]
    ok = fr.err_X <= 1e-8 and fr.err_E >= 1e-6 and fm.err_X >= 1e-6
    return ok, f"frank errX={fr.err_X:.1e} errE={fr.err_E:.1e}; frank_modified errX={fm.err_X:.1e}"


def criterion_4():
    checks = suites.identities(seed=0, n=6, cases=20)
    return all(c.passed for c in checks), "; ".join(f"{c.name}: {c.value:.1e}" for c in checks)


def criterion_5():
    checks = suites.oracles(seed=0, sizes=(4, 8, 16), cases=50)
    return all(c.passed for c in checks), "; ".join(f"{c.name.split()[0]}: {c.value:.1e}" for c in checks)


def criterion_6():
    checks = suites.appendix(seed=0, seeds=10)
    ratios = [c.value for c in checks if c.low > 0]
    ident = checks[-1].value
    return all(c.passed for c in checks), f"ratios in [{min(ratios):.3f}, {max(ratios):.3f}]; identity {ident:.1e}"


def criterion_7():
    A = g.rect_binomial(16, 5)
    worst_u = worst_k = 0.0
    rect_cfg = IterationConfig(scheme="newton_rect", scaling="one_inf_rect")
    qr_cfg = IterationConfig(scaling="one_inf")
    for seed in range(10):
        E = g.random_gaussian(16, 5, seed)
        a = run_coupled(A, E, rect_cfg)
        b = polar_via_qr(A, E, qr_cfg)
        worst_u = max(worst_u, _rel(a.U, b.U))
        worst_k = max(worst_k, _rel(a.K, b.K))
    Q = qr_reduced(A).Q
    worst_p = 0.0
    for seed in range(10):
        G = g.random_gaussian(16, 5, 100 + seed)
        Ep = G - Q @ (Q.conj().T @ G)
        b = polar_via_qr(A, Ep, qr_cfg)
        worst_p = max(worst_p, _rel(b.K, Ep @ np.linalg.inv(b.H)))
    ok = worst_u <= 1e-10 and worst_k <= 1e-10 and worst_p <= 1e-11
    return ok, f"U gap {worst_u:.1e}, K gap {worst_k:.1e}, perpendicular {worst_p:.1e}"


def criterion_8():
    worst = 0.0
    all_conv = True
    for seed in range(10):
        A, E = suites.well_conditioned_case(6, seed, kappa_max=1e3)
        P, s, Qh = np.linalg.svd(A)
        s_new = 0.5 + 0.8 * (np.arange(6, 0, -1) - 0.5) / 6  # inside (0.5, 1.3)
        A = (P * s_new) @ Qh
        ns = run_coupled(A, E, IterationConfig(scheme="newton_schulz"))
        nw = run_coupled(A, E, IterationConfig(scaling="one_inf"))
        all_conv &= ns.converged
        worst = max(worst, _rel(ns.U, nw.U), _rel(ns.K, nw.K))
    P, _, Qh = np.linalg.svd(g.random_gaussian(6, 6, 3).real)
    bad = run_coupled((P * np.array([2.0, 1.5, 1.2, 1.0, 0.8, 0.6])) @ Qh, g.random_gaussian(6, 6, 4),
                      IterationConfig(scheme="newton_schulz"))
    ok = all_conv and worst <= 1e-11 and not bad.converged
    return ok, f"in-region gap {worst:.1e}; sigma_max=2 converged={bad.converged} ({bad.message})"


def criterion_9():
    cfg = IterationConfig(scaling="one_inf")
    worst = dict.fromkeys(("orth", "tangent", "linear", "idempotent", "skewY", "sign"), 0.0)
    for seed in range(10):
        A, E = suites.well_conditioned_case(6, seed, field="complex" if seed % 2 else "real")
        r = run_coupled(A, E, cfg)
        if not r.converged:
            return False, f"seed {seed} did not converge"
        worst["orth"] = max(worst["orth"], np.linalg.norm(r.U.conj().T @ r.U - np.eye(6))
                            / (10 * cfg.delta * np.linalg.norm(r.U)))
        worst["tangent"] = max(worst["tangent"], np.linalg.norm(sym(r.U.conj().T @ r.K))
                               / (10 * cfg.epsilon * np.linalg.norm(r.K)))
        E2 = g.random_gaussian(6, 6, 900 + seed)
        K2 = run_coupled(A, E2, cfg).K
        K12 = run_coupled(A, 2.0 * E - 0.5 * E2, cfg).K
        worst["linear"] = max(worst["linear"], _rel(K12, 2.0 * r.K - 0.5 * K2) / 1e-10)
        again = run_coupled(r.U, r.K, cfg)
        worst["idempotent"] = max(worst["idempotent"], max(_rel(again.U, r.U), _rel(again.K, r.K)) / 1e-10)
        Y = lyapunov_frechet(A, E).meta["Y"]
        worst["skewY"] = max(worst["skewY"], np.linalg.norm(Y + Y.conj().T) / (1e-12 * np.linalg.norm(Y)))
        H = sym(r.U.conj().T @ A)
        S = sign_newton(np.block([[H, r.U.conj().T @ E], [np.zeros((6, 6)), -H]]))
        worst["sign"] = max(worst["sign"], np.linalg.norm(S @ S - np.eye(12)) / 1e-10)
    ok = all(v <= 1 for v in worst.values())
    return ok, "budget used: " + ", ".join(f"{k} {v:.2f}" for k, v in worst.items())


def criterion_10():
    kr = condition_polar_real_square(g.frank_modified(16))
    B = g.binomial(16)
    est, exact = power_sigma_min(B, 200), svd(B).sigma[-1]
    ok = _factor(kr, 2.9e12) and _within(est, exact, 0.01)
    return ok, f"frank_modified kappa_real={kr:.2e}; power sigma_n={est:.6f} vs svd {exact:.6f}"


CRITERIA = [
    ("1a", "singular value targets, square gallery matrices", criterion_1_square),
    ("1b", "singular value targets, rect_binomial(16,5)", criterion_1_rect),
    ("2", "well-conditioned convergence", criterion_2),
    ("3", "ill-conditioning phenomenology", criterion_3),
    ("4", "block sign identities", criterion_4),
    ("5", "oracle cross-agreement", criterion_5),
    ("6", "residual approximation order", criterion_6),
    ("7", "rectangular path equivalence", criterion_7),
    ("8", "Newton-Schulz region", criterion_8),
    ("9", "property invariants", criterion_9),
    ("10", "condition-number formulas", criterion_10),
]

# The rectangular target figures cannot be produced from the first five
# columns of this binomial matrix under any of the conventions tried; see
# the decisions ledger. The check stays at full strength and is expected to fail.
KNOWN_FAILURES = {"1b"}


def _line(cid, title, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {cid}: {title}: {detail}"


@pytest.mark.parametrize(
    "cid,title,fn",
    [
        pytest.param(*c, id=f"criterion_{c[0]}",
                     marks=[pytest.mark.xfail(strict=True, reason="target singular values not reproducible")]
                     if c[0] in KNOWN_FAILURES else [])
        for c in CRITERIA
    ],
)
def test_criterion(cid, title, fn):
    from conftest import ACCEPTANCE_LINES

    ok, detail = fn()
    line = _line(cid, title, ok, detail)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = [(cid, title, *fn()) for cid, title, fn in CRITERIA]
    for cid, title, ok, detail in results:
        print(_line(cid, title, ok, detail))
    sys.exit(0 if all(ok for cid, _, ok, _ in results if cid not in KNOWN_FAILURES) else 1)
