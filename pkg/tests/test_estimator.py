import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from polarfrechet import gallery as g
from polarfrechet.estimator import PolarFrechet, check_matrix
from polarfrechet.methods import METHODS, compute_polar, resolve_scaling
from polarfrechet.oracles import svd_frechet
from polarfrechet.suites import well_conditioned_case

from conftest import rel


def test_params_round_trip():
    est = PolarFrechet(method="svd", delta=1e-12)
    params = est.get_params()
    assert params == {"method": "svd", "scaling": None, "delta": 1e-12, "epsilon": 1e-14, "max_iter": 100}
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(method="lyapunov")
    assert est.method == "lyapunov"


def test_fit_attributes():
    A, E = well_conditioned_case(5, 0)
    est = PolarFrechet().fit(A, E)
    ref = svd_frechet(A, E)
    assert est.converged_ and est.n_iter_ == len(est.trace_) - 1
    assert rel(est.unitary_, ref.U) <= 1e-13
    assert rel(est.derivative_, ref.K) <= 1e-11
    assert rel(est.unitary_ @ est.hermitian_, A) <= 1e-13


@pytest.mark.parametrize("method", ["newton", "svd", "lyapunov", "complex-step", "qr-newton"])
def test_transform_matches_oracle(method):
    A, E = well_conditioned_case(6, 1)
    est = PolarFrechet(method=method).fit(A)
    assert est.derivative_ is None
    E2 = g.random_gaussian(6, 6, 77)
    assert rel(est.transform(E2), svd_frechet(A, E2).K) <= 1e-10


def test_transform_rectangular():
    A = g.rect_binomial(16, 5)
    E = g.random_gaussian(16, 5, 3, "complex")
    est = PolarFrechet(method="newton-rect").fit(A)
    assert rel(est.transform(E), svd_frechet(A, E).K) <= 1e-10


def test_fit_transform():
    A, E = well_conditioned_case(4, 2)
    assert rel(PolarFrechet().fit_transform(A, E), svd_frechet(A, E).K) <= 1e-11


def test_errors():
    with pytest.raises(NotFittedError):
        PolarFrechet().transform(np.eye(2))
    with pytest.raises(ValueError):
        PolarFrechet(method="halley").fit(np.eye(2))
    with pytest.raises(ValueError, match="A:"):
        check_matrix(np.ones(3))
    est = PolarFrechet().fit(np.eye(2))
    with pytest.raises(ValueError):
        est.transform(np.eye(3))


def test_complex_inputs_are_accepted():
    A, E = well_conditioned_case(4, 3, field="complex")
    est = PolarFrechet().fit(A, E)
    assert rel(est.derivative_, svd_frechet(A, E).K) <= 1e-11


class TestDispatcher:
    def test_every_method_square(self):
        A, E = well_conditioned_case(5, 4)
        A = A / np.linalg.norm(A, 2)  # singular values inside the Newton-Schulz region
        ref = svd_frechet(A, E).K
        for method in METHODS:
            out = compute_polar(A, E, method)
            assert out.converged, method
            assert rel(out.K, ref) <= 1e-10, method

    def test_scaling_names(self):
        assert resolve_scaling("newton", None) == "one_inf"
        assert resolve_scaling("newton-rect", None) == "one_inf_rect"
        assert resolve_scaling("newton-schulz", None) == "none"
        assert resolve_scaling("newton", "fro") == "frobenius"
        assert resolve_scaling("newton", "frobenius") == "frobenius"
        with pytest.raises(ValueError):
            resolve_scaling("newton", "2")
        with pytest.raises(ValueError):
            resolve_scaling("halley", None)

    def test_direct_methods_reject_scaling(self):
        with pytest.raises(ValueError):
            compute_polar(np.eye(2), None, "svd", "1inf")

    def test_diagnostic_trace(self):
        A = g.binomial(6)
        out = compute_polar(A, g.random_gaussian(6, 6, 0), diagnostic=True)
        assert out.trace[-1].err_X is not None

    def test_square_newton_rejects_rectangular(self):
        with pytest.raises(ValueError, match="newton-rect"):
            compute_polar(np.ones((3, 2)) + np.eye(3, 2))
