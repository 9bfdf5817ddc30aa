import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from qtsimage.benchmarks import bitflip_system, grover
from qtsimage.estimator import ImageComputer
from qtsimage.exceptions import ParameterError, ShapeError
from qtsimage.oracle import ket_vector, projector
from qtsimage.qtsfile import dump
from qtsimage.subspace import Subspace, equal_subspace, ket_state
from qtsimage.tdd import TddEngine


def test_transform_dense_states():
    est = ImageComputer(method="addition", k=2).fit(grover(3))
    out = est.transform([ket_vector("++-"), ket_vector("11-")])
    assert out.shape == (2, 8)
    assert np.allclose(projector(out), projector([ket_vector("++-"), ket_vector("11-")]))
    assert est.last_result_.dim == 2
    assert est.n_qubits_ == 3 and est.n_kraus_ == 1


def test_transform_subspace():
    e = TddEngine()
    S = Subspace.span(e, 3, [ket_state(e, "++-")])
    out = ImageComputer(method="contraction", k1=1, k2=1).fit(grover(3)).transform(S)
    assert equal_subspace(out, Subspace.span(e, 3, [ket_state(e, "11-")]))


def test_params_round_trip():
    est = ImageComputer(method="contraction", k1=2, k2=3)
    assert est.get_params() == {"method": "contraction", "k": 1, "k1": 2, "k2": 3, "timeout": None}
    other = clone(est).set_params(k2=5)
    assert other.k2 == 5 and est.k2 == 3


def test_not_fitted():
    with pytest.raises(NotFittedError):
        ImageComputer().transform([ket_vector("000")])


@pytest.mark.parametrize("kwargs", [{"method": "nope"}, {"method": "addition", "k": -1},
                                    {"method": "contraction", "k1": 0}, {"method": "contraction", "k2": 1.5}])
def test_bad_parameters(kwargs):
    with pytest.raises(ParameterError):
        ImageComputer(**kwargs).fit(grover(3))


def test_bad_inputs():
    est = ImageComputer().fit(grover(3))
    with pytest.raises(ShapeError):
        est.transform(np.ones((1, 4)))
    with pytest.raises(ShapeError):
        est.transform([[np.nan] * 8])
    with pytest.raises(ShapeError):
        est.transform(Subspace.zero(TddEngine(), 2))
    with pytest.raises(ShapeError):
        ImageComputer().fit(42)


def test_fit_from_path(tmp_path):
    path = tmp_path / "bitflip.qts"
    dump(bitflip_system(), path)
    est = ImageComputer().fit(str(path))
    r = est.reachable()
    assert r.dims == [3, 6, 9, 9]
    with pytest.raises(ParameterError):
        est.reachable(max_iters=0)
