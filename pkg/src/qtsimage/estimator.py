"""Estimator-style front end over the image engine."""
import numbers
import os

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .circuit import QuantumTransitionSystem
from .exceptions import ParameterError, ShapeError
from .image import image, method_params, reachable
from .qtsfile import load
from .subspace import Subspace
from .tdd import TddEngine


def check_system(system):
    """A transition system from an instance or a ``.qts`` path."""
    if isinstance(system, (str, os.PathLike)):
        return load(system)
    if not isinstance(system, QuantumTransitionSystem):
        raise ShapeError("expected a QuantumTransitionSystem or a .qts path, got %s" % type(system).__name__)
    return system


def check_states(X, n):
    """Validate spanning vectors: a finite complex array of shape ``(m, 2**n)``."""
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ShapeError("states must be a 2-d array, got %d dimensions" % X.ndim)
    if X.shape[1] != 2 ** n:
        raise ShapeError("states need %d amplitudes, got %d" % (2 ** n, X.shape[1]))
    if not np.issubdtype(X.dtype, np.number):
        raise ShapeError("states must be numeric")
    X = X.astype(complex)
    if not np.all(np.isfinite(X)):
        raise ShapeError("states contain NaN or infinity")
    return X


def check_positive_int(value, name, minimum=1):
    if not isinstance(value, numbers.Integral) or value < minimum:
        raise ParameterError("%s must be an integer >= %d, got %r" % (name, minimum, value))
    return int(value)


class ImageComputer(TransformerMixin, BaseEstimator):
    """Image of subspaces under a fixed transition system.

    ``fit`` takes the system (or a ``.qts`` path).  ``transform`` maps a
    :class:`Subspace` to its image, or a ``(m, 2**n)`` array of spanning
    vectors to an orthonormal basis of the image (rows).

    >>> from qtsimage.benchmarks import ghz
    >>> est = ImageComputer(method="contraction").fit(ghz(3))
    >>> est.transform([[1, 0, 0, 0, 0, 0, 0, 0]]).shape
    (1, 8)
    """

    def __init__(self, method="basic", k=1, k1=4, k2=4, timeout=None):
        self.method = method
        self.k = k
        self.k1 = k1
        self.k2 = k2
        self.timeout = timeout

    def _params(self):
        if self.method == "addition":
            check_positive_int(self.k, "k", 0)
        elif self.method == "contraction":
            check_positive_int(self.k1, "k1")
            check_positive_int(self.k2, "k2")
        return method_params(self.method, self.k, self.k1, self.k2)

    def fit(self, system, y=None):
        system = check_system(system)
        self.params_ = self._params()
        self.system_ = system
        self.n_qubits_ = system.n
        self.n_kraus_ = len(system.kraus_operators())
        self.last_result_ = None
        return self

    def _check_fitted(self):
        if not hasattr(self, "system_"):
            raise NotFittedError("call fit with a transition system first")

    def compute(self, S):
        """Full :class:`ImageResult` of a subspace."""
        self._check_fitted()
        if S.n != self.n_qubits_:
            raise ShapeError("subspace on %d qubits, system on %d" % (S.n, self.n_qubits_))
        result = image(self.system_, S, self.method, timeout=self.timeout, **self.params_)
        self.last_result_ = result
        return result

    def transform(self, X):
        self._check_fitted()
        if isinstance(X, Subspace):
            return self.compute(X).subspace
        X = check_states(X, self.n_qubits_)
        S = Subspace.from_dense(TddEngine(), X, self.n_qubits_)
        return self.compute(S).subspace.dense_basis()

    def reachable(self, S0=None, max_iters=100):
        """Reachable subspace from ``S0`` (default: the system's initial space)."""
        self._check_fitted()
        check_positive_int(max_iters, "max_iters")
        return reachable(self.system_, self.method, max_iters, S0=S0, timeout=self.timeout, **self.params_)
