"""Subspaces held as an orthonormal basis of state TDDs plus their projector.

States are tensors over ``q1..qn``.  A projector is a tensor over the column
indices ``x1..xn`` and the row indices ``q1..qn``, so slicing the ``x``
indices yields columns as ordinary states.
"""
import math

import numpy as np

from .circuit import state_label
from .exceptions import NonProjectorError, PreconditionError, ShapeError

EPS0 = 1e-10
REORTH = 1e-4
COLUMN_TOL = 1e-9
EQUAL_TOL = 1e-8
GRAM_TOL = 1e-6

_KET = {
    "0": (1, 0),
    "1": (0, 1),
    "+": (1 / math.sqrt(2), 1 / math.sqrt(2)),
    "-": (1 / math.sqrt(2), -1 / math.sqrt(2)),
}


def state_labels(n):
    return [state_label(q) for q in range(n)]


def column_label(q):
    return "x%d" % (q + 1)


def column_labels(n):
    return [column_label(q) for q in range(n)]


class Subspace:
    """An immutable snapshot: ``basis`` (orthonormal state TDDs) and
    ``projector`` = sum of ``|v><v|``."""

    def __init__(self, engine, n, basis, projector):
        self.engine = engine
        self.n = n
        self.basis = tuple(basis)
        self.projector = projector

    @property
    def dim(self):
        return len(self.basis)

    def __repr__(self):
        return "Subspace(n=%d, dim=%d)" % (self.n, self.dim)

    @classmethod
    def zero(cls, engine, n):
        return cls(engine, n, (), engine.zero(column_labels(n) + state_labels(n)))

    @classmethod
    def span(cls, engine, n, states):
        """Span of arbitrary (not necessarily orthonormal) state TDDs."""
        return join_states(cls.zero(engine, n), states)

    @classmethod
    def from_dense(cls, engine, vectors, n=None):
        """Span of dense amplitude vectors (rows of ``vectors``)."""
        vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
        if n is None:
            n = int(round(math.log2(vectors.shape[1])))
        if vectors.shape[1] != 2 ** n:
            raise ShapeError("vectors need %d entries, got %d" % (2 ** n, vectors.shape[1]))
        labels = state_labels(n)
        return cls.span(engine, n, [engine.from_dense(v, labels) for v in vectors if vectors.size])

    def dense_basis(self):
        """Basis as a ``(dim, 2**n)`` array."""
        out = np.zeros((self.dim, 2 ** self.n), dtype=complex)
        for i, v in enumerate(self.basis):
            out[i] = self.engine.to_dense(v).reshape(-1)
        return out

    def dense_projector(self):
        """Projector as a ``2**n x 2**n`` matrix indexed ``[row, column]``."""
        n = self.n
        d = self.engine.to_dense(self.projector).reshape(2 ** n, 2 ** n)
        return d.T.copy()


def ket_state(engine, token):
    """Product state of a token such as ``"0+-1"``."""
    labels = state_labels(len(token))
    return engine.product_state(labels, [_KET[c] for c in token])


def initial_subspace(system, engine):
    """``S0`` of a transition system."""
    states = []
    for item in system.init:
        if isinstance(item, str):
            states.append(ket_state(engine, item))
        else:
            states.append(engine.from_dense(np.asarray(item, dtype=complex), state_labels(system.n)))
    return Subspace.span(engine, system.n, states)


def _columns(engine, state, n):
    return engine.relabel(state, dict(zip(state_labels(n), column_labels(n))))


def outer(engine, v, n):
    """``|v><v|`` over column then row indices."""
    return engine.contract_over(v, engine.conjugate(_columns(engine, v, n)), ())


def apply_projector(engine, P, state, n):
    """``P|state>`` as a state over ``q1..qn``."""
    return engine.contract_over(P, _columns(engine, state, n), column_labels(n))


def first_nonzero_column(P, tol=0.0):
    """Leftmost column of ``P`` that is non-zero.

    Returns ``(bits, column_state)`` or ``None``.  With ``tol > 0`` a branch
    whose largest entry is at most ``tol`` counts as zero, which keeps
    round-off residues from being picked up.
    """
    engine = P.engine
    xs = [l for l in P.indices if engine.key(l)[0] == 0]
    if P.is_zero or (tol and engine.max_abs(P) <= tol):
        return None
    bits = []
    cur = P
    for x in xs:
        low = engine.slice(cur, x, 0)
        if low.weight != 0 and (not tol or engine.max_abs(low) > tol):
            cur, b = low, 0
        else:
            cur, b = engine.slice(cur, x, 1), 1
        bits.append(b)
    if cur.is_zero:
        return None
    return tuple(bits), cur


def basis_decompose(P, n):
    """Orthonormal basis of the range of a projector TDD, found column by
    column along the leftmost non-zero path."""
    engine = P.engine
    basis = []
    built = engine.zero(column_labels(n) + state_labels(n))
    rest = P
    for _ in range(2 ** n):
        found = first_nonzero_column(rest, COLUMN_TOL)
        if found is None:
            break
        u = found[1]
        norm = engine.norm(u)
        if norm <= EPS0:
            break
        v = engine.scalar_mul(1 / norm, u)
        basis.append(v)
        vv = outer(engine, v, n)
        built = engine.add(built, vv)
        rest = engine.add(rest, engine.scalar_mul(-1, vv))
    else:
        if first_nonzero_column(rest, COLUMN_TOL) is not None:
            raise NonProjectorError("range extraction did not stop after %d columns" % 2 ** n)
    return Subspace(engine, n, basis, built)


def projector_from_basis(engine, basis, n):
    """``sum |v><v|`` of an orthonormal list of states."""
    basis = list(basis)
    for i, a in enumerate(basis):
        for j in range(i, len(basis)):
            g = engine.inner_product(a, basis[j])
            want = 1.0 if i == j else 0.0
            if abs(g - want) > GRAM_TOL:
                raise PreconditionError("basis is not orthonormal (Gram entry %d,%d = %s)" % (i, j, g))
    P = engine.zero(column_labels(n) + state_labels(n))
    for v in basis:
        P = engine.add(P, outer(engine, v, n))
    return P


def _residual(engine, P, psi, n):
    return engine.add(psi, engine.scalar_mul(-1, apply_projector(engine, P, psi, n)))


def join_states(S, states):
    """``S`` joined with the span of ``states`` by Gram-Schmidt."""
    engine, n = S.engine, S.n
    basis = list(S.basis)
    P = S.projector
    for psi in states:
        if len(basis) == 2 ** n:
            break
        if psi.is_zero:
            continue
        scale = engine.norm(psi)
        if scale <= EPS0:
            continue
        psi = engine.scalar_mul(1 / scale, psi)
        u = _residual(engine, P, psi, n)
        norm = engine.norm(u)
        if norm < REORTH:
            u = _residual(engine, P, u, n)
            norm = engine.norm(u)
        if norm <= EPS0:
            continue
        v = engine.scalar_mul(1 / norm, u)
        basis.append(v)
        P = engine.add(P, outer(engine, v, n))
    return Subspace(engine, n, basis, P)


def join(a, b):
    """``span(a u b)``."""
    if a.n != b.n:
        raise ShapeError("subspaces live on %d and %d qubits" % (a.n, b.n))
    if a.engine is not b.engine:
        raise ShapeError("subspaces belong to different engines")
    return join_states(a, b.basis)


def projector_distance(a, b):
    """Largest entry of ``P_a - P_b``, computed on the TDDs."""
    e = a.engine
    return e.max_abs(e.add(a.projector, e.scalar_mul(-1, b.projector)))


def equal_subspace(a, b, tol=EQUAL_TOL):
    if a.n != b.n:
        raise ShapeError("subspaces live on %d and %d qubits" % (a.n, b.n))
    return a.dim == b.dim and projector_distance(a, b) <= tol


def contains(a, b, tol=EQUAL_TOL):
    """Whether ``b`` is a subspace of ``a``."""
    e = a.engine
    return all(e.norm(_residual(e, a.projector, v, a.n)) <= tol for v in b.basis)


def gram_deviation(S):
    """``max |<v_i|v_j> - delta_ij|`` over the basis."""
    e = S.engine
    worst = 0.0
    for i, a in enumerate(S.basis):
        for j in range(i, S.dim):
            g = e.inner_product(a, S.basis[j])
            worst = max(worst, abs(g - (1.0 if i == j else 0.0)))
    return worst

