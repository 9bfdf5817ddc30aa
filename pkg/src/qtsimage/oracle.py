"""Dense state-vector reference for image computations.

Gate actions are written out here directly on amplitude arrays instead of
reusing the circuit module's matrices, so the two routes can disagree.
"""
import cmath
import math

import numpy as np

from .circuit import Circuit, Gate, QuantumTransitionSystem
from .exceptions import CapacityError, ShapeError

MAX_QUBITS = 12
RANK_CUTOFF = 1e-9
_R = 1 / math.sqrt(2)


def _axes(state, n):
    return state.reshape((2,) * n)


def apply_gate(gate, state, n):
    """Apply one circuit element to a vector of length ``2**n``."""
    a = _axes(np.array(state, dtype=complex), n)
    qs = gate.qubits
    kind = gate.kind
    idx = lambda q, v: (slice(None),) * q + (v,)

    if kind == "h":
        q = qs[0]
        a0, a1 = a[idx(q, 0)].copy(), a[idx(q, 1)].copy()
        a[idx(q, 0)], a[idx(q, 1)] = _R * (a0 + a1), _R * (a0 - a1)
    elif kind in ("x", "y"):
        q = qs[0]
        a0, a1 = a[idx(q, 0)].copy(), a[idx(q, 1)].copy()
        if kind == "x":
            a[idx(q, 0)], a[idx(q, 1)] = a1, a0
        else:
            a[idx(q, 0)], a[idx(q, 1)] = -1j * a1, 1j * a0
    elif kind in ("z", "s", "t", "rz"):
        q = qs[0]
        phase = {"z": -1, "s": 1j, "t": cmath.exp(1j * math.pi / 4)}
        if kind == "rz":
            th = gate.params[0]
            a[idx(q, 0)] *= cmath.exp(-0.5j * th)
            a[idx(q, 1)] *= cmath.exp(0.5j * th)
        else:
            a[idx(q, 1)] *= phase[kind]
    elif kind in ("cx", "ccx", "mcx"):
        *ctrl, t = qs
        sel = [slice(None)] * n
        for c in ctrl:
            sel[c] = 1
        lo, hi = list(sel), list(sel)
        lo[t], hi[t] = 0, 1
        v0, v1 = a[tuple(lo)].copy(), a[tuple(hi)].copy()
        a[tuple(lo)], a[tuple(hi)] = v1, v0
    elif kind in ("cz", "cp"):
        c, t = qs
        sel = [slice(None)] * n
        sel[c], sel[t] = 1, 1
        a[tuple(sel)] *= -1 if kind == "cz" else cmath.exp(1j * gate.params[0])
    elif kind == "swap":
        a = np.swapaxes(a, qs[0], qs[1]).copy()
    elif kind == "proj":
        mask = np.zeros((2,) * len(qs))
        mask[tuple(int(b) for b in gate.bits)] = 1
        order = list(qs) + [q for q in range(n) if q not in qs]
        a = np.transpose(a, order)
        a = a * mask.reshape(mask.shape + (1,) * (n - len(qs)))
        a = np.transpose(a, np.argsort(order))
    elif kind == "op":
        k = len(qs)
        m = np.asarray(gate.matrix, dtype=complex).reshape((2,) * (2 * k))
        out = np.tensordot(m, a, axes=(list(range(k, 2 * k)), list(qs)))
        # out axes: gate outputs, then the untouched qubits in order
        rest = [q for q in range(n) if q not in qs]
        order = list(qs) + rest
        a = np.transpose(out, np.argsort(order))
    else:
        raise ShapeError("oracle has no rule for %r" % kind)
    return (complex(gate.scale) * a).reshape(-1)


def apply_circuit(circuit, state):
    v = np.asarray(state, dtype=complex)
    for g in circuit.gates:
        v = apply_gate(g, v, circuit.n)
    return v


def dense_operator(circuit):
    """The ``2**n x 2**n`` matrix of a Kraus circuit, columns are inputs."""
    n = circuit.n
    if n > 10:
        raise CapacityError("dense operators are limited to 10 qubits")
    eye = np.eye(2 ** n, dtype=complex)
    return np.stack([apply_circuit(circuit, eye[:, j]) for j in range(2 ** n)], axis=1)


def ket_vector(token):
    one = {"0": [1, 0], "1": [0, 1], "+": [_R, _R], "-": [_R, -_R]}
    v = np.ones(1, dtype=complex)
    for c in token:
        v = np.kron(v, one[c])
    return v


def init_vectors(system):
    """``S0`` spanning vectors as rows."""
    rows = [ket_vector(s) if isinstance(s, str) else np.asarray(s, dtype=complex) for s in system.init]
    return np.array(rows, dtype=complex).reshape(len(rows), 2 ** system.n)


def orthonormal_basis(vectors, cutoff=RANK_CUTOFF):
    """Rows spanning the same space as ``vectors`` (rows), orthonormal."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
    if vectors.size == 0:
        return np.zeros((0, vectors.shape[-1]), dtype=complex)
    u, s, _ = np.linalg.svd(vectors.T, full_matrices=False)
    return u[:, s > cutoff].T


def projector(vectors, cutoff=RANK_CUTOFF):
    """``V V^dagger`` of the span of ``vectors`` (rows)."""
    b = orthonormal_basis(vectors, cutoff)
    return b.T @ b.conj()


def dense_image(system, vectors):
    """Projector of ``T(span(vectors))``: every Kraus circuit applied to every
    spanning vector, then orthonormalized by SVD."""
    if system.n > MAX_QUBITS:
        raise CapacityError("the oracle handles at most %d qubits" % MAX_QUBITS)
    vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
    cols = [apply_circuit(c, v) for _, _, c in system.kraus_operators() for v in vectors if vectors.size]
    if not cols:
        return np.zeros((2 ** system.n, 2 ** system.n), dtype=complex)
    return projector(np.array(cols))


def dense_reachable(system, vectors=None, max_iters=None):
    """Fixpoint of ``S -> S v T(S)``; returns ``(projector, iterations)``."""
    if vectors is None:
        vectors = init_vectors(system)
    basis = orthonormal_basis(vectors)
    cap = max_iters or 2 ** system.n + 1
    for it in range(1, cap + 1):
        # columns of the image projector span the image
        img = orthonormal_basis(dense_image(system, basis).T)
        nxt = orthonormal_basis(np.vstack([basis, img]) if img.size else basis)
        if nxt.shape[0] == basis.shape[0]:
            return projector(nxt), it
        basis = nxt
    return projector(basis), cap


def compare_projectors(a, b, tol=1e-8):
    """``(max |a - b|, passed)``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError("projector shapes differ: %s vs %s" % (a.shape, b.shape))
    diff = float(np.max(np.abs(a - b))) if a.size else 0.0
    return diff, diff <= tol


# -- random instances -----------------------------------------------------------

_ONE_QUBIT = ("h", "x", "y", "z", "s", "t", "rz")
_TWO_QUBIT = ("cx", "cz", "swap", "cp")


def _random_gate(rng, n):
    roll = rng.random()
    if n >= 3 and roll < 0.1:
        qs = rng.choice(n, size=3, replace=False)
        return Gate("ccx", qs)
    if n >= 2 and roll < 0.45:
        kind = _TWO_QUBIT[rng.integers(len(_TWO_QUBIT))]
        qs = rng.choice(n, size=2, replace=False)
        params = [rng.uniform(0, 2 * math.pi)] if kind == "cp" else []
        return Gate(kind, qs, params)
    kind = _ONE_QUBIT[rng.integers(len(_ONE_QUBIT))]
    params = [rng.uniform(0, 2 * math.pi)] if kind == "rz" else []
    return Gate(kind, [rng.integers(n)], params)


def random_states(rng, n, dim):
    """``dim`` random orthonormal vectors (rows)."""
    z = rng.normal(size=(2 ** n, dim)) + 1j * rng.normal(size=(2 ** n, dim))
    q, _ = np.linalg.qr(z)
    return q.T


def random_instance(seed, n, gate_budget=20, kraus_count=1, dim=1, unitary=False):
    """A reproducible random system whose ``init`` spans ``dim`` random
    orthonormal vectors.  Unless ``unitary``, Kraus circuits may contain a
    projector or a scaled custom operator.

    Returns ``(system, vectors)`` with ``vectors`` of shape ``(dim, 2**n)``.
    """
    if not 1 <= n <= 6:
        raise ShapeError("random instances use 1 to 6 qubits")
    if not 1 <= dim <= 2 ** n:
        raise ShapeError("dim must lie in 1..%d" % 2 ** n)
    rng = np.random.default_rng(seed)
    n_symbols = 1 if kraus_count == 1 else int(rng.integers(1, min(kraus_count, 2) + 1))
    symbols = ["s%d" % i for i in range(n_symbols)]
    ops = {s: [] for s in symbols}
    for j in range(kraus_count):
        sym = symbols[j] if j < n_symbols else symbols[int(rng.integers(n_symbols))]
        count = int(rng.integers(1, gate_budget + 1)) if gate_budget else 0
        c = Circuit(n, [_random_gate(rng, n) for _ in range(count)], name="%s[%d]" % (sym, len(ops[sym])))
        if not unitary and rng.random() < 0.5 and c.gates:
            pos = int(rng.integers(len(c.gates) + 1))
            if rng.random() < 0.5:
                k = int(rng.integers(1, min(n, 2) + 1))
                qs = rng.choice(n, size=k, replace=False)
                bits = "".join(str(b) for b in rng.integers(0, 2, size=k))
                c.gates.insert(pos, Gate("proj", qs, bits=bits))
            else:
                q = int(rng.integers(n))
                m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                c.gates.insert(pos, Gate("op", [q], matrix=m, scale=float(rng.uniform(0.1, 1))))
        ops[sym].append(c)
    vectors = random_states(rng, n, dim)
    system = QuantumTransitionSystem(n, list(vectors), symbols, ops, name="random_%d" % seed)
    return system, vectors
