import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtsimage import oracle
from qtsimage.benchmarks import bitflip_system, grover
from qtsimage.circuit import FIXED_MATRICES, Circuit, Gate, QuantumTransitionSystem
from qtsimage.exceptions import CapacityError, ShapeError


def embed(m, qubits, n):
    """Dense matrix of ``m`` acting on ``qubits`` (first listed is most
    significant) by explicit index bookkeeping."""
    k = len(qubits)
    out = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for col in range(2 ** n):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub_in = sum(bits[q] << (k - 1 - i) for i, q in enumerate(qubits))
        for sub_out in range(2 ** k):
            new = list(bits)
            for i, q in enumerate(qubits):
                new[q] = (sub_out >> (k - 1 - i)) & 1
            row = sum(b << (n - 1 - q) for q, b in enumerate(new))
            out[row, col] += m[sub_out, sub_in]
    return out


def controlled(m, controls):
    d = 2 ** controls
    out = np.eye(2 * d, dtype=complex)
    out[-2:, -2:] = m
    return out


def reference_matrix(g):
    kind = g.kind
    if kind in FIXED_MATRICES:
        return FIXED_MATRICES[kind]
    if kind == "rz":
        th = g.params[0]
        return np.diag([np.exp(-0.5j * th), np.exp(0.5j * th)])
    if kind in ("cx", "ccx", "mcx"):
        return controlled(FIXED_MATRICES["x"], len(g.qubits) - 1)
    if kind == "cz":
        return controlled(FIXED_MATRICES["z"], 1)
    if kind == "cp":
        return controlled(np.diag([1, np.exp(1j * g.params[0])]), 1)
    raise AssertionError(kind)


GATES = [Gate("h", [1]), Gate("x", [0]), Gate("y", [2]), Gate("z", [1]), Gate("s", [0]), Gate("t", [2]),
         Gate("rz", [1], [0.7]), Gate("cx", [2, 0]), Gate("cz", [0, 2]), Gate("cp", [1, 0], [1.1]),
         Gate("swap", [0, 2]), Gate("ccx", [2, 0, 1]), Gate("mcx", [0, 1, 2])]


@pytest.mark.parametrize("gate", GATES, ids=lambda g: g.kind)
def test_gate_actions_match_matrices(gate):
    n = 3
    want = embed(reference_matrix(gate), gate.qubits, n)
    got = oracle.dense_operator(Circuit(n, [gate]))
    assert np.abs(got - want).max() < 1e-12


def test_proj_and_op_elements():
    got = oracle.dense_operator(Circuit(2, [Gate("proj", [1], bits="1")]))
    assert np.allclose(got, np.diag([0, 1, 0, 1]))
    m = np.array([[1, 2], [3, 4j]])
    got = oracle.dense_operator(Circuit(2, [Gate("op", [0], matrix=m, scale=0.5)]))
    assert np.allclose(got, 0.5 * embed(m, (0,), 2))


def test_ket_vectors():
    assert np.allclose(oracle.ket_vector("1-"), [0, 0, 1 / math.sqrt(2), -1 / math.sqrt(2)])
    assert oracle.init_vectors(bitflip_system()).shape == (3, 64)


def test_dense_image_of_grover():
    P = oracle.dense_image(grover(3), [oracle.ket_vector("++-")])
    assert np.allclose(P, oracle.projector([oracle.ket_vector("11-")]))


def test_size_limits():
    with pytest.raises(CapacityError):
        oracle.dense_operator(Circuit(11))
    big = QuantumTransitionSystem(13, ["0" * 13], ["a"], {"a": [Circuit(13)]})
    with pytest.raises(CapacityError):
        oracle.dense_image(big, [np.zeros(2 ** 13)])


def test_compare_projectors():
    assert oracle.compare_projectors(np.eye(2), np.eye(2)) == (0.0, True)
    diff, ok = oracle.compare_projectors(np.eye(2), np.diag([1, 0]))
    assert diff == 1 and not ok
    with pytest.raises(ShapeError):
        oracle.compare_projectors(np.eye(2), np.eye(4))


def test_random_instance_is_deterministic():
    a, va = oracle.random_instance(7, 3, kraus_count=2, dim=2)
    b, vb = oracle.random_instance(7, 3, kraus_count=2, dim=2)
    assert a == b and np.array_equal(va, vb)
    with pytest.raises(ShapeError):
        oracle.random_instance(0, 7)
    with pytest.raises(ShapeError):
        oracle.random_instance(0, 2, dim=5)


@settings(max_examples=50)
@given(st.integers(0, 10 ** 6), st.integers(1, 5))
def test_unitary_instances_are_unitary(seed, n):
    system, _ = oracle.random_instance(seed, n, unitary=True)
    for _, _, c in system.kraus_operators():
        U = oracle.dense_operator(c)
        assert np.abs(U.conj().T @ U - np.eye(2 ** n)).max() < 1e-10


@settings(max_examples=50)
@given(st.integers(0, 10 ** 6), st.integers(1, 4), st.integers(1, 3))
def test_image_is_span_of_applied_vectors(seed, n, dim):
    dim = min(dim, 2 ** n)
    system, vectors = oracle.random_instance(seed, n, kraus_count=2, dim=dim)
    P = oracle.dense_image(system, vectors)
    images = np.array([oracle.dense_operator(c) @ v for _, _, c in system.kraus_operators() for v in vectors])
    assert np.allclose(P, P.conj().T) and np.allclose(P @ P, P)
    assert round(np.trace(P).real) == np.linalg.matrix_rank(images, 1e-9)
    for w in images:
        assert np.linalg.norm(P @ w - w) < 1e-9


@settings(max_examples=50)
@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_dense_reach_is_closed(seed, n):
    system, vectors = oracle.random_instance(seed, n, kraus_count=2)
    P, _ = oracle.dense_reachable(system, vectors)
    for v in vectors:
        assert np.linalg.norm(P @ v - v) < 1e-8
    for _, _, c in system.kraus_operators():
        M = oracle.dense_operator(c)
        assert np.abs(P @ M @ P - M @ P).max() < 1e-8
