"""Benchmark transition systems: GHZ, BV, QFT, Grover and a noisy walk,
plus the bit-flip code used as a running example."""
import math

import numpy as np

from .circuit import Circuit, Gate, QuantumTransitionSystem
from .exceptions import ParameterError

FAMILIES = ("ghz", "bv", "qft", "grover", "qrw")
MIN_QUBITS = {"ghz": 1, "bv": 2, "qft": 1, "grover": 3, "qrw": 2}


def _x_gate(controls, target):
    controls = list(controls)
    if not controls:
        return Gate("x", [target])
    kind = {1: "cx", 2: "ccx"}.get(len(controls), "mcx")
    return Gate(kind, controls + [target])


def ghz(n):
    c = Circuit(n, name="ghz")
    c.append(Gate("h", [0]))
    for i in range(n - 1):
        c.append(Gate("cx", [i, i + 1]))
    return QuantumTransitionSystem(n, ["0" * n], ["1"], {"1": [c]}, name="ghz_%d" % n)


def bv(n, secret=None):
    """Data qubits ``0..n-2`` and an ancilla ``n-1`` prepared in ``|->``."""
    m = n - 1
    if secret is None:
        secret = "1" * m
    if len(secret) != m or set(secret) - {"0", "1"}:
        raise ParameterError("secret must be a bitstring of length %d" % m)
    c = Circuit(n, name="bv")
    for i in range(m):
        c.append(Gate("h", [i]))
    for i, b in enumerate(secret):
        if b == "1":
            c.append(Gate("cx", [i, m]))
    for i in range(m):
        c.append(Gate("h", [i]))
    return QuantumTransitionSystem(n, ["0" * m + "-"], ["1"], {"1": [c]}, name="bv_%d" % n)


def qft(n):
    """Hadamard and controlled-phase ladder without the final swaps."""
    c = Circuit(n, name="qft")
    for i in range(n):
        c.append(Gate("h", [i]))
        for j in range(i + 1, n):
            c.append(Gate("cp", [j, i], [math.pi / 2 ** (j - i)]))
    return QuantumTransitionSystem(n, ["0" * n], ["1"], {"1": [c]}, name="qft_%d" % n)


def grover_circuit(n):
    """One Grover iteration: search qubits ``0..n-2`` marked at all ones,
    oracle ancilla ``n-1``."""
    search = list(range(n - 1))
    last = search[-1]
    c = Circuit(n, name="grover")
    c.append(_x_gate(search, n - 1))
    for q in search:
        c.append(Gate("h", [q]))
    for q in search:
        c.append(Gate("x", [q]))
    c.append(Gate("h", [last]))
    c.append(_x_gate(search[:-1], last))
    c.append(Gate("h", [last]))
    for q in search:
        c.append(Gate("x", [q]))
    for q in search:
        c.append(Gate("h", [q]))
    return c


def grover(n):
    init = "+" * (n - 1) + "-"
    return QuantumTransitionSystem(n, [init], ["1"], {"1": [grover_circuit(n)]}, name="grover_%d" % n)


def walk_shift(n):
    """Gates of ``S0 (+) S1`` on coin ``0`` and position qubits ``1..n-1``
    (qubit 1 most significant): coin 1 steps up, coin 0 steps down."""
    m = n - 1
    pos = list(range(1, n))
    gates = []
    for k in range(m - 1):
        gates.append(_x_gate([0] + pos[k + 1:], pos[k]))
    gates.append(Gate("x", [pos[-1]]))
    if m > 1:
        gates.append(Gate("x", [0]))
        for k in reversed(range(m - 1)):
            gates.append(_x_gate([0] + pos[k + 1:], pos[k]))
        gates.append(Gate("x", [0]))
    return gates


def qrw(n, p=0.1):
    """Walk on a cycle of length ``2**(n-1)``; symbol ``2`` adds a bit flip
    on the coin after the Hadamard."""
    if not 0 < p < 1:
        raise ParameterError("p must lie in (0, 1), got %r" % p)
    shift = walk_shift(n)
    t1 = Circuit(n, [Gate("h", [0])] + shift, name="1[0]")
    keep = Circuit(n, [Gate("h", [0]), Gate("op", [0], matrix=np.eye(2), scale=math.sqrt(p))] + walk_shift(n),
                   name="2[0]")
    flip = Circuit(n, [Gate("h", [0]), Gate("x", [0], scale=math.sqrt(1 - p))] + walk_shift(n), name="2[1]")
    return QuantumTransitionSystem(n, ["0" * n], ["1", "2"], {"1": [t1], "2": [keep, flip]}, name="qrw_%d" % n)


def gen_benchmark(family, n, **extra):
    """Transition system of a benchmark family on ``n`` qubits.

    ``bv`` accepts ``secret`` and ``qrw`` accepts ``p``.
    """
    family = family.lower()
    if family not in FAMILIES:
        raise ParameterError("unknown family %r (expected one of %s)" % (family, ", ".join(FAMILIES)))
    try:
        n = int(n)
    except (TypeError, ValueError):
        raise ParameterError("n must be an integer") from None
    if n < MIN_QUBITS[family]:
        raise ParameterError("%s needs at least %d qubits, got %d" % (family, MIN_QUBITS[family], n))
    allowed = {"bv": {"secret"}, "qrw": {"p"}}.get(family, set())
    unknown = {k for k, v in extra.items() if v is not None} - allowed
    if unknown:
        raise ParameterError("%s does not take %s" % (family, ", ".join(sorted(unknown))))
    extra = {k: v for k, v in extra.items() if v is not None}
    builder = {"ghz": ghz, "bv": bv, "qft": qft, "grover": grover, "qrw": qrw}[family]
    return builder(n, **extra)


def bitflip_system():
    """Three-qubit bit-flip code with syndrome ancillas 3..5.

    Symbol ``sabc`` is the branch where the ancillas read ``abc``; it
    projects onto that outcome and applies the matching correction.
    """
    syndrome = [(0, 3), (1, 3), (0, 5), (1, 4), (2, 4), (2, 5)]
    correction = {"000": None, "101": 0, "110": 1, "011": 2}
    ops = {}
    for bits, fix in correction.items():
        c = Circuit(6, [Gate("cx", list(pair)) for pair in syndrome], name="s" + bits)
        c.append(Gate("proj", [3, 4, 5], bits=bits))
        if fix is not None:
            c.append(Gate("x", [fix]))
        ops["s" + bits] = [c]
    init = ["100000", "010000", "001000"]
    return QuantumTransitionSystem(6, init, list(ops), ops, name="bitflip")
