"""Gates, circuits, quantum transition systems and their tensor networks.

Qubit ``i`` (0-based) is the ``i``-th most significant bit of a basis state.
Wire indices are labelled ``q<i+1>^<j>``: the ``j``-th index met walking
qubit ``i`` from left to right.  Diagonal gates and the control wires of
controlled gates do not open a new index; their input and output share one
label, which turns them into hyper-edges of the network.
"""
from collections import Counter
from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from .exceptions import ShapeError
from .tdd import TddEngine

SQ2 = 1 / math.sqrt(2)

FIXED_MATRICES = {
    "h": np.array([[SQ2, SQ2], [SQ2, -SQ2]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "t": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}
# name -> (qubit count or None for variadic, number of angle params)
GATE_ARITY = {
    "h": (1, 0), "x": (1, 0), "y": (1, 0), "z": (1, 0), "s": (1, 0), "t": (1, 0),
    "cx": (2, 0), "cz": (2, 0), "ccx": (3, 0), "swap": (2, 0), "mcx": (None, 0),
    "rz": (1, 1), "cp": (2, 1),
}
DIAGONAL_GATES = {"z", "s", "t", "rz", "cz", "cp"}
CONTROLLED_X = {"cx", "ccx", "mcx"}


@dataclass(eq=False)
class Gate:
    """One circuit element.

    ``kind`` is a named gate, ``"proj"`` (projector onto ``bits`` over
    ``qubits``) or ``"op"`` (explicit ``matrix`` on ``qubits``, rows are
    outputs).  ``scale`` multiplies the element, which is how scaled Kraus
    terms such as ``sqrt(p) I`` are written.
    """

    kind: str
    qubits: tuple
    params: tuple = ()
    bits: str = None
    matrix: np.ndarray = None
    scale: complex = 1.0

    def __post_init__(self):
        self.qubits = tuple(int(q) for q in self.qubits)
        self.params = tuple(float(p) for p in self.params)
        if len(set(self.qubits)) != len(self.qubits):
            raise ShapeError("repeated qubit in %s %s" % (self.kind, self.qubits))
        if self.kind == "proj":
            if self.bits is None or len(self.bits) != len(self.qubits) or set(self.bits) - {"0", "1"}:
                raise ShapeError("projector needs one bit per qubit")
        elif self.kind == "op":
            m = np.asarray(self.matrix, dtype=complex)
            d = 2 ** len(self.qubits)
            if m.shape != (d, d):
                raise ShapeError("custom matrix %s does not fit %d qubits" % (m.shape, len(self.qubits)))
            self.matrix = m
        else:
            if self.kind not in GATE_ARITY:
                raise ShapeError("unknown gate %r" % self.kind)
            arity, nparams = GATE_ARITY[self.kind]
            if arity is None:
                if len(self.qubits) < 2:
                    raise ShapeError("mcx needs at least one control and a target")
            elif len(self.qubits) != arity:
                raise ShapeError("%s acts on %d qubits, got %d" % (self.kind, arity, len(self.qubits)))
            if len(self.params) != nparams:
                raise ShapeError("%s takes %d parameters" % (self.kind, nparams))

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        same_matrix = (self.matrix is None and other.matrix is None) or (
            self.matrix is not None and other.matrix is not None
            and np.array_equal(self.matrix, other.matrix)
        )
        return (self.kind, self.qubits, self.params, self.bits, complex(self.scale)) == (
            other.kind, other.qubits, other.params, other.bits, complex(other.scale)
        ) and same_matrix

    @property
    def controls(self):
        """Control qubits of controlled-X gates, else ``()``."""
        if self.kind in CONTROLLED_X:
            return self.qubits[:-1]
        return ()

    @property
    def is_diagonal(self):
        if self.kind in DIAGONAL_GATES or self.kind == "proj":
            return True
        if self.kind == "op":
            m = self.matrix
            return not np.any(m - np.diag(np.diag(m)))
        return False

    def merged_qubits(self):
        """Qubits whose input and output index coincide."""
        if self.is_diagonal:
            return set(self.qubits)
        return set(self.controls)

    def matrix_of(self):
        """Full ``2^k x 2^k`` matrix over ``qubits`` (scale included)."""
        return self.scale * self.base_matrix()

    def base_matrix(self):
        k = len(self.qubits)
        if self.kind in FIXED_MATRICES:
            m = FIXED_MATRICES[self.kind]
        elif self.kind in CONTROLLED_X:
            m = np.eye(2 ** k, dtype=complex)
            m[-2:, -2:] = FIXED_MATRICES["x"]
        elif self.kind == "op":
            m = self.matrix
        else:
            m = np.diag(self.diagonal())
        return m

    def diagonal(self):
        """Diagonal entries (scale excluded) of a diagonal gate."""
        k = len(self.qubits)
        if self.kind == "z":
            return np.array([1, -1], dtype=complex)
        if self.kind == "s":
            return np.array([1, 1j])
        if self.kind == "t":
            return np.array([1, np.exp(1j * math.pi / 4)])
        if self.kind == "rz":
            th = self.params[0]
            return np.array([np.exp(-0.5j * th), np.exp(0.5j * th)])
        if self.kind == "cz":
            return np.array([1, 1, 1, -1], dtype=complex)
        if self.kind == "cp":
            return np.array([1, 1, 1, np.exp(1j * self.params[0])])
        if self.kind == "proj":
            d = np.zeros(2 ** k, dtype=complex)
            d[int(self.bits, 2)] = 1
            return d
        if self.kind == "op":
            return np.diag(self.matrix).copy()
        raise ShapeError("%s is not diagonal" % self.kind)

    def describe(self):
        if self.kind == "proj":
            return "proj %s %s" % (" ".join(map(str, self.qubits)), self.bits)
        return "%s %s" % (self.kind, " ".join(map(str, self.qubits)))


@dataclass
class Circuit:
    """An ordered gate list on ``n`` qubits; as a Kraus operator it is the
    product of its gates (first gate applied first), identity elsewhere."""

    n: int
    gates: list = field(default_factory=list)
    name: str = ""

    def __post_init__(self):
        for g in self.gates:
            self._check(g)

    def _check(self, g):
        for q in g.qubits:
            if not 0 <= q < self.n:
                raise ShapeError("qubit %d out of range for %d qubits" % (q, self.n))

    def append(self, gate):
        self._check(gate)
        self.gates.append(gate)
        return self

    def __len__(self):
        return len(self.gates)


KrausOperator = Circuit


@dataclass
class QuantumTransitionSystem:
    """``(H, S0, Sigma, T)`` with ``H`` of dimension ``2**n``.

    ``init`` lists spanning states of ``S0``, each a ket token string over
    ``{0,1,+,-}`` or a length ``2**n`` amplitude vector.  ``operations`` maps
    each symbol to its Kraus operators.
    """

    n: int
    init: list = field(default_factory=list)
    symbols: list = field(default_factory=list)
    operations: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise ShapeError("a system needs at least one qubit")
        if not self.symbols:
            self.symbols = list(self.operations)
        for s in self.symbols:
            ops = self.operations.get(s)
            if not ops:
                raise ShapeError("symbol %r has no Kraus operator" % s)
            for op in ops:
                if op.n != self.n:
                    raise ShapeError("Kraus operator width %d != %d" % (op.n, self.n))
        for state in self.init:
            if isinstance(state, str):
                if len(state) != self.n or set(state) - set("01+-"):
                    raise ShapeError("bad ket token %r" % state)
            elif len(state) != 2 ** self.n:
                raise ShapeError("init vector must have %d entries" % 2 ** self.n)

    def kraus_operators(self):
        """All ``(symbol, index, circuit)`` triples in symbol order."""
        return [(s, j, op) for s in self.symbols for j, op in enumerate(self.operations[s])]

    def __eq__(self, other):
        if not isinstance(other, QuantumTransitionSystem):
            return NotImplemented

        def same_state(a, b):
            if isinstance(a, str) or isinstance(b, str):
                return a == b
            return np.array_equal(np.asarray(a, complex), np.asarray(b, complex))

        return (
            self.n == other.n
            and list(self.symbols) == list(other.symbols)
            and all(
                len(self.operations[s]) == len(other.operations[s])
                and all(a.gates == b.gates for a, b in zip(self.operations[s], other.operations[s]))
                for s in self.symbols
            )
            and len(self.init) == len(other.init)
            and all(same_state(a, b) for a, b in zip(self.init, other.init))
        )


# -- lowering to tensors -----------------------------------------------------


def wire_label(qubit, position):
    return "q%d^%d" % (qubit + 1, position)


def state_label(qubit):
    return "q%d" % (qubit + 1)


def gate_tensor(gate, engine=None, inputs=None, outputs=None):
    """TDD of ``gate`` and its index labels.

    ``inputs``/``outputs`` map each acted qubit to a label; merged qubits use
    their input label for both.  Without them, fresh labels ``q<i>^1`` (and
    ``q<i>^2`` for unmerged outputs) are used.
    """
    engine = engine if engine is not None else TddEngine()
    merged = gate.merged_qubits()
    if inputs is None:
        inputs = {q: wire_label(q, 1) for q in gate.qubits}
    if outputs is None:
        outputs = {q: (inputs[q] if q in merged else wire_label(q, 2)) for q in gate.qubits}
    k = len(gate.qubits)

    if gate.is_diagonal:
        labels = [inputs[q] for q in gate.qubits]
        values = gate.diagonal()
    elif gate.kind in CONTROLLED_X:
        ctrl = gate.qubits[:-1]
        t = gate.qubits[-1]
        labels = [inputs[q] for q in ctrl] + [inputs[t], outputs[t]]
        values = np.zeros((2,) * (len(ctrl) + 2), dtype=complex)
        values[..., 0, 0] = 1
        values[..., 1, 1] = 1
        on = (1,) * len(ctrl)
        values[on] = FIXED_MATRICES["x"].T  # [t_in, t_out] = X[t_out, t_in]
    else:
        labels = [inputs[q] for q in gate.qubits] + [outputs[q] for q in gate.qubits]
        m = gate.base_matrix()
        # m[out, in] -> values[in..., out...]
        values = m.reshape((2,) * (2 * k))
        values = np.transpose(values, list(range(k, 2 * k)) + list(range(k)))
    t = engine.from_dense(np.asarray(values) * gate.scale, labels)
    return t, tuple(labels)


@dataclass
class NetTensor:
    gate: Gate
    time: int
    inputs: dict
    outputs: dict

    @property
    def labels(self):
        seen = dict.fromkeys(self.inputs[q] for q in self.gate.qubits)
        seen.update(dict.fromkeys(self.outputs[q] for q in self.gate.qubits))
        return tuple(seen)

    def tdd(self, engine):
        return gate_tensor(self.gate, engine, self.inputs, self.outputs)[0]


@dataclass
class TensorNet:
    """Labelled tensor network of a circuit; tensors are built on demand."""

    n: int
    tensors: list
    inputs: list
    outputs: list

    def labels(self):
        out = list(self.inputs)
        for t in self.tensors:
            out.extend(t.labels)
        out.extend(self.outputs)
        return list(dict.fromkeys(out))

    def wire_labels(self, qubit):
        prefix = "q%d^" % (qubit + 1)
        return sorted((l for l in self.labels() if l.startswith(prefix)),
                      key=lambda l: int(l.split("^")[1]))


def circuit_to_network(circuit):
    """Label every wire segment of ``circuit`` left to right."""
    position = [1] * circuit.n
    current = [wire_label(q, 1) for q in range(circuit.n)]
    tensors = []
    for time_, g in enumerate(circuit.gates):
        merged = g.merged_qubits()
        ins, outs = {}, {}
        for q in g.qubits:
            ins[q] = current[q]
            if q not in merged:
                position[q] += 1
                current[q] = wire_label(q, position[q])
            outs[q] = current[q]
        tensors.append(NetTensor(g, time_, ins, outs))
    return TensorNet(circuit.n, tensors, [wire_label(q, 1) for q in range(circuit.n)], list(current))


def contract_tensors(engine, tensors, keep):
    """Contract ``tensors`` left to right, summing an index once no later
    tensor uses it and it is not in ``keep``."""
    keep = set(keep)
    remaining = Counter(l for t in tensors for l in t.indices)
    acc = None
    for t in tensors:
        for l in t.indices:
            remaining[l] -= 1
        if acc is None:
            acc = t
            continue
        summed = {l for l in set(acc.indices) | set(t.indices) if not remaining[l] and l not in keep}
        acc = engine.contract_over(acc, t, summed)
    if acc is None:
        return engine.constant(1)
    dead = [l for l in acc.indices if l not in keep]
    if dead:
        acc = engine.contract_over(acc, engine.constant(1), dead)
    return acc


def network_operator(engine, net, tensors=None):
    """Monolithic operator TDD of a network over its open input/output labels."""
    if tensors is None:
        tensors = [t.tdd(engine) for t in net.tensors]
    return contract_tensors(engine, tensors, set(net.inputs) | set(net.outputs))


def apply_operator(engine, op, net, state):
    """Apply a pre-contracted operator TDD of ``net`` to a state over ``q<i>``."""
    ins = {state_label(q): net.inputs[q] for q in range(net.n)}
    psi = engine.relabel(state, ins)
    summed = set(net.inputs) - set(net.outputs)
    out = engine.contract_over(psi, op, summed)
    return engine.relabel(out, {net.outputs[q]: state_label(q) for q in range(net.n)})


def apply_network(engine, net, state, tensors):
    """Contract ``state`` through ``tensors`` (a list of TDDs over the
    network's labels, in the order given) and return the output state."""
    ins = {state_label(q): net.inputs[q] for q in range(net.n)}
    psi = engine.relabel(state, ins)
    out = contract_tensors(engine, [psi] + list(tensors), set(net.outputs))
    return engine.relabel(out, {net.outputs[q]: state_label(q) for q in range(net.n)})


# -- index graph --------------------------------------------------------------


@dataclass
class IndexGraph:
    vertices: list
    adjacency: dict

    @property
    def degree(self):
        return {v: len(self.adjacency[v]) for v in self.vertices}

    @property
    def edges(self):
        return sorted({tuple(sorted((a, b))) for a in self.adjacency for b in self.adjacency[a]})

    def max_degree_vertices(self):
        deg = self.degree
        top = max(deg.values(), default=0)
        return {v for v, d in deg.items() if d == top}


def index_graph(net):
    """Graph whose vertices are (merged) indices; two indices are adjacent
    when they belong to the same gate."""
    vertices = net.labels()
    adjacency = {v: set() for v in vertices}
    for t in net.tensors:
        for a, b in itertools.combinations(t.labels, 2):
            adjacency[a].add(b)
            adjacency[b].add(a)
    return IndexGraph(vertices, adjacency)


def label_position(label):
    """``(qubit, position)`` of a ``q<i>^<j>`` label (1-based as written)."""
    head, pos = label[1:].split("^")
    return int(head), int(pos)
