"""Image of a subspace under a quantum transition system, and reachability.

All three methods compute ``T(S) = span{E|v> : E a Kraus operator, v in a
basis of S}``; they differ in how the operator ``E`` is held while it is
applied to ``|v>``:

* ``basic`` contracts each Kraus circuit into one operator TDD;
* ``addition`` slices the ``k`` busiest indices of the circuit network and
  sums the ``2**k`` partial results;
* ``contraction`` cuts the circuit into a grid of small blocks and sweeps
  the state through them in time order.
"""
from collections import Counter
from dataclasses import dataclass, field
import time

from .circuit import apply_operator, circuit_to_network, contract_tensors, state_label
from .exceptions import ComputationTimeout, ParameterError, ShapeError
from .partition import addition_plans, plan_contraction
from .subspace import Subspace, initial_subspace, join_states
from .tdd import TddEngine

METHODS = ("basic", "addition", "contraction")
DEFAULTS = {"k": 1, "k1": 4, "k2": 4}


@dataclass
class ImageResult:
    subspace: Subspace
    elapsed: float
    peak_nodes: int
    method: str = "basic"
    params: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    max_tdd_nodes: int = 0

    @property
    def dim(self):
        return self.subspace.dim


@dataclass
class ReachResult:
    subspace: Subspace
    iterations: int
    converged: bool
    dims: list
    elapsed: float
    peak_nodes: int

    @property
    def dim(self):
        return self.subspace.dim


def method_params(method, k=None, k1=None, k2=None):
    """Validated parameter dict of a method."""
    if method not in METHODS:
        raise ParameterError("unknown method %r (expected basic, addition or contraction)" % (method,))
    if method == "addition":
        k = DEFAULTS["k"] if k is None else int(k)
        if k < 0:
            raise ParameterError("k must be non-negative")
        return {"k": k}
    if method == "contraction":
        k1 = DEFAULTS["k1"] if k1 is None else int(k1)
        k2 = DEFAULTS["k2"] if k2 is None else int(k2)
        if k1 < 1 or k2 < 1:
            raise ParameterError("k1 and k2 must be at least 1")
        return {"k1": k1, "k2": k2}
    return {}


# -- one Kraus operator, three ways --------------------------------------------


class _Basic:
    def __init__(self, engine, circuit, params, reuse):
        self.engine = engine
        self.net = circuit_to_network(circuit)
        tensors = [t.tdd(engine) for t in self.net.tensors]
        self.op = contract_tensors(engine, tensors, set(self.net.inputs) | set(self.net.outputs))

    def apply(self, state):
        return apply_operator(self.engine, self.op, self.net, state)


class _Addition:
    def __init__(self, engine, circuit, params, reuse):
        e = self.engine = engine
        net, plan = addition_plans(circuit, params["k"])
        self.net, self.plan = net, plan
        sliced = set(plan.labels)
        keep = (set(net.inputs) | set(net.outputs)) - sliced
        self.parts = []
        for assign in plan.assignments():
            tensors = []
            for t in net.tensors:
                tdd = t.tdd(e)
                for l in t.labels:
                    if l in assign:
                        tdd = e.slice(tdd, l, assign[l])
                tensors.append(tdd)
            self.parts.append((assign, contract_tensors(e, tensors, keep)))

    def apply(self, state):
        e, net = self.engine, self.net
        ins = set(net.inputs)
        outs = set(net.outputs)
        psi = e.relabel(state, {state_label(q): net.inputs[q] for q in range(net.n)})
        total = None
        for assign, part in self.parts:
            p = psi
            for l, c in assign.items():
                if l in ins:
                    p = e.slice(p, l, c)
            out = e.contract_over(p, part, (ins - outs) - set(assign))
            for l, c in assign.items():
                if l in outs:
                    out = e.contract_over(out, e.basis_state([l], [c]), ())
            total = out if total is None else e.add(total, out)
        return e.relabel(total, {net.outputs[q]: state_label(q) for q in range(net.n)})


class _Contraction:
    def __init__(self, engine, circuit, params, reuse):
        self.engine = engine
        self.circuit = circuit
        self.net = net = circuit_to_network(circuit)
        self.plan = plan_contraction(circuit, params["k1"], params["k2"])
        self.members = list(self.plan.members())
        # labels each member exposes to the rest of the network
        uses = Counter()
        for m in self.members:
            for l in {l for t in m.gates for l in net.tensors[t].labels}:
                uses[l] += 1
        boundary = set(net.inputs) | set(net.outputs)
        self.member_labels = []
        for m in self.members:
            labels = {l for t in m.gates for l in net.tensors[t].labels}
            self.member_labels.append(tuple(l for l in labels if uses[l] > 1 or l in boundary))
        self.cache = {} if reuse else None

    def _member(self, i):
        if self.cache is not None and i in self.cache:
            return self.cache[i]
        e, net = self.engine, self.net
        m = self.members[i]
        tensors = [net.tensors[t].tdd(e) for t in m.gates]
        block = tensors[0] if len(tensors) == 1 else contract_tensors(e, tensors, set(self.member_labels[i]))
        if self.cache is not None:
            self.cache[i] = block
        return block

    def apply(self, state):
        e, net = self.engine, self.net
        keep = set(net.outputs)
        remaining = Counter(l for labels in self.member_labels for l in labels)
        acc = e.relabel(state, {state_label(q): net.inputs[q] for q in range(net.n)})
        for i, labels in enumerate(self.member_labels):
            for l in labels:
                remaining[l] -= 1
            block = self._member(i)
            summed = {l for l in set(acc.indices) | set(block.indices) if not remaining[l] and l not in keep}
            acc = e.contract_over(acc, block, summed)
            del block
        dead = [l for l in acc.indices if l not in keep]
        if dead:
            acc = e.contract_over(acc, e.constant(1), dead)
        return e.relabel(acc, {net.outputs[q]: state_label(q) for q in range(net.n)})


_APPLIERS = {"basic": _Basic, "addition": _Addition, "contraction": _Contraction}


def _check_deadline(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise ComputationTimeout("time budget exceeded")


def _image_into(system, S, target, method, params, deadline):
    if S.n != system.n:
        raise ShapeError("subspace on %d qubits, system on %d" % (S.n, system.n))
    engine = S.engine
    full = 2 ** S.n
    counts = {s: 0 for s in system.symbols}
    acc = target
    if S.dim == 0:
        return acc, counts
    for symbol, _, circuit in system.kraus_operators():
        if acc.dim == full:
            break
        _check_deadline(deadline)
        applier = _APPLIERS[method](engine, circuit, params, reuse=S.dim > 1)
        for v in S.basis:
            _check_deadline(deadline)
            before = acc.dim
            acc = join_states(acc, [applier.apply(v)])
            counts[symbol] += acc.dim - before
            if acc.dim == full:
                break
        del applier
    return acc, counts


def _run(engine, deadline, fn):
    old = engine.deadline
    engine.deadline = deadline
    try:
        return fn()
    finally:
        engine.deadline = old


def image(system, S, method="basic", k=None, k1=None, k2=None, timeout=None, track_sizes=False):
    """``T(S)`` by the chosen method, with timing and node statistics.

    ``timeout`` (seconds) raises :class:`ComputationTimeout` when exceeded.
    """
    params = method_params(method, k, k1, k2)
    engine = S.engine
    deadline = None if timeout is None else time.monotonic() + timeout
    engine.reset_stats()
    old_track = engine.track_tdd_size
    engine.track_tdd_size = track_sizes
    start = time.perf_counter()
    try:
        sub, counts = _run(engine, deadline, lambda: _image_into(system, S, Subspace.zero(engine, S.n), method, params, deadline))
    finally:
        engine.track_tdd_size = old_track
    elapsed = time.perf_counter() - start
    return ImageResult(sub, elapsed, max(engine.peak_nodes, 1), method, params, counts, engine.max_tdd_nodes)


def basic_image(system, S, **kw):
    return image(system, S, "basic", **kw)


def addition_image(system, S, k=1, **kw):
    return image(system, S, "addition", k=k, **kw)


def contraction_image(system, S, k1=4, k2=4, **kw):
    return image(system, S, "contraction", k1=k1, k2=k2, **kw)


def reachable(system, method="basic", max_iters=100, S0=None, engine=None, k=None, k1=None, k2=None,
              timeout=None):
    """Least fixpoint of ``S -> S v T(S)`` from ``S0`` (the system's initial
    space by default).

    Only the vectors added in the previous round are pushed through ``T``,
    which is enough because ``T`` distributes over joins.  Hitting
    ``max_iters`` is reported through ``converged=False``.
    """
    if max_iters < 1:
        raise ParameterError("max_iters must be at least 1")
    params = method_params(method, k, k1, k2)
    if S0 is None:
        engine = engine if engine is not None else TddEngine()
        S0 = initial_subspace(system, engine)
    engine = S0.engine
    deadline = None if timeout is None else time.monotonic() + timeout
    engine.reset_stats()
    start = time.perf_counter()
    full = 2 ** system.n

    def loop():
        S = S0
        frontier = S0
        dims = [S0.dim]
        for it in range(1, max_iters + 1):
            nxt, _ = _image_into(system, frontier, S, method, params, deadline)
            dims.append(nxt.dim)
            # nxt contains S, so equal dimension means equal subspace
            if nxt.dim == S.dim or nxt.dim == full:
                return nxt, it, True, dims
            # only the basis of the frontier is read
            frontier = Subspace(engine, system.n, nxt.basis[S.dim:], None)
            S = nxt
        return S, max_iters, False, dims

    S, iterations, converged, dims = _run(engine, deadline, loop)
    return ReachResult(S, iterations, converged, dims, time.perf_counter() - start, max(engine.peak_nodes, 1))

