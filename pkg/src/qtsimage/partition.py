"""Partition plans for the two divide-and-conquer image methods."""
from dataclasses import dataclass, field

from .circuit import circuit_to_network, index_graph, label_position
from .exceptions import ParameterError


@dataclass
class AdditionPlan:
    """Indices to slice; the network splits into ``2**k`` parts."""

    labels: list
    k: int

    @property
    def parts(self):
        return 2 ** self.k

    def assignments(self):
        """All bit assignments to ``labels`` in lexicographic order."""
        for m in range(self.parts):
            yield {l: (m >> (self.k - 1 - i)) & 1 for i, l in enumerate(self.labels)}


def _position(label):
    try:
        return label_position(label)
    except ValueError:
        return (float("inf"), label)


def plan_addition(net, k):
    """Pick the ``k`` indices of highest degree in the index graph, ties
    broken by qubit then position."""
    if k < 0:
        raise ParameterError("k must be non-negative")
    graph = index_graph(net)
    if k > len(graph.vertices):
        raise ParameterError("k=%d exceeds the %d indices of the network" % (k, len(graph.vertices)))
    deg = graph.degree
    ranked = sorted(graph.vertices, key=lambda v: (-deg[v], _position(v)))
    return AdditionPlan(ranked[:k], k)


@dataclass
class Member:
    """A tensor of the contraction grid: the gates of one ``(band, column)``
    block, or a single multi-qubit gate cut by a band boundary
    (``band is None``)."""

    column: int
    band: int
    gates: list = field(default_factory=list)

    @property
    def start(self):
        return self.gates[0]


@dataclass
class ContractionPlan:
    k1: int
    k2: int
    bands: list
    columns: list

    @property
    def n_columns(self):
        return len(self.columns)

    @property
    def n_blocks(self):
        return len(self.bands) * len(self.columns)

    def grid(self):
        """``{(band, column): gate indices}`` over the full grid."""
        out = {(b, c): [] for c in range(self.n_columns) for b in range(len(self.bands))}
        for c, members in enumerate(self.columns):
            for m in members:
                if m.band is not None:
                    out[(m.band, c)].extend(m.gates)
        return out

    def straddling(self):
        return [m for members in self.columns for m in members if m.band is None]

    def members(self):
        """Members column by column, each column in order of first gate."""
        for members in self.columns:
            yield from members


def plan_contraction(circuit, k1, k2):
    """Cut ``circuit`` into bands of ``k1`` qubits, and into columns so that
    no column holds more than ``k2`` gates crossing a band boundary.

    A vertical cut is placed right before the first crossing gate that would
    exceed ``k2``; every gate lies in exactly one member.
    """
    if k1 < 1 or k2 < 1:
        raise ParameterError("k1 and k2 must be at least 1")
    n = circuit.n
    bands = [list(range(s, min(s + k1, n))) for s in range(0, n, k1)]
    band_of = {q: q // k1 for q in range(n)}
    columns = [[]]
    cut_count = 0
    open_blocks = {}
    for t, g in enumerate(circuit.gates):
        touched = {band_of[q] for q in g.qubits}
        crossing = len(touched) > 1
        if crossing:
            if cut_count >= k2:
                columns.append([])
                open_blocks = {}
                cut_count = 0
            cut_count += 1
            columns[-1].append(Member(len(columns) - 1, None, [t]))
            continue
        (b,) = touched
        m = open_blocks.get(b)
        if m is None:
            m = open_blocks[b] = Member(len(columns) - 1, b, [])
            columns[-1].append(m)
        m.gates.append(t)
    for members in columns:
        members.sort(key=lambda m: m.start)
    if len(columns) > 1 and not columns[-1]:
        columns.pop()
    return ContractionPlan(k1, k2, bands, columns)


def addition_plans(circuit, k):
    """Network and addition plan of one Kraus circuit."""
    net = circuit_to_network(circuit)
    k = min(k, len(net.labels()))
    return net, plan_addition(net, k)
