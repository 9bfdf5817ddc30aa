"""Tensor decision diagrams (TDDs) over binary indices.

A TDD is a reduced, ordered, edge-weighted decision diagram.  Every internal
node tests one index; the low edge carries index value 0 and the high edge
value 1.  The value of the tensor at a full assignment is the product of the
weights met on the path selected by the assignment, including the weight on
the incoming root edge.  Indices that a path skips contribute a factor 1.

Canonical form
--------------
* The two outgoing weights of a node are divided by the one with the larger
  magnitude (ties go to the low edge), so the pivot weight is exactly 1 and
  the factor is pushed onto the incoming edge.
* A zero sub-tensor is the terminal reached with weight exactly 0.  An edge
  therefore has weight 0 iff its sub-tensor vanishes.
* Nodes whose two edges are equal are elided.
* Nodes are hash-consed in a unique table keyed on weights quantised to
  buckets of width ``1e-10``.  Arithmetic itself is not quantised.

All nodes live in a :class:`TddEngine`, which also owns the global index
order.  Index labels are strings.  Labels of the form ``x<i>``, ``q<i>`` and
``q<i>^<j>`` get built-in order keys (columns, then states, then circuit wires
ordered by qubit and position); other labels are ordered by first use or by
:meth:`TddEngine.declare`.

References
==========

Xin Hong, Xiangzhen Zhou, Sanjiang Li, Yuan Feng, Mingsheng Ying
    "A tensor network based decision diagram for representation of quantum
    circuits", ACM TODAES 27(6), 2022
"""
import bisect
import itertools
import math
import re
import sys
import time
import weakref

import numpy as np

from .exceptions import CapacityError, ComputationTimeout, OrderError, ShapeError

TOL = 1e-10
DENSE_RANK_CAP = 22

_SCALE = 1.0 / TOL
_TERMINAL_KEY = (math.inf,)
_LABEL_PATTERNS = (
    (re.compile(r"^x(\d+)$"), lambda m: (0, int(m.group(1)))),
    (re.compile(r"^q(\d+)$"), lambda m: (1, int(m.group(1)))),
    (re.compile(r"^q(\d+)\^(\d+)$"), lambda m: (2, int(m.group(1)), int(m.group(2)))),
)

if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


def weight_key(w):
    """Quantised key of a complex weight, used for hashing and equality."""
    return (round(w.real * _SCALE), round(w.imag * _SCALE))


class Node:
    __slots__ = ("uid", "var", "key", "lw", "low", "hw", "high", "__weakref__")

    def __init__(self, uid, var, key, lw, low, hw, high):
        self.uid = uid
        self.var = var
        self.key = key
        self.lw = lw
        self.low = low
        self.hw = hw
        self.high = high

    @property
    def is_terminal(self):
        return self.var is None

    def __repr__(self):
        if self.var is None:
            return "<terminal>"
        return "<Node %d %s>" % (self.uid, self.var)


TERMINAL = Node(0, None, _TERMINAL_KEY, 0j, None, 0j, None)
ZERO_EDGE = (0j, TERMINAL)


class Tdd:
    """Root edge plus index set of a tensor stored in a :class:`TddEngine`.

    Values are immutable.  Equality is canonical equality: same root node,
    same index set and root weights equal up to the engine tolerance.
    """

    __slots__ = ("weight", "node", "indices", "engine")

    def __init__(self, weight, node, indices, engine):
        self.weight = complex(weight)
        self.node = node
        self.indices = tuple(indices)
        self.engine = engine

    @property
    def edge(self):
        return (self.weight, self.node)

    @property
    def rank(self):
        return len(self.indices)

    @property
    def is_zero(self):
        return self.weight == 0

    def __add__(self, other):
        return self.engine.add(self, other)

    def __sub__(self, other):
        return self.engine.add(self, self.engine.scalar_mul(-1, other))

    def __neg__(self):
        return self.engine.scalar_mul(-1, self)

    def __mul__(self, c):
        if isinstance(c, Tdd):
            return NotImplemented
        return self.engine.scalar_mul(c, self)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Tdd):
            return NotImplemented
        if self.node is not other.node or set(self.indices) != set(other.indices):
            return False
        wa, wb = self.weight, other.weight
        return abs(wa - wb) <= TOL * max(abs(wa), abs(wb)) or (wa == 0 and wb == 0)

    def __hash__(self):
        return hash((self.node.uid, frozenset(self.indices)))

    def __repr__(self):
        return "Tdd(weight=%r, node=%r, indices=%r)" % (self.weight, self.node, self.indices)

    def node_count(self):
        return self.engine.node_count(self)

    def evaluate(self, assignment):
        return self.engine.evaluate(self, assignment)

    def to_dense(self):
        return self.engine.to_dense(self)


class TddEngine:
    """Unique table, index order and operations for a family of TDDs.

    The unique table holds nodes weakly, so ``current_nodes`` is the number of
    nodes still reachable from live Python objects.  ``peak_nodes`` is the
    largest value of ``current_nodes`` sampled after each top-level operation
    since the last :meth:`reset_stats`.  Memo tables are local to one
    top-level call.

    An engine is single-writer.  Set ``deadline`` (a ``time.monotonic()``
    value) to abort long operations with :class:`ComputationTimeout`.
    """

    def __init__(self):
        self._unique = weakref.WeakValueDictionary()
        self._uids = itertools.count(1)
        self._keys = {}
        self._extra = itertools.count()
        self.deadline = None
        self._tick = 0
        self.peak_nodes = 0
        self.max_tdd_nodes = 0
        self.track_tdd_size = False

    # -- index order -------------------------------------------------------

    def key(self, label):
        k = self._keys.get(label)
        if k is None:
            if not isinstance(label, str):
                raise ShapeError("index labels must be strings, got %r" % (label,))
            for pattern, make in _LABEL_PATTERNS:
                m = pattern.match(label)
                if m:
                    k = make(m)
                    break
            else:
                k = (3, next(self._extra))
            self._keys[label] = k
        return k

    def declare(self, *labels):
        """Fix the relative order of user labels (earlier comes first)."""
        for label in labels:
            self.key(label)

    def sort_labels(self, labels):
        return tuple(sorted(labels, key=self.key))

    # -- statistics --------------------------------------------------------

    @property
    def current_nodes(self):
        return len(self._unique)

    @property
    def stats(self):
        return (self.current_nodes, self.peak_nodes)

    def reset_stats(self):
        self.peak_nodes = self.current_nodes
        self.max_tdd_nodes = 0

    def clear_caches(self):
        """Memo tables are per call; only statistics are reset."""
        self.reset_stats()

    def _sample(self, result=None):
        cur = len(self._unique)
        if cur > self.peak_nodes:
            self.peak_nodes = cur
        if self.track_tdd_size and result is not None:
            size = self.node_count(result)
            if size > self.max_tdd_nodes:
                self.max_tdd_nodes = size
        return result

    def _check_deadline(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise ComputationTimeout("engine deadline exceeded")

    # -- node construction -------------------------------------------------

    def _node(self, var, key, e0, e1):
        lw, low = e0
        hw, high = e1
        self._tick += 1
        if not self._tick & 0x3FF and self.deadline is not None:
            self._check_deadline()
        if lw == 0:
            if hw == 0:
                return ZERO_EDGE
            pivot = hw
            lw = 0j
            hw = 1 + 0j
        elif hw == 0:
            pivot = lw
            lw = 1 + 0j
            hw = 0j
        else:
            al, ah = abs(lw), abs(hw)
            if ah > al + TOL * ah:
                pivot = hw
                lw = lw / hw
                hw = 1 + 0j
                if abs(lw.real) < 0.5 * TOL and abs(lw.imag) < 0.5 * TOL:
                    lw = 0j
                    low = TERMINAL
            else:
                pivot = lw
                hw = hw / lw
                lw = 1 + 0j
                if abs(hw.real) < 0.5 * TOL and abs(hw.imag) < 0.5 * TOL:
                    hw = 0j
                    high = TERMINAL
        lq = weight_key(lw)
        hq = weight_key(hw)
        if low is high and lq == hq:
            return (pivot, low)
        ukey = (var, lq, low.uid, hq, high.uid)
        node = self._unique.get(ukey)
        if node is None:
            node = Node(next(self._uids), var, key, lw, low, hw, high)
            self._unique[ukey] = node
        return (pivot, node)

    def make_node(self, index, low, high):
        """Canonical edge for a node on ``index`` with the given child edges.

        ``low`` and ``high`` are ``(weight, node)`` pairs.  Children must test
        indices strictly after ``index`` in the engine order.
        """
        key = self.key(index)
        for w, child in (low, high):
            if child.key <= key:
                raise OrderError(
                    "child index %r is not below %r in the index order" % (child.var, index)
                )
        e0 = (complex(low[0]), low[1]) if low[0] != 0 else ZERO_EDGE
        e1 = (complex(high[0]), high[1]) if high[0] != 0 else ZERO_EDGE
        edge = self._node(index, key, e0, e1)
        self._sample()
        return edge

    def tdd(self, edge, indices):
        """Wrap a root edge into a :class:`Tdd` over ``indices``."""
        return Tdd(edge[0], edge[1], self.sort_labels(indices), self)

    # -- constructors ------------------------------------------------------

    def zero(self, indices=()):
        return Tdd(0j, TERMINAL, self.sort_labels(indices), self)

    def constant(self, value, indices=()):
        value = complex(value)
        if value == 0:
            return self.zero(indices)
        return Tdd(value, TERMINAL, self.sort_labels(indices), self)

    def product_state(self, labels, factors):
        """Tensor product of one 2-vector per label."""
        if len(labels) != len(factors):
            raise ShapeError("need one factor per label")
        pairs = sorted(zip(labels, factors), key=lambda p: self.key(p[0]))
        edge = (1 + 0j, TERMINAL)
        for label, (a, b) in reversed(pairs):
            w, n = edge
            e0 = (a * w, n) if a != 0 else ZERO_EDGE
            e1 = (b * w, n) if b != 0 else ZERO_EDGE
            edge = self._node(label, self.key(label), e0, e1)
        self._sample()
        return Tdd(edge[0], edge[1], [p[0] for p in pairs], self)

    def basis_state(self, labels, bits):
        return self.product_state(labels, [((1, 0) if int(b) == 0 else (0, 1)) for b in bits])

    def from_dense(self, entries, indices):
        """Build the canonical TDD of a dense array.

        ``entries`` is flat (length ``2**len(indices)``) or shaped
        ``(2,)*len(indices)``; axis ``i`` belongs to ``indices[i]``.
        """
        indices = list(indices)
        if len(set(indices)) != len(indices):
            raise ShapeError("duplicate index labels")
        arr = np.asarray(entries, dtype=complex)
        r = len(indices)
        if arr.size != 2 ** r:
            raise ShapeError("array of %d entries does not match %d indices" % (arr.size, r))
        arr = arr.reshape((2,) * r)
        order = sorted(range(r), key=lambda i: self.key(indices[i]))
        arr = np.transpose(arr, order) if r else arr
        labels = [indices[i] for i in order]
        keys = [self.key(l) for l in labels]

        def build(sub, pos):
            if pos == r:
                v = complex(sub)
                return (v, TERMINAL) if v != 0 else ZERO_EDGE
            if not sub.any():
                return ZERO_EDGE
            return self._node(labels[pos], keys[pos], build(sub[0], pos + 1), build(sub[1], pos + 1))

        edge = build(arr, 0)
        return self._sample(Tdd(edge[0], edge[1], labels, self))

    # -- inspection --------------------------------------------------------

    def evaluate(self, a, assignment):
        missing = [x for x in a.indices if x not in assignment]
        if missing:
            raise ShapeError("assignment misses indices %s" % missing)
        w, n = a.weight, a.node
        while n is not TERMINAL and w != 0:
            if int(assignment[n.var]):
                w *= n.hw
                n = n.high
            else:
                w *= n.lw
                n = n.low
        return complex(w)

    def to_dense(self, a):
        """Entries in lexicographic order of ``a.indices`` (engine order)."""
        r = len(a.indices)
        if r > DENSE_RANK_CAP:
            raise CapacityError("rank %d exceeds the dense cap of %d" % (r, DENSE_RANK_CAP))
        keys = [self.key(x) for x in a.indices]
        memo = {}

        def dense(n, pos):
            mk = (n.uid, pos)
            got = memo.get(mk)
            if got is not None:
                return got
            if pos == r:
                out = np.ones((), dtype=complex)
            elif n.key > keys[pos]:
                sub = dense(n, pos + 1)
                out = np.stack([sub, sub])
            else:
                shape = (2,) * (r - pos - 1)
                lo = n.lw * dense(n.low, pos + 1) if n.lw != 0 else np.zeros(shape, complex)
                hi = n.hw * dense(n.high, pos + 1) if n.hw != 0 else np.zeros(shape, complex)
                out = np.stack([lo, hi])
            memo[mk] = out
            return out

        if a.weight == 0:
            return np.zeros(2 ** r, dtype=complex)
        return (a.weight * dense(a.node, 0)).reshape(-1)

    def nodes(self, a):
        seen = {}
        stack = [a.node]
        while stack:
            n = stack.pop()
            if n.uid in seen:
                continue
            seen[n.uid] = n
            if n is not TERMINAL:
                stack.append(n.low)
                stack.append(n.high)
        return list(seen.values())

    def node_count(self, a):
        """Number of nodes of ``a``, terminal included."""
        return len(self.nodes(a))

    def max_abs(self, a):
        """Largest entry magnitude of ``a`` without densifying."""
        memo = {}

        def walk(n):
            if n is TERMINAL:
                return 1.0
            got = memo.get(n.uid)
            if got is None:
                lo = abs(n.lw) * walk(n.low) if n.lw != 0 else 0.0
                hi = abs(n.hw) * walk(n.high) if n.hw != 0 else 0.0
                got = memo[n.uid] = max(lo, hi)
            return got

        if a.weight == 0:
            return 0.0
        return abs(a.weight) * walk(a.node)

    # -- arithmetic --------------------------------------------------------

    def _add(self, wa, na, wb, nb, memo):
        if wa == 0:
            return (wb, nb) if wb != 0 else ZERO_EDGE
        if wb == 0:
            return (wa, na)
        if na is nb:
            s = wa + wb
            if abs(s) <= TOL * max(abs(wa), abs(wb)):
                return ZERO_EDGE
            return (s, na)
        if na.uid > nb.uid:
            wa, na, wb, nb = wb, nb, wa, na
        ratio = wb / wa
        mk = (na.uid, nb.uid, weight_key(ratio))
        got = memo.get(mk)
        if got is None:
            ka, kb = na.key, nb.key
            if ka <= kb:
                var, key = na.var, ka
                a0w, a0, a1w, a1 = na.lw, na.low, na.hw, na.high
            else:
                var, key = nb.var, kb
                a0w, a0, a1w, a1 = 1, na, 1, na
            if kb == key:
                b0w, b0, b1w, b1 = nb.lw * ratio, nb.low, nb.hw * ratio, nb.high
            else:
                b0w, b0, b1w, b1 = ratio, nb, ratio, nb
            e0 = self._add(a0w, a0, b0w, b0, memo)
            e1 = self._add(a1w, a1, b1w, b1, memo)
            got = memo[mk] = self._node(var, key, e0, e1)
        if got[0] == 0:
            return ZERO_EDGE
        return (got[0] * wa, got[1])

    def add(self, a, b):
        """Entrywise sum of two TDDs over the same index set."""
        self._same_indices(a, b)
        w, n = self._add(a.weight, a.node, b.weight, b.node, {})
        return self._sample(Tdd(w, n, a.indices, self))

    def scalar_mul(self, c, a):
        c = complex(c)
        w = c * a.weight
        if w == 0:
            return Tdd(0j, TERMINAL, a.indices, self)
        return Tdd(w, a.node, a.indices, self)

    def _contract(self, na, nb, skeys, sset, memo, amemo):
        if na is TERMINAL and nb is TERMINAL:
            return (1 + 0j, TERMINAL)
        mk = (na.uid, nb.uid) if na.uid <= nb.uid else (nb.uid, na.uid)
        got = memo.get(mk)
        if got is not None:
            return got
        ka, kb = na.key, nb.key
        if ka <= kb:
            var, key = na.var, ka
            a0w, a0, a1w, a1 = na.lw, na.low, na.hw, na.high
        else:
            var, key = nb.var, kb
            a0w, a0, a1w, a1 = 1, na, 1, na
        if kb == key:
            b0w, b0, b1w, b1 = nb.lw, nb.low, nb.hw, nb.high
        else:
            b0w, b0, b1w, b1 = 1, nb, 1, nb
        lo_pos = bisect.bisect_right(skeys, key)

        def child(wa, ca, wb, cb):
            if wa == 0 or wb == 0:
                return ZERO_EDGE
            w, n = self._contract(ca, cb, skeys, sset, memo, amemo)
            if w == 0:
                return ZERO_EDGE
            top = ca.key if ca.key <= cb.key else cb.key
            skipped = bisect.bisect_left(skeys, top) - lo_pos
            w = wa * wb * w
            if skipped:
                w *= 2 ** skipped
            return (w, n)

        e0 = child(a0w, a0, b0w, b0)
        e1 = child(a1w, a1, b1w, b1)
        if key in sset:
            got = self._add(e0[0], e0[1], e1[0], e1[1], amemo)
        else:
            got = self._node(var, key, e0, e1)
        memo[mk] = got
        return got

    def contract_over(self, a, b, summed):
        """Multiply ``a`` and ``b`` entrywise on common indices and sum ``summed``.

        Indices shared by ``a`` and ``b`` that are not summed stay in the
        result (hyper-edges).  A summed index may belong to either operand.
        """
        summed = set(summed)
        union = set(a.indices) | set(b.indices)
        if not summed <= union:
            raise ShapeError("summed indices %s not present" % sorted(summed - union))
        skeys = sorted(self.key(x) for x in summed)
        sset = set(skeys)
        if a.weight == 0 or b.weight == 0:
            w, n = ZERO_EDGE
        else:
            w, n = self._contract(a.node, b.node, skeys, sset, {}, {})
            if w != 0:
                top = min(a.node.key, b.node.key)
                w = w * a.weight * b.weight * 2 ** bisect.bisect_left(skeys, top)
        return self._sample(Tdd(w, n, self.sort_labels(union - summed), self))

    def contract(self, a, b, shared=None):
        """Sum the product of ``a`` and ``b`` over ``shared``.

        ``shared`` defaults to all common indices.  An empty set gives the
        tensor product when the index sets are disjoint.
        """
        common = set(a.indices) & set(b.indices)
        shared = common if shared is None else set(shared)
        if not shared <= common:
            raise ShapeError("shared indices %s not in both operands" % sorted(shared - common))
        return self.contract_over(a, b, shared)

    def slice(self, a, x, c):
        """Fix index ``x`` to the bit ``c``."""
        if x not in a.indices:
            raise ShapeError("unknown index %r" % (x,))
        kx = self.key(x)
        c = int(c)
        memo = {}

        def walk(n):
            if n.key > kx:
                return (1 + 0j, n)
            if n.key == kx:
                return (n.hw, n.high) if c else (n.lw, n.low)
            got = memo.get(n.uid)
            if got is None:
                e0 = walk(n.low)
                e1 = walk(n.high)
                e0 = (n.lw * e0[0], e0[1]) if n.lw != 0 and e0[0] != 0 else ZERO_EDGE
                e1 = (n.hw * e1[0], e1[1]) if n.hw != 0 and e1[0] != 0 else ZERO_EDGE
                got = memo[n.uid] = self._node(n.var, n.key, e0, e1)
            return got

        rest = [y for y in a.indices if y != x]
        if a.weight == 0:
            return Tdd(0j, TERMINAL, rest, self)
        w, n = walk(a.node)
        w = w * a.weight
        if w == 0:
            n = TERMINAL
        return self._sample(Tdd(w, n, rest, self))

    def conjugate(self, a):
        memo = {}

        def walk(n):
            if n is TERMINAL:
                return (1 + 0j, n)
            got = memo.get(n.uid)
            if got is None:
                e0 = walk(n.low)
                e1 = walk(n.high)
                e0 = (n.lw.conjugate() * e0[0], e0[1]) if n.lw != 0 else ZERO_EDGE
                e1 = (n.hw.conjugate() * e1[0], e1[1]) if n.hw != 0 else ZERO_EDGE
                got = memo[n.uid] = self._node(n.var, n.key, e0, e1)
            return got

        w, n = walk(a.node)
        return self._sample(Tdd(w * a.weight.conjugate(), n, a.indices, self))

    def relabel(self, a, mapping):
        """Rename indices of ``a``; ``mapping`` must be injective on them."""
        mapping = {x: mapping.get(x, x) for x in a.indices}
        targets = list(mapping.values())
        if len(set(targets)) != len(targets):
            raise ShapeError("relabel is not a bijection on the index set")
        if all(k == v for k, v in mapping.items()):
            return a
        src = sorted(a.indices, key=self.key)
        dst_keys = [self.key(mapping[x]) for x in src]
        if all(dst_keys[i] < dst_keys[i + 1] for i in range(len(dst_keys) - 1)):
            return self._rename(a, mapping)
        return self._permute(a, mapping)

    def _rename(self, a, mapping):
        memo = {}

        def walk(n):
            if n is TERMINAL:
                return (1 + 0j, n)
            got = memo.get(n.uid)
            if got is None:
                e0 = walk(n.low)
                e1 = walk(n.high)
                e0 = (n.lw * e0[0], e0[1]) if n.lw != 0 else ZERO_EDGE
                e1 = (n.hw * e1[0], e1[1]) if n.hw != 0 else ZERO_EDGE
                var = mapping[n.var]
                got = memo[n.uid] = self._node(var, self.key(var), e0, e1)
            return got

        w, n = walk(a.node)
        return self._sample(Tdd(w * a.weight, n, [mapping[x] for x in a.indices], self))

    def _permute(self, a, mapping):
        # Order changes: rebuild as sum of |c>_x' (x) cofactor, bottom-up.
        memo = {}
        amemo = {}

        def walk(n):
            if n is TERMINAL:
                return (1 + 0j, n)
            got = memo.get(n.uid)
            if got is None:
                var = mapping[n.var]
                key = self.key(var)
                parts = []
                for bit, (w, child) in enumerate(((n.lw, n.low), (n.hw, n.high))):
                    if w == 0:
                        continue
                    cw, cn = walk(child)
                    sel = self._node(var, key, (1 + 0j, TERMINAL) if not bit else ZERO_EDGE,
                                     (1 + 0j, TERMINAL) if bit else ZERO_EDGE)
                    pw, pn = self._contract(sel[1], cn, [], set(), {}, amemo)
                    parts.append((w * cw * sel[0] * pw, pn))
                if not parts:
                    got = ZERO_EDGE
                elif len(parts) == 1:
                    got = parts[0]
                else:
                    got = self._add(parts[0][0], parts[0][1], parts[1][0], parts[1][1], amemo)
                memo[n.uid] = got
            return got

        w, n = walk(a.node)
        labels = self.sort_labels(mapping[x] for x in a.indices)
        return self._sample(Tdd(w * a.weight, n, labels, self))

    def adjoint(self, a, relabel=None):
        """Entrywise complex conjugate with indices renamed by ``relabel``."""
        out = self.conjugate(a)
        if relabel:
            out = self.relabel(out, relabel)
        return out

    def inner_product(self, a, b):
        """<a|b> for two states over the same indices."""
        self._same_indices(a, b)
        r = self.contract_over(self.conjugate(a), b, a.indices)
        return r.weight

    def norm(self, a):
        return math.sqrt(max(self.inner_product(a, a).real, 0.0))

    def _same_indices(self, a, b):
        if a.engine is not self or b.engine is not self:
            raise ShapeError("operands belong to another engine")
        if set(a.indices) != set(b.indices):
            raise ShapeError("index sets differ: %s vs %s" % (list(a.indices), list(b.indices)))
