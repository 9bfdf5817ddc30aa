"""Reading and writing the line-oriented ``.qts`` transition-system format.

::

    # comments run to end of line
    qubits 3
    symbol s1
      gate h 0
      gate cp 0 1 0.78539816339744828
      proj 1 2 01
      op 2x2 0  1 0 0 -1        # RxC, then log2(R) qubits, then R*C entries
      scale 0.5                 # multiplies the preceding element
      kraus                     # starts another Kraus operator of s1
      gate x 0
    init
      ket 0+-
      vec 1 0 0 0 0 0 0 0.5+0.5i

A symbol block holds one Kraus operator unless ``kraus`` lines open several;
a ``kraus`` line followed by no element is the identity.
Without an ``init`` block the initial space is ``span{|0...0>}``.  Reals are
written with 17 significant digits, so a serialized system parses back to an
identical one.
"""
import math

import numpy as np

from .circuit import GATE_ARITY, Circuit, Gate, QuantumTransitionSystem
from .exceptions import ParseError, ShapeError


def _real(x):
    return format(float(x), ".17g")


def format_complex(z):
    z = complex(z)
    if z.imag == 0:
        return _real(z.real)
    return "%s%si" % (_real(z.real), format(z.imag, "+.17g"))


def parse_complex(token):
    t = token.strip().replace("I", "i")
    if t.endswith("i"):
        body = t[:-1]
        if body in ("", "+", "-"):
            body += "1"
        # a bare imaginary part such as "0.5i" or "-2e-3i"
        try:
            return complex(body + "j")
        except ValueError:
            pass
        raise ValueError(token)
    return complex(float(t))


def _ints(tokens, lineno, n):
    try:
        qs = [int(t) for t in tokens]
    except ValueError:
        raise ParseError("expected qubit indices, got %s" % " ".join(tokens), lineno) from None
    for q in qs:
        if not 0 <= q < n:
            raise ParseError("qubit %d out of range for %d qubits" % (q, n), lineno)
    return qs


def parse_transition_system(text, name=""):
    """Parse ``.qts`` text into a :class:`QuantumTransitionSystem`."""
    n = None
    symbols = []
    operations = {}
    init = []
    section = None
    current = None
    last_element = None
    symbol_line = {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head, args = tokens[0].lower(), tokens[1:]

        if head == "qubits":
            if n is not None:
                raise ParseError("duplicate qubits line", lineno)
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise ParseError("qubits needs a positive integer", lineno)
            n = int(args[0])
            continue
        if n is None:
            raise ParseError("the first statement must be 'qubits N'", lineno)

        if head == "symbol":
            if len(args) != 1:
                raise ParseError("symbol needs exactly one name", lineno)
            sym = args[0]
            if sym in operations:
                raise ParseError("duplicate symbol %r" % sym, lineno)
            symbols.append(sym)
            current = None
            operations[sym] = []
            symbol_line[sym] = lineno
            section = "symbol"
            last_element = None
        elif head == "kraus":
            if section != "symbol":
                raise ParseError("kraus outside a symbol block", lineno)
            sym = symbols[-1]
            current = Circuit(n, name="%s[%d]" % (sym, len(operations[sym])))
            operations[sym].append(current)
            last_element = None
        elif head in ("gate", "proj", "op"):
            if section != "symbol":
                raise ParseError("%s outside a symbol block" % head, lineno)
            last_element = _parse_element(head, args, lineno, n)
            if current is None:
                sym = symbols[-1]
                current = Circuit(n, name="%s[0]" % sym)
                operations[sym].append(current)
            current.append(last_element)
        elif head == "scale":
            if last_element is None:
                raise ParseError("scale must follow a gate, proj or op line", lineno)
            if len(args) != 1:
                raise ParseError("scale needs one number", lineno)
            try:
                last_element.scale = complex(last_element.scale) * parse_complex(args[0])
            except ValueError:
                raise ParseError("bad scale %r" % args[0], lineno) from None
        elif head == "init":
            section = "init"
            last_element = None
        elif head in ("ket", "vec"):
            if section != "init":
                raise ParseError("%s outside the init block" % head, lineno)
            if head == "ket":
                if len(args) != 1 or len(args[0]) != n or set(args[0]) - set("01+-"):
                    raise ParseError("ket needs one token of %d chars from 0,1,+,-" % n, lineno)
                init.append(args[0])
            else:
                if len(args) != 2 ** n:
                    raise ParseError("vec needs %d entries, got %d" % (2 ** n, len(args)), lineno)
                try:
                    init.append(np.array([parse_complex(a) for a in args], dtype=complex))
                except ValueError:
                    raise ParseError("bad complex entry in vec", lineno) from None
        else:
            raise ParseError("unknown statement %r" % tokens[0], lineno)

    if n is None:
        raise ParseError("missing 'qubits N' line")
    if not symbols:
        raise ParseError("no symbol block")
    for sym in symbols:
        if not operations[sym]:
            raise ParseError("empty symbol block %r" % sym, symbol_line[sym])
    if not init:
        init = ["0" * n]
    try:
        return QuantumTransitionSystem(n, init, symbols, operations, name=name)
    except ShapeError as exc:
        raise ParseError(str(exc)) from None


def _parse_element(head, args, lineno, n):
    try:
        if head == "gate":
            if not args:
                raise ParseError("gate needs a name", lineno)
            gname = args[0].lower()
            if gname not in GATE_ARITY:
                raise ParseError("unknown gate %r" % args[0], lineno)
            arity, nparams = GATE_ARITY[gname]
            rest = args[1:]
            if nparams:
                if len(rest) < nparams + 1:
                    raise ParseError("%s needs qubits and %d angle(s)" % (gname, nparams), lineno)
                qtoks, ptoks = rest[:-nparams], rest[-nparams:]
            else:
                qtoks, ptoks = rest, []
            qubits = _ints(qtoks, lineno, n)
            try:
                params = [float(p) for p in ptoks]
            except ValueError:
                raise ParseError("bad angle in %s" % " ".join(args), lineno) from None
            return Gate(gname, qubits, params)
        if head == "proj":
            if len(args) < 2:
                raise ParseError("proj needs qubits and a bitstring", lineno)
            qubits = _ints(args[:-1], lineno, n)
            return Gate("proj", qubits, bits=args[-1])
        # op RxC q... entries
        if not args:
            raise ParseError("op needs a shape", lineno)
        shape = args[0].lower().replace("×", "x").split("x")
        if len(shape) != 2 or not all(s.isdigit() for s in shape):
            raise ParseError("bad op shape %r" % args[0], lineno)
        rows, cols = int(shape[0]), int(shape[1])
        k = int(round(math.log2(rows))) if rows > 0 else -1
        if rows != cols or k < 1 or 2 ** k != rows:
            raise ParseError("op must be 2^k x 2^k, got %dx%d" % (rows, cols), lineno)
        qubits = _ints(args[1:1 + k], lineno, n)
        entries = args[1 + k:]
        if len(entries) != rows * cols:
            raise ParseError("op %dx%d needs %d entries, got %d" % (rows, cols, rows * cols, len(entries)), lineno)
        try:
            m = np.array([parse_complex(e) for e in entries], dtype=complex).reshape(rows, cols)
        except ValueError:
            raise ParseError("bad complex entry in op", lineno) from None
        return Gate("op", qubits, matrix=m)
    except ShapeError as exc:
        raise ParseError(str(exc), lineno) from None


def serialize(system):
    """Text of ``system`` in ``.qts`` format."""
    out = []
    if system.name:
        out.append("# %s" % system.name)
    out.append("qubits %d" % system.n)
    for sym in system.symbols:
        out.append("symbol %s" % sym)
        ops = system.operations[sym]
        marked = len(ops) > 1 or not ops[0].gates
        for op in ops:
            if marked:
                out.append("  kraus")
            for g in op.gates:
                out.append("  " + _format_element(g))
                if complex(g.scale) != 1:
                    out.append("  scale %s" % format_complex(g.scale))
    out.append("init")
    for state in system.init:
        if isinstance(state, str):
            out.append("  ket %s" % state)
        else:
            out.append("  vec " + " ".join(format_complex(z) for z in state))
    return "\n".join(out) + "\n"


def _format_element(g):
    qs = " ".join(str(q) for q in g.qubits)
    if g.kind == "proj":
        return "proj %s %s" % (qs, g.bits)
    if g.kind == "op":
        d = g.matrix.shape[0]
        return "op %dx%d %s %s" % (d, d, qs, " ".join(format_complex(z) for z in g.matrix.reshape(-1)))
    params = "".join(" " + _real(p) for p in g.params)
    return "gate %s %s%s" % (g.kind, qs, params)


def load(path):
    with open(path) as fh:
        return parse_transition_system(fh.read(), name=str(path))


def dump(system, path):
    with open(path, "w") as fh:
        fh.write(serialize(system))
