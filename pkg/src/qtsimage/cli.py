"""Command-line interface: ``qtsimage gen|image|reach|bench|selftest``.

Exit codes: 0 success, 1 a self-test failed, 2 bad input, 3 time budget
exceeded.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import asdict, dataclass
from importlib import resources
import itertools
import json
import os
import sys
import time

import numpy as np

from .benchmarks import bitflip_system, gen_benchmark
from .exceptions import ComputationTimeout, QtsError
from .image import METHODS, image, method_params, reachable
from .oracle import compare_projectors, dense_image, random_instance
from .qtsfile import load, serialize
from .subspace import (Subspace, basis_decompose, equal_subspace, first_nonzero_column, initial_subspace,
                       ket_state, join)
from .tdd import TddEngine

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_TIMEOUT = 0, 1, 2, 3
DEFAULT_TIMEOUT = 3600
CSV_COLUMNS = ("benchmark", "n", "method", "params", "time_secs", "peak_nodes", "image_dim", "status")


class InputError(Exception):
    pass


@dataclass
class BenchRecord:
    benchmark: str
    n: int
    method: str
    params: str
    time_secs: float
    peak_nodes: int
    image_dim: int
    status: str


def _format_params(params):
    return ",".join("%s=%s" % kv for kv in sorted(params.items()))


def _emit(payload, path):
    text = json.dumps(payload, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _load_system(path):
    if not os.path.exists(path):
        raise InputError("no such file: %s" % path)
    return load(path)


def _benchmark_name(path):
    return os.path.splitext(os.path.basename(path))[0]


# -- gen -----------------------------------------------------------------------


def cmd_gen(args):
    extra = {}
    if args.p is not None:
        extra["p"] = args.p
    if args.secret is not None:
        extra["secret"] = args.secret
    system = gen_benchmark(args.family, args.n, **extra)
    text = serialize(system)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- image / reach ---------------------------------------------------------------


def _method_kwargs(args):
    return method_params(args.method, args.k, args.k1, args.k2)


def cmd_image(args):
    system = _load_system(args.system)
    params = _method_kwargs(args)
    engine = TddEngine()
    S = initial_subspace(system, engine)
    result = image(system, S, args.method, timeout=args.timeout_secs, **params)
    _emit({
        "benchmark": _benchmark_name(args.system),
        "n": system.n,
        "method": args.method,
        "params": params,
        "image_dim": result.dim,
        "time_secs": result.elapsed,
        "peak_nodes": result.peak_nodes,
        "converged": True,
        "iterations": 1,
    }, args.json)
    return EXIT_OK


def cmd_reach(args):
    system = _load_system(args.system)
    params = _method_kwargs(args)
    result = reachable(system, args.method, args.max_iters, timeout=args.timeout_secs, **params)
    _emit({
        "benchmark": _benchmark_name(args.system),
        "n": system.n,
        "method": args.method,
        "params": params,
        "image_dim": result.dim,
        "time_secs": result.elapsed,
        "peak_nodes": result.peak_nodes,
        "converged": result.converged,
        "iterations": result.iterations,
    }, args.json)
    return EXIT_OK


# -- bench ---------------------------------------------------------------------


def _int_range(text):
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_suite(tokens):
    """Expand suite entries ``family:ns:methods[:key=values,...]``.

    ``ns`` and parameter values accept ranges such as ``5-8`` or ``1,3``;
    parameters given as ranges form a grid.  A token naming a file is read
    as one entry per line.
    """
    jobs = []
    for token in tokens:
        if os.path.isfile(token):
            with open(token) as fh:
                lines = [l.split("#", 1)[0].strip() for l in fh]
            jobs.extend(parse_suite([l for l in lines if l]))
            continue
        parts = token.split(":")
        if len(parts) not in (3, 4):
            raise InputError("suite entry %r is not family:ns:methods[:params]" % token)
        try:
            family, ns, methods = parts[0], _int_range(parts[1]), parts[2].split(",")
            grid = {}
            if len(parts) == 4 and parts[3]:
                for kv in parts[3].split(","):
                    key, _, value = kv.partition("=")
                    if key in ("k", "k1", "k2"):
                        grid[key] = _int_range(value)
                    elif key == "p":
                        grid[key] = [float(value)]
                    elif key == "secret":
                        grid[key] = [value]
                    else:
                        raise InputError("unknown suite parameter %r" % key)
        except ValueError:
            raise InputError("cannot read suite entry %r" % token) from None
        for method in methods:
            if method not in METHODS:
                raise InputError("unknown method %r in suite" % method)
        keys = sorted(grid)
        for n in ns:
            for method in methods:
                for values in itertools.product(*(grid[k] for k in keys)):
                    jobs.append((family, n, method, dict(zip(keys, values))))
    return jobs


def run_bench_job(job, timeout):
    family, n, method, opts = job
    gen_opts = {k: v for k, v in opts.items() if k in ("p", "secret")}
    method_opts = {k: v for k, v in opts.items() if k in ("k", "k1", "k2")}
    params = method_params(method, **method_opts)
    system = gen_benchmark(family, n, **gen_opts)
    engine = TddEngine()
    start = time.perf_counter()
    try:
        S = initial_subspace(system, engine)
        r = image(system, S, method, timeout=timeout, **params)
        return BenchRecord(family, n, method, _format_params(params), r.elapsed, r.peak_nodes, r.dim, "ok")
    except ComputationTimeout:
        status = "timeout"
    except (QtsError, MemoryError, RecursionError):
        status = "error"
    return BenchRecord(family, n, method, _format_params(params), time.perf_counter() - start,
                       engine.peak_nodes, -1, status)


def cmd_bench(args):
    jobs = parse_suite(args.suite)
    for family, n, _, opts in jobs:
        # fail fast on bad suites before any long run
        gen_benchmark(family, n, **{k: v for k, v in opts.items() if k in ("p", "secret")})
    if args.parallel and args.parallel > 1:
        with ProcessPoolExecutor(args.parallel) as pool:
            records = list(pool.map(run_bench_job, jobs, itertools.repeat(args.timeout_secs)))
    else:
        records = [run_bench_job(job, args.timeout_secs) for job in jobs]
    rows = [asdict(r) for r in records]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            w.writeheader()
            w.writerows(rows)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    w = csv.DictWriter(sys.stdout, fieldnames=CSV_COLUMNS)
    w.writeheader()
    w.writerows(rows)
    return EXIT_OK


# -- selftest ------------------------------------------------------------------


def _fixture_matrix(fx):
    return np.array(fx["matrix"], dtype=complex) / fx.get("matrix_scale", 1)


def _projector_tdd(engine, matrix):
    """TDD over ``x`` (columns) then ``q`` (rows) of a ``[row, column]`` matrix."""
    n = int(round(np.log2(matrix.shape[0])))
    labels = ["x%d" % (i + 1) for i in range(n)] + ["q%d" % (i + 1) for i in range(n)]
    return engine.from_dense(matrix.T.reshape(-1), labels), n


def _dense_projector(vectors):
    v = np.atleast_2d(np.asarray(vectors, dtype=complex))
    return v.T @ v.conj()


def _check_fixture(fx):
    """Return ``None`` on success, else a failure message."""
    kind = fx["kind"]
    engine = TddEngine()
    if kind == "evaluate":
        P, n = _projector_tdd(engine, _fixture_matrix(fx))
        assignment = {"x%d" % (i + 1): int(b) for i, b in enumerate(fx["column"])}
        assignment.update({"q%d" % (i + 1): int(b) for i, b in enumerate(fx["row"])})
        got = P.evaluate(assignment)
        if abs(got - fx["expected"]) > 1e-12:
            return "entry is %s, expected %s" % (got, fx["expected"])
        if "root_weight" in fx and abs(P.weight - fx["root_weight"]) > 1e-12:
            return "root weight is %s, expected %s" % (P.weight, fx["root_weight"])
        return None
    if kind == "basis":
        P, n = _projector_tdd(engine, _fixture_matrix(fx))
        bits, _ = first_nonzero_column(P)
        if "".join(map(str, bits)) != fx["first_column"]:
            return "first column %s, expected %s" % (bits, fx["first_column"])
        S = basis_decompose(P, n)
        want = np.array(fx["expected_vectors"], dtype=complex)
        if S.dim != len(want):
            return "dimension %d, expected %d" % (S.dim, len(want))
        diff, ok = compare_projectors(_dense_projector(S.dense_basis()), _dense_projector(want), 1e-9)
        return None if ok else "basis spans differ by %.3g" % diff
    if kind == "join":
        n = len(fx["left"][0])
        a = Subspace.span(engine, n, [ket_state(engine, t) for t in fx["left"]])
        b = Subspace.span(engine, n, [ket_state(engine, t) for t in fx["right"]])
        J = join(a, b)
        v = J.dense_basis()[-1]
        want = np.array(fx["expected_vector"], dtype=complex)
        overlap = abs(np.vdot(want, v))
        if abs(overlap - 1) > 1e-9:
            return "new basis vector differs (overlap %.12f)" % overlap
        diff, ok = compare_projectors(J.dense_projector(), _fixture_matrix(fx), 1e-9)
        return None if ok else "projector differs by %.3g" % diff
    if kind == "image":
        parts = fx["system"].split()
        system = bitflip_system() if parts[0] == "bitflip" else gen_benchmark(parts[0], int(parts[1]))
        S = Subspace.span(engine, system.n, [ket_state(engine, t) for t in fx["init"]])
        want = Subspace.span(engine, system.n, [ket_state(engine, t) for t in fx["expected"]])
        for method in METHODS:
            got = image(system, S, method).subspace
            if not equal_subspace(got, want):
                return "%s image (dim %d) differs from the expected span (dim %d)" % (method, got.dim, want.dim)
        return None
    return "unknown fixture kind %r" % kind


def _random_case(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    kraus = int(rng.integers(1, 4))
    dim = int(rng.integers(1, min(4, 2 ** n) + 1))
    system, vectors = random_instance(seed, n, 20, kraus, dim)
    ref = dense_image(system, vectors)
    for method in METHODS:
        engine = TddEngine()
        S = initial_subspace(system, engine)
        got = image(system, S, method).subspace.dense_projector()
        diff, ok = compare_projectors(got, ref, 1e-8)
        if not ok:
            return "%s differs from the dense oracle by %.3g (n=%d)" % (method, diff, n)
    return None


def load_fixtures(path=None):
    if path is None:
        text = resources.files("qtsimage").joinpath("data/fixtures.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    try:
        return json.loads(text)["fixtures"]
    except (ValueError, KeyError) as exc:
        raise InputError("unreadable fixture file: %s" % exc) from None


def cmd_selftest(args):
    fixtures = load_fixtures(args.fixtures)
    cases = [("fixture " + fx.get("name", "?"), lambda fx=fx: _check_fixture(fx)) for fx in fixtures]
    cases += [("random seed %d" % s, lambda s=s: _random_case(s)) for s in range(args.seed, args.seed + args.count)]
    failed = 0
    for name, run in cases:
        try:
            msg = run()
        except (QtsError, KeyError, ValueError, TypeError) as exc:
            msg = "%s: %s" % (type(exc).__name__, exc)
        if msg is None:
            print("PASS  %s" % name)
        else:
            failed += 1
            print("FAIL  %s  %s" % (name, msg))
    print("%d passed, %d failed" % (len(cases) - failed, failed))
    return EXIT_FAIL if failed else EXIT_OK


# -- entry point ---------------------------------------------------------------


def _method_flags(p):
    p.add_argument("--method", choices=METHODS, default="basic")
    p.add_argument("--k", type=int, default=None, help="sliced indices for addition (default 1)")
    p.add_argument("--k1", type=int, default=None, help="qubits per band for contraction (default 4)")
    p.add_argument("--k2", type=int, default=None, help="cut gates per column for contraction (default 4)")
    p.add_argument("--timeout-secs", type=float, default=DEFAULT_TIMEOUT)
    p.add_argument("--json", metavar="PATH", help="also write the JSON report here")


def build_parser():
    parser = argparse.ArgumentParser(prog="qtsimage", description="Image computation for quantum transition systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a benchmark system as .qts")
    p.add_argument("family", choices=("ghz", "bv", "qft", "grover", "qrw"))
    p.add_argument("n", type=int)
    p.add_argument("--p", type=float, help="bit-flip probability (qrw)")
    p.add_argument("--secret", help="hidden bitstring (bv)")
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("image", help="image of the initial subspace")
    p.add_argument("system", metavar="SYSTEM.qts")
    _method_flags(p)
    p.set_defaults(func=cmd_image)

    p = sub.add_parser("reach", help="reachable subspace from the initial subspace")
    p.add_argument("system", metavar="SYSTEM.qts")
    _method_flags(p)
    p.add_argument("--max-iters", type=int, default=100)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("bench", help="run a benchmark suite")
    p.add_argument("suite", nargs="+", help="family:ns:methods[:params] entries or files of them")
    p.add_argument("--timeout-secs", type=float, default=DEFAULT_TIMEOUT)
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--json", metavar="PATH")
    p.add_argument("--parallel", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", help="worked-example fixtures and random oracle checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--fixtures", metavar="PATH", help="fixture file (default: the bundled one)")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "max_iters", 1) < 1:
        print("error: --max-iters must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ComputationTimeout as exc:
        print("timeout: %s" % exc, file=sys.stderr)
        return EXIT_TIMEOUT
    except (InputError, QtsError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
