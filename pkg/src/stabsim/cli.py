"""Command-line front end: ``stabsim trace|verify|ket|unitary|code|bench``."""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import oracle as _oracle
from .circuit import Circuit, CircuitError, format_records, format_trace, parse, run
from .codes import (CodeError, build_syndrome_table, distance, experiment, format_code, parse_code,
                    validate)
from .pauli import PauliError, PauliOperator, parse_pauli
from .tableau import InputKind, Tableau, TableauError

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2
_DOMAIN_ERRORS = (CircuitError, CodeError, PauliError, TableauError, _oracle.OracleError, OSError)
_KINDS = {"circuit": ("circuits", ".circ"), "code": ("codes", ".code"), "state": ("states", ".stab")}


@dataclass
class RunConfig:
    source: str
    text: str
    backend: str = "tableau"
    seed: int | None = None
    oracle_limit: int = _oracle.DEFAULT_LIMIT
    fmt: str = "text"
    verbose: bool = False


def bundled(kind: str) -> list[str]:
    sub, ext = _KINDS[kind]
    root = resources.files("stabsim") / "data" / sub
    return sorted(p.name[: -len(ext)] for p in root.iterdir() if p.name.endswith(ext))


def read_source(name: str, kind: str) -> str:
    """Read a file path, ``-`` for stdin, or a bundled name such as ``examples/fig1_swap``."""
    if name == "-":
        return sys.stdin.read()
    path = Path(name)
    if path.is_file():
        return path.read_text()
    sub, ext = _KINDS[kind]
    stem = path.name[: -len(ext)] if path.name.endswith(ext) else path.name
    res = resources.files("stabsim") / "data" / sub / (stem + ext)
    if res.is_file():
        return res.read_text()
    raise FileNotFoundError(f"no such file or bundled {kind}: {name!r} (bundled: {', '.join(bundled(kind))})")


def golden_trace(name: str) -> str:
    return (resources.files("stabsim") / "data" / "golden" / f"{Path(name).name}.trace").read_text()


def parse_state_file(text: str) -> list[PauliOperator]:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append(parse_pauli(line, rows[0].n if rows else None))
        except PauliError as exc:
            raise PauliError(f"line {lineno}: {exc}") from None
    if not rows:
        raise PauliError("no stabilizer rows")
    return rows


def _seed(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("STABSIM_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise CircuitError(f"STABSIM_SEED must be an integer, got {env!r}") from None
    return None


def _config(args) -> RunConfig:
    return RunConfig(args.circuit, read_source(args.circuit, "circuit"), getattr(args, "backend", "tableau"),
                     _seed(args), args.oracle_limit, getattr(args, "format", "text"), args.verbose)


# commands --------------------------------------------------------------
def cmd_trace(args) -> int:
    cfg = _config(args)
    trace = run(parse(cfg.text), cfg.backend, cfg.seed, oracle_limit=cfg.oracle_limit)
    sys.stdout.write(format_records(trace) if cfg.fmt == "records" else format_trace(trace))
    if cfg.backend == "both":
        fids = [f for f in trace.fidelities if f is not None]
        if any(abs(f - 1) > 1e-9 for f in fids) or not all(trace.stabilizer_checks):
            print("error: tableau and oracle disagree", file=sys.stderr)
            return EXIT_DOMAIN
    return EXIT_OK


def _haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def cmd_verify(args) -> int:
    cfg = _config(args)
    c = parse(cfg.text)
    seed = cfg.seed if cfg.seed is not None else 0
    rng = np.random.default_rng(seed)
    worst = 1.0
    ok = True
    for trial in range(args.trials):
        kw = {}
        if args.random_data:
            kw["data"] = _haar_vector(2 ** len(c.labels), rng)
        trace = run(c, "both", int(rng.integers(2**63)) if args.trials > 1 else seed,
                    oracle_limit=cfg.oracle_limit, check=True, **kw)
        fids = [f for f in trace.fidelities if f is not None]
        low = min(fids) if fids else 1.0
        worst = min(worst, low)
        good = abs(low - 1) <= args.tol and all(trace.stabilizer_checks) and trace.deterministic_agreement
        ok &= good
        if cfg.verbose or args.trials == 1:
            for b in trace.blocks:
                fid = "n/a" if b.fidelity is None else f"{b.fidelity:.12f}"
                print(f"trial {trial}: {b.label}: fidelity {fid}")
        if not good:
            print(f"trial {trial}: FAIL (min fidelity {low:.12f})", file=sys.stderr)
    print(f"{args.trials} trial(s), min fidelity {worst:.12f}: {'ok' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_DOMAIN


def cmd_ket(args) -> int:
    rows = parse_state_file(read_source(args.state, "state"))
    st = _oracle.stabilizer_to_state(rows, args.oracle_limit)
    sys.stdout.write(_oracle.format_amplitudes(st.amps))
    return EXIT_OK


def cmd_unitary(args) -> int:
    cfg = _config(args)
    c = parse(cfg.text)
    if c.n > cfg.oracle_limit:
        raise CircuitError(f"{c.n} qubits exceeds the oracle limit of {cfg.oracle_limit}")
    direct = _oracle.circuit_unitary(c.n, c.gate_list(), cfg.oracle_limit)
    if cfg.backend == "oracle":
        u = direct
    else:
        trace = run(c, "tableau", cfg.seed)
        u = _oracle.tableau_to_unitary(trace.tableau, cfg.oracle_limit)
        if cfg.backend == "both" and not _oracle.equal_up_to_phase(u, direct):
            print("error: tableau unitary differs from direct composition", file=sys.stderr)
            return EXIT_DOMAIN
    sys.stdout.write(_oracle.format_matrix(u))
    return EXIT_OK


def cmd_code(args) -> int:
    code = parse_code(read_source(args.code, "code"))
    if args.action == "validate":
        v = validate(code)
        for d in v.diagnostics:
            print(d, file=sys.stderr)
        print(f"{'ok' if v.ok else 'invalid'} n={code.n} k={v.k}")
        return EXIT_OK if v.ok else EXIT_DOMAIN
    v = validate(code)
    if not v.ok:
        raise CodeError("invalid code: " + "; ".join(v.diagnostics))
    if args.action == "distance":
        res = distance(code, args.max_weight, jobs=args.jobs)
        print(res)
        if cfg_verbose(args) and res.witness is not None:
            print(f"witness {res.witness}")
        return EXIT_OK
    if args.action == "syndrome-table":
        prof = build_syndrome_table(code, args.t, args.max_weight)
        print(f"n={prof.n} k={prof.k} d={prof.d} t={prof.t} entries={len(prof.syndrome_table)}")
        for s, e in sorted(prof.syndrome_table.items()):
            print("".join(map(str, s)), e)
        return EXIT_OK
    # experiment
    prof = build_syndrome_table(code, args.t, args.max_weight) if args.mode == "correct" else None
    errors = [parse_pauli(e, code.n) for e in args.error]
    ok = True
    for e in errors:
        rep = experiment(code, e, args.mode, prof, _seed(args))
        synd = "".join(map(str, rep.syndrome))
        line = f"error {e} syndrome {synd} detected={'yes' if rep.detected else 'no'}"
        if args.mode == "correct":
            line += f" correction {rep.correction} restored={'yes' if rep.restored else 'no'}"
            ok &= bool(rep.restored)
        print(line)
    return EXIT_OK if ok else EXIT_DOMAIN


def cfg_verbose(args) -> bool:
    return bool(getattr(args, "verbose", False))


def random_program(n: int, gates: int, rng: np.random.Generator, measure_rate: float = 0.01):
    """Random Clifford+measurement program as integer arrays (op, a, b)."""
    ops = rng.choice(4, size=gates, p=[(1 - measure_rate) * w for w in (0.3, 0.3, 0.4)] + [measure_rate])
    a = rng.integers(n, size=gates)
    b = (a + 1 + rng.integers(max(n - 1, 1), size=gates)) % n if n > 1 else a
    if n == 1:
        ops[ops == 2] = 0
    return ops, a, b


def run_program(t: Tableau, program, rng: np.random.Generator) -> None:
    ops, a, b = program
    for op, q, r in zip(ops.tolist(), a.tolist(), b.tolist()):
        if op == 0:
            t.r(q)
        elif op == 1:
            t.p(q)
        elif op == 2:
            t.cnot(q, r)
        else:
            t.measure(PauliOperator.single(t.n, q, "Z"), "random", rng)


def bench_one(n: int, gates: int, seed: int, measure_rate: float = 0.01) -> dict:
    rng = np.random.default_rng([seed, n])
    t = Tableau.init(n, [InputKind.FIXED_ZERO] * n)
    program = random_program(n, gates, rng, measure_rate)
    t0 = time.perf_counter()
    run_program(t, program, rng)
    dt = time.perf_counter() - t0
    return {"n": n, "gates": gates, "seconds": dt, "per_gate": dt / gates if gates else 0.0,
            "row_bits": 2 * n + 1, "memory_bytes": t.memory_bytes()}


def _bench_job(args):
    return bench_one(*args)


def cmd_bench(args) -> int:
    seed = _seed(args) or 0
    jobs = [(n, args.gates, seed, args.measure_rate) for n in args.n]
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_bench_job, jobs))
    else:
        rows = [bench_one(*j) for j in jobs]
    print(f"{'n':>6} {'gates':>8} {'seconds':>9} {'us/gate':>9} {'row bits':>9} {'bytes':>10}")
    for r in rows:
        print(f"{r['n']:>6} {r['gates']:>8} {r['seconds']:>9.3f} {1e6 * r['per_gate']:>9.3f} "
              f"{r['row_bits']:>9} {r['memory_bytes']:>10}")
    return EXIT_OK


# argument parsing ------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stabsim", description="Heisenberg-picture stabilizer circuit simulator")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, backend=True):
        if backend:
            p.add_argument("--backend", choices=("tableau", "oracle", "both"), default="tableau")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (falls back to STABSIM_SEED)")
        p.add_argument("--oracle-limit", type=int, default=_oracle.DEFAULT_LIMIT)

    p = sub.add_parser("trace", help="print the per-step tableau trace")
    p.add_argument("circuit")
    p.add_argument("--format", choices=("text", "records"), default="text")
    common(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("verify", help="cross-check tableau against the dense oracle")
    p.add_argument("circuit")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--random-data", action="store_true", help="draw a random input state per trial")
    p.add_argument("--tol", type=float, default=1e-9)
    common(p, backend=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ket", help="amplitudes of the state fixed by a stabilizer file")
    p.add_argument("state")
    p.add_argument("--oracle-limit", type=int, default=_oracle.DEFAULT_LIMIT)
    p.set_defaults(func=cmd_ket)

    p = sub.add_parser("unitary", help="matrix of a unitary Clifford circuit")
    p.add_argument("circuit")
    common(p)
    p.set_defaults(func=cmd_unitary)

    p = sub.add_parser("code", help="stabilizer code tools")
    p.add_argument("action", choices=("validate", "distance", "syndrome-table", "experiment"))
    p.add_argument("code")
    p.add_argument("--max-weight", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-t", type=int, default=1, help="correctable weight for the syndrome table")
    p.add_argument("--mode", choices=("detect", "correct"), default="detect")
    p.add_argument("--error", action="append", default=[], help="error Pauli (repeatable)")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_code)

    p = sub.add_parser("bench", help="time random Clifford circuits on the tableau")
    p.add_argument("--n", type=int, nargs="+", default=[100, 200, 400])
    p.add_argument("--gates", type=int, default=100_000)
    p.add_argument("--measure-rate", type=float, default=0.01)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.command == "code" and args.action == "experiment" and not args.error:
        ap.print_usage(sys.stderr)
        print("stabsim code experiment: at least one --error is required", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "oracle_limit", 1) < 1 or getattr(args, "trials", 1) < 1:
        print("stabsim: limits and trial counts must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _DOMAIN_ERRORS as exc:
        print(f"stabsim: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
