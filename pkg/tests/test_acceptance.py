"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import io
import itertools
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

from stabsim import oracle
from stabsim.circuit import format_trace, parse, run
from stabsim.cli import bench_one, golden_trace, main, read_source
from stabsim.codes import (build_syndrome_table, distance, experiment, five_qubit_code, four_qubit_code,
                           paulis_of_weight)
from stabsim.pauli import GeneratorSet, canonicalize
from stabsim.tableau import MeasureCase

import strategies

RESULTS: dict[int, str] = {}

FIGURES = ["fig1_swap", "fig2_cnot", "fig3_hittite", "fig4_xorswap", "fig5_bell", "fig6_pgate",
           "fig7_teleport", "fig8_remote_xor"]
HITTITE = 0.5 * np.array([[1, 1j, 1, 1j], [1, -1j, 1, -1j], [-1, 1j, 1, -1j], [1, 1j, -1, -1j]])


def record(num: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {num} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    RESULTS[num] = line
    print(line)
    assert ok, line


def test_criterion_1_golden_traces():
    circuits = {name: parse(read_source(name, "circuit")) for name in FIGURES}
    t0 = time.perf_counter()
    outputs = {name: format_trace(run(c, seed=0)) for name, c in circuits.items()}
    dt = time.perf_counter() - t0
    bad = [name for name in FIGURES if outputs[name] != golden_trace(name)]
    record(1, "golden traces", not bad and dt < 1.0,
           f"{len(FIGURES) - len(bad)}/{len(FIGURES)} byte-exact in {dt:.3f}s" + (f", mismatched {bad}" if bad else ""))


def test_criterion_2_hittite_unitary():
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(["unitary", "fig3_hittite"])
    u = np.zeros((4, 4), dtype=complex)
    for line in buf.getvalue().splitlines():
        r, c, re, im = line.split()
        u[int(r), int(c)] = float(re) + 1j * float(im)
    err = float(np.max(np.abs(u - HITTITE)))
    c = parse(read_source("fig3_hittite", "circuit"))
    direct = oracle.circuit_unitary(2, c.gate_list())
    k = np.argmax(np.abs(direct[:, 0]))
    phase = u[k, 0] / direct[k, 0]
    fids = [oracle.fidelity(u[:, j], direct[:, j]) for j in range(4)]
    same_phase = np.allclose(u, phase * direct, atol=1e-10)
    ok = code == 0 and err <= 1e-12 and min(fids) >= 1 - 1e-10 and same_phase
    record(2, "Hittite unitary", ok, f"max |U - U_expected| = {err:.1e}, min column fidelity {min(fids):.12f}, "
                                     f"single global phase {'yes' if same_phase else 'no'}")


def test_criterion_3_kets():
    s2 = 2**-0.5
    bell = oracle.stabilizer_to_state(GeneratorSet.from_strings(["XX", "ZZ"])).amps
    singlet = oracle.stabilizer_to_state(GeneratorSet.from_strings(["-XX", "-ZZ"])).amps
    e1 = float(np.max(np.abs(bell - [s2, 0, 0, s2])))
    e2 = float(np.max(np.abs(singlet - [0, s2, -s2, 0])))
    record(3, "ket extraction", max(e1, e2) <= 1e-12, f"Bell error {e1:.1e}, singlet error {e2:.1e}")


def test_criterion_4_codes():
    t0 = time.perf_counter()
    d5 = distance(five_qubit_code())
    d4 = distance(four_qubit_code())
    dt = time.perf_counter() - t0
    f = five_qubit_code()
    prof = build_syndrome_table(f, 1)
    bijective = len(prof.syndrome_table) == 16 and set(prof.syndrome_table) == set(itertools.product((0, 1), repeat=4))
    corrected = sum(bool(experiment(f, e, "correct", prof).restored) for e in paulis_of_weight(5, 1))
    enc = run(parse(read_source("four_qubit_encoder", "circuit"))).tableau
    enc_ok = canonicalize(enc.stabilizer) == canonicalize(GeneratorSet.from_strings(["XXXX", "ZZZZ"]))
    ok = ((d5.d, d5.degenerate, d4.d, d4.degenerate) == (3, False, 2, False) and bijective
          and corrected == 15 and enc_ok and dt < 5)
    record(4, "codes", ok, f"five-qubit {d5}, four-qubit {d4} ({dt:.3f}s); table bijective {bijective}; "
                           f"{corrected}/15 corrected; encoder group {'matches' if enc_ok else 'differs'}")


def test_criterion_5_oracle_equivalence():
    rng = np.random.default_rng(20240501)
    worst = 0.0
    det_bad = half_bad = stab_bad = 0
    plus = total = 0
    for i in range(500):
        n = int(rng.integers(1, 6))
        c = parse(strategies.random_circuit_text(rng, n, int(rng.integers(0, 41))))
        m = len(c.labels)
        if i % 2:
            kw = {"data": rng.normal(size=2**m) + 1j * rng.normal(size=2**m)}
        else:
            kw = {"assignment": [str(rng.choice(["+", "-"])) + str(rng.choice(["X", "Y", "Z"])) for _ in range(m)]}
        tr = run(c, "both", seed=int(rng.integers(2**63)), check=True, **kw)
        fids = [f for f in tr.fidelities if f is not None]
        worst = max([worst] + [abs(1 - f) for f in fids])
        stab_bad += not all(tr.stabilizer_checks)
        for case, p_plus, outcome in tr.oracle_checks:
            if case is MeasureCase.DETERMINISTIC:
                det_bad += abs(p_plus - (1.0 if outcome == 1 else 0.0)) > 1e-12
            elif case is MeasureCase.RANDOM_ANTICOMMUTING:
                half_bad += abs(p_plus - 0.5) > 1e-9
                plus += outcome == 1
                total += 1
    z = (plus - total / 2) / np.sqrt(total / 4) if total else 0.0
    ok = worst <= 1e-9 and det_bad == 0 and half_bad == 0 and stab_bad == 0 and abs(z) <= 5
    record(5, "oracle equivalence", ok,
           f"500 circuits, max |1 - fidelity| {worst:.1e}, deterministic mismatches {det_bad}, "
           f"non-fair oracle branches {half_bad}, stabilizer violations {stab_bad}, "
           f"{plus}/{total} random outcomes +1 (z = {z:+.2f})")


def test_criterion_6_teleportation():
    c = parse(read_source("fig7_teleport", "circuit"))
    rng = np.random.default_rng(7)
    worst = 1.0
    outcomes = set()
    for trial in range(100):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        tr = run(c, "both", seed=int(rng.integers(2**63)), data=v)
        worst = min(worst, oracle.fidelity(tr.state, v), *[f for f in tr.fidelities if f is not None])
        outcomes.add(tuple(r.outcome for r in tr.measurements))
    ok = worst >= 1 - 1e-9 and len(outcomes) == 4
    record(6, "teleportation", ok, f"100 trials, min output fidelity {worst:.12f}, "
                                   f"{len(outcomes)}/4 outcome pairs seen")


def test_criterion_7_scaling():
    big = bench_one(500, 100_000, seed=1)
    r100 = bench_one(100, 100_000, seed=1)
    r400 = bench_one(400, 100_000, seed=1)
    ratio = r400["per_gate"] / r100["per_gate"]
    bound = 2 * (2 * 500) * (2 * 500 + 2) // 8
    ok = big["seconds"] < 10 and ratio <= 8 and big["memory_bytes"] <= bound
    record(7, "scaling", ok, f"n=500 x 1e5 gates in {big['seconds']:.2f}s, per-gate ratio n=400/n=100 = "
                             f"{ratio:.2f}, tableau {big['memory_bytes']} bytes (bound {bound})")


PROPERTY_MODULES = ["test_pauli", "test_tableau", "test_oracle", "test_circuit", "test_codes"]


def test_criterion_8_property_suites():
    import importlib

    strategies.CASES["n"] = 0
    failures = []
    count = 0
    for mod_name in PROPERTY_MODULES:
        mod = importlib.import_module(mod_name)
        for name in sorted(dir(mod)):
            if name.startswith("test_prop_"):
                count += 1
                try:
                    getattr(mod, name)()
                except Exception as exc:  # report every failing suite, not just the first
                    failures.append(f"{mod_name}.{name}: {type(exc).__name__}")
    cases = strategies.CASES["n"]
    ok = not failures and cases >= 10_000
    record(8, "property suites", ok, f"{count} properties, {cases} randomized cases"
                                     + (f", failures {failures}" if failures else ""))


if __name__ == "__main__":
    import sys
    from pathlib import Path

    sys.path.insert(0, str(Path(__file__).parent))
    failed = 0
    for name, fn in sorted((k, v) for k, v in dict(globals()).items() if k.startswith("test_criterion_")):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
