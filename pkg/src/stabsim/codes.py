"""Stabilizer code toolkit: validation, distance, syndromes, correction runs."""

from __future__ import annotations

import itertools
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import _gf2
from .pauli import GeneratorSet, PauliError, PauliOperator, commutes, membership, parse_pauli, rank
from .tableau import Tableau

__all__ = [
    "CodeError",
    "StabilizerCode",
    "Validation",
    "DistanceResult",
    "CodeProfile",
    "ExperimentReport",
    "parse_code",
    "format_code",
    "validate",
    "syndrome",
    "distance",
    "complete_logicals",
    "build_syndrome_table",
    "experiment",
    "paulis_of_weight",
    "five_qubit_code",
    "four_qubit_code",
]

_ERROR_LETTERS = "XYZ"


class CodeError(ValueError):
    pass


@dataclass(frozen=True)
class StabilizerCode:
    n: int
    generators: GeneratorSet
    logicals: tuple[tuple[PauliOperator, PauliOperator], ...] = ()
    declared_k: int | None = None

    @property
    def k(self) -> int:
        return self.n - rank(self.generators)


def five_qubit_code() -> StabilizerCode:
    gens = GeneratorSet.from_strings(["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"])
    return StabilizerCode(5, gens, ((parse_pauli("XXXXX"), parse_pauli("ZZZZZ")),), 1)


def four_qubit_code() -> StabilizerCode:
    return StabilizerCode(4, GeneratorSet.from_strings(["XXXX", "ZZZZ"]), (), 2)


_HEADER = re.compile(r"^code(?:\s+n\s*=\s*(\d+))?(?:\s+k\s*=\s*(\d+))?\s*$", re.IGNORECASE)


def parse_code(text: str) -> StabilizerCode:
    """Read ``code n=.. k=..``, one generator per line, ``logical X|Z <pauli>`` lines."""
    n = k = None
    gens: list[PauliOperator] = []
    lx: list[PauliOperator] = []
    lz: list[PauliOperator] = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if not seen_header:
                m = _HEADER.match(line)
                if m is None:
                    raise CodeError("expected header 'code n=<N> k=<K>'")
                n = int(m.group(1)) if m.group(1) else None
                k = int(m.group(2)) if m.group(2) else None
                seen_header = True
                continue
            parts = line.split()
            if parts[0].lower() == "logical":
                if len(parts) != 3 or parts[1].upper() not in ("X", "Z"):
                    raise CodeError("expected 'logical X <pauli>' or 'logical Z <pauli>'")
                (lx if parts[1].upper() == "X" else lz).append(parse_pauli(parts[2], n))
            elif len(parts) == 1:
                p = parse_pauli(parts[0], n)
                if n is None:
                    n = p.n
                gens.append(p)
            else:
                raise CodeError(f"unexpected text {line!r}")
        except (PauliError, CodeError) as exc:
            raise CodeError(f"line {lineno}: {exc}") from None
    if not seen_header:
        raise CodeError("empty code file")
    if n is None:
        raise CodeError("cannot determine n: no header value and no generators")
    if len(lx) != len(lz):
        raise CodeError(f"{len(lx)} logical X lines but {len(lz)} logical Z lines")
    return StabilizerCode(n, GeneratorSet(n, tuple(gens)), tuple(zip(lx, lz)), k)


def format_code(code: StabilizerCode) -> str:
    lines = [f"code n={code.n} k={code.k}"]
    lines += [str(g) for g in code.generators]
    for xb, zb in code.logicals:
        lines += [f"logical X {xb}", f"logical Z {zb}"]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Validation:
    ok: bool
    k: int
    diagnostics: tuple[str, ...] = ()


def validate(code: StabilizerCode) -> Validation:
    diags = []
    gens = list(code.generators)
    for g in gens:
        if not g.is_hermitian:
            diags.append(f"generator {g} is not Hermitian")
    for i, j in itertools.combinations(range(len(gens)), 2):
        if not commutes(gens[i], gens[j]):
            diags.append(f"generators {gens[i]} and {gens[j]} anticommute")
    r = rank(code.generators)
    if r != len(gens):
        diags.append(f"generators are dependent (rank {r} < {len(gens)})")
    k = code.n - r
    if code.declared_k is not None and code.declared_k != k:
        diags.append(f"header declares k={code.declared_k} but n - rank = {k}")
    if code.logicals:
        if len(code.logicals) != k:
            diags.append(f"{len(code.logicals)} logical pairs given for k={k}")
        for idx, (xb, zb) in enumerate(code.logicals):
            for op in (xb, zb):
                if not op.is_hermitian:
                    diags.append(f"logical {op} is not Hermitian")
                for g in gens:
                    if not commutes(op, g):
                        diags.append(f"logical {op} anticommutes with generator {g}")
            if commutes(xb, zb):
                diags.append(f"logical pair {idx + 1} commutes")
            for jdx, (x2, z2) in enumerate(code.logicals):
                if jdx != idx and not all(commutes(a, b) for a in (xb, zb) for b in (x2, z2)):
                    diags.append(f"logical pairs {idx + 1} and {jdx + 1} do not commute")
    return Validation(not diags, k, tuple(diags))


def syndrome(code: StabilizerCode, e: PauliOperator) -> tuple[int, ...]:
    if e.n != code.n:
        raise CodeError(f"dimension mismatch: error on {e.n} qubits, code on {code.n}")
    return tuple(0 if commutes(g, e) else 1 for g in code.generators)


def paulis_of_weight(n: int, w: int, positions: Sequence[Sequence[int]] | None = None) -> Iterator[PauliOperator]:
    """Hermitian Paulis of weight ``w``, by position tuple then letters X<Y<Z."""
    combos = positions if positions is not None else itertools.combinations(range(n), w)
    for pos in combos:
        for letters in itertools.product(_ERROR_LETTERS, repeat=w):
            s = ["I"] * n
            for p, l in zip(pos, letters):
                s[p] = l
            yield PauliOperator.from_letters(s)


@dataclass(frozen=True)
class DistanceResult:
    d: int | None
    degenerate: bool
    witness: PauliOperator | None = None
    searched_to: int = 0

    def __str__(self) -> str:
        tag = "degenerate" if self.degenerate else "nondegenerate"
        if self.d is None:
            return f"d>{self.searched_to} {tag}"
        return f"d={self.d} {tag}"


def _scan(n: int, w: int, gens: GeneratorSet, combos) -> tuple[PauliOperator | None, bool]:
    """First logical error of weight ``w`` in ``combos`` and whether any stabilizer was seen."""
    gx = [g.x for g in gens]
    gz = [g.z for g in gens]
    in_s = False
    for e in paulis_of_weight(n, w, combos):
        if any((bin(e.x & z).count("1") + bin(e.z & x).count("1")) & 1 for x, z in zip(gx, gz)):
            continue
        if membership(gens, e).in_group:
            in_s = True
            continue
        return e, in_s
    return None, in_s


def _scan_job(args):
    n, w, strings, combos = args
    return _scan(n, w, GeneratorSet.from_strings(strings, n), combos)


def distance(code: StabilizerCode, max_weight: int | None = None, jobs: int = 1) -> DistanceResult:
    """Brute-force distance: minimum weight of an undetected error outside ``S``.

    Errors are enumerated by weight, then position tuple, then letters, so the
    reported witness is deterministic. ``jobs > 1`` splits each weight class
    across worker processes and keeps the first witness in enumeration order.
    """
    n = code.n
    top = n if max_weight is None else min(max_weight, n)
    gens = code.generators
    seen_in_s = False
    for w in range(1, top + 1):
        combos = list(itertools.combinations(range(n), w))
        if jobs > 1 and len(combos) > 1:
            chunks = [c.tolist() for c in np.array_split(np.array(combos), jobs) if len(c)]
            strings = [str(g) for g in gens]
            with ProcessPoolExecutor(jobs) as pool:
                results = list(pool.map(_scan_job, [(n, w, strings, [tuple(x) for x in ch]) for ch in chunks]))
            witness = next((r[0] for r in results if r[0] is not None), None)
            # a stabilizer element found after the witness does not matter: it has the same weight
            in_s = any(r[1] for r in results)
        else:
            witness, in_s = _scan(n, w, gens, combos)
        if witness is not None:
            return DistanceResult(w, seen_in_s, witness, w)
        seen_in_s |= in_s
    return DistanceResult(None, seen_in_s, None, top)


def complete_logicals(gens: GeneratorSet) -> tuple[tuple[PauliOperator, PauliOperator], ...]:
    """Minimal-weight logical pairs for a stabilizer group.

    Candidates are Hermitian Paulis commuting with ``S`` and independent of it,
    scanned by weight then lexicographic position and letter. Pairs are built
    greedily with the canonical pairing.
    """
    n = gens.n
    k = n - rank(gens)
    span = [g.x | (g.z << n) for g in gens]
    chosen: list[PauliOperator] = []
    pairs: list[tuple[PauliOperator, PauliOperator]] = []

    def ok(c: PauliOperator, partner: PauliOperator | None) -> bool:
        if not all(commutes(c, g) for g in gens):
            return False
        if not all(commutes(c, o) for o in chosen):
            return False
        if partner is not None and commutes(c, partner):
            return False
        vec = c.x | (c.z << n)
        base = span + [o.x | (o.z << n) for o in chosen] + ([partner.x | (partner.z << n)] if partner else [])
        return _gf2.rank(base + [vec]) > _gf2.rank(base)

    def first(partner: PauliOperator | None) -> PauliOperator:
        for w in range(1, n + 1):
            for c in paulis_of_weight(n, w):
                if ok(c, partner):
                    return c
        raise CodeError("failed to complete logical operators")

    for _ in range(k):
        xb = first(None)
        zb = first(xb)
        pairs.append((xb, zb))
        chosen.extend([xb, zb])
    return tuple(pairs)


@dataclass(frozen=True)
class CodeProfile:
    n: int
    k: int
    d: int | None
    degenerate: bool
    t: int
    syndrome_table: dict[tuple[int, ...], PauliOperator] = field(default_factory=dict)


def build_syndrome_table(code: StabilizerCode, t: int, max_weight: int | None = None) -> CodeProfile:
    """Map every syndrome of an error of weight <= t to a minimum-weight correction."""
    v = validate(code)
    if not v.ok:
        raise CodeError("invalid code: " + "; ".join(v.diagnostics))
    dist = distance(code, max_weight)
    if t > 0 and dist.d is not None and dist.d < 2 * t + 1:
        raise CodeError(f"distance {dist.d} < {2 * t + 1}: cannot correct {t} error(s), detection only")
    ident = PauliOperator.identity(code.n)
    table = {syndrome(code, ident): ident}
    for w in range(1, t + 1):
        for e in paulis_of_weight(code.n, w):
            s = syndrome(code, e)
            prev = table.get(s)
            if prev is None:
                table[s] = e
            elif not membership(code.generators, prev * e).in_group:
                raise CodeError(f"ambiguous syndrome {s}: {prev} and {e} differ by a logical operator")
    return CodeProfile(code.n, v.k, dist.d, dist.degenerate, t, table)


@dataclass(frozen=True)
class ExperimentReport:
    error: PauliOperator
    syndrome: tuple[int, ...]
    detected: bool
    correction: PauliOperator | None = None
    restored: bool | None = None


def code_tableau(code: StabilizerCode) -> Tableau:
    pairs = code.logicals or complete_logicals(code.generators)
    logs = [(str(i + 1), xb, zb) for i, (xb, zb) in enumerate(pairs)]
    return Tableau.from_generators(code.n, list(code.generators), logs)


def experiment(code: StabilizerCode, error: PauliOperator, mode: str = "detect",
               profile: CodeProfile | None = None, seed: int | None = None) -> ExperimentReport:
    """Encode, apply ``error``, measure every generator, then detect or correct.

    Generator measurements are deterministic on a Pauli-corrupted codeword,
    so ``seed`` only feeds the (unused) coin of the measurement engine.
    """
    if mode not in ("detect", "correct"):
        raise CodeError(f"mode must be 'detect' or 'correct', got {mode!r}")
    if mode == "correct" and profile is None:
        raise CodeError("correct mode needs a syndrome table")
    rng = np.random.default_rng(seed)
    t = code_tableau(code)
    before = t.copy()
    t.apply_pauli(error)
    synd = tuple(t.measure(g, "random", rng).bit for g in code.generators)
    detected = any(synd)
    if mode == "detect":
        return ExperimentReport(error, synd, detected)
    corr = profile.syndrome_table.get(synd)
    if corr is None:
        return ExperimentReport(error, synd, detected, None, False)
    t.apply_pauli(corr)
    return ExperimentReport(error, synd, detected, corr, t.equivalent(before))
