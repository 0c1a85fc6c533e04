"""Heisenberg-picture tableau: stabilizer rows plus tracked logical operators.

Storage is column-major and bit-packed. For every qubit ``q`` the arrays
``_x[q]`` and ``_z[q]`` are packed bit vectors over row slots, and the raw
phase exponent of each row lives in two bit planes ``_p0``/``_p1``. A Clifford
gate then touches one or two qubit columns with a handful of word-parallel
numpy operations, independent of how many rows there are per word.

Besides the stabilizer generators and the logical pairs, every stabilizer row
``s_i`` is shadowed by a destabilizer row ``d_i`` that anticommutes with
``s_i`` only and commutes with all other stabilizers and all logicals. The
destabilizers never appear in snapshots; they make deterministic outcomes and
qubit drops a matter of reading off commutation bits.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _gf2
from .pauli import GeneratorSet, PauliError, PauliOperator, canonicalize, commutes, membership

__all__ = [
    "TableauError",
    "InputKind",
    "MeasureCase",
    "MeasurementRecord",
    "Tableau",
    "CLIFFORD_GATES",
]

CLIFFORD_GATES = {"R": 1, "P": 1, "CNOT": 2}
_ONE = np.uint64(1)


class TableauError(ValueError):
    """Invalid operation on a tableau."""


class InputKind(enum.Enum):
    FIXED_ZERO = "zero"
    DATA = "data"


class MeasureCase(enum.Enum):
    RANDOM_ANTICOMMUTING = "random-anticommuting"
    DETERMINISTIC = "deterministic"
    LOGICAL_CONSTRAINING = "logical-constraining"


@dataclass(frozen=True)
class MeasurementRecord:
    observable: PauliOperator
    outcome: int
    case: MeasureCase
    witness: PauliOperator | None = None
    corrected: bool = False

    @property
    def bit(self) -> int:
        return 0 if self.outcome == 1 else 1


def _int_to_index(v: int) -> np.ndarray:
    if v == 0:
        return np.empty(0, dtype=np.intp)
    nbytes = (v.bit_length() + 7) // 8
    bits = np.unpackbits(np.frombuffer(v.to_bytes(nbytes, "little"), dtype=np.uint8), bitorder="little")
    return np.flatnonzero(bits)


def _bits_to_int(bits: np.ndarray) -> int:
    if not bits.any():
        return 0
    return int.from_bytes(np.packbits(bits.astype(np.uint8), bitorder="little").tobytes(), "little")


class Tableau:
    """Stabilizer group ``S`` with logical pairs, evolved in place.

    Use :meth:`init` or :meth:`from_generators` to build one. All mutating
    methods return ``self`` so calls can be chained; :meth:`copy` gives an
    independent value.
    """

    def __init__(self, n: int, capacity: int):
        self.n = n
        self._cap = capacity
        self._w = max(1, (capacity + 63) // 64)
        self._x = np.zeros((n, self._w), dtype=np.uint64)
        self._z = np.zeros((n, self._w), dtype=np.uint64)
        self._p0 = np.zeros(self._w, dtype=np.uint64)
        self._p1 = np.zeros(self._w, dtype=np.uint64)
        self._stab: list[int] = []
        self._destab: list[int] = []
        self._logical: list[tuple[str, int, int]] = []
        self._free = list(range(capacity - 1, -1, -1))

    # construction -------------------------------------------------------
    @classmethod
    def init(cls, n: int, inputs: Sequence[InputKind | str] | None = None,
             labels: Sequence[str] | None = None) -> Tableau:
        """Fixed-zero qubits contribute ``Z_j``; data qubits a pair ``(X_j, Z_j)``."""
        if n < 1:
            raise TableauError("need at least one qubit")
        kinds = [InputKind(k) if isinstance(k, str) else k for k in (inputs or [InputKind.DATA] * n)]
        if len(kinds) != n:
            raise TableauError(f"{len(kinds)} input kinds for {n} qubits")
        t = cls(n, 2 * n)
        for j, kind in enumerate(kinds):
            X = PauliOperator.single(n, j, "X")
            Z = PauliOperator.single(n, j, "Z")
            if kind is InputKind.FIXED_ZERO:
                t._add_stabilizer(Z, X)
            else:
                label = labels[j] if labels else str(j + 1)
                t._add_logical(label, X, Z)
        return t

    @classmethod
    def from_generators(cls, n: int, stabilizers: Iterable[PauliOperator],
                        logicals: Iterable[tuple[str, PauliOperator, PauliOperator]] = ()) -> Tableau:
        """Build from explicit stabilizer rows and labelled logical pairs.

        Destabilizers are completed by solving the symplectic constraints.
        """
        stabs = list(stabilizers)
        logs = list(logicals)
        for s in stabs:
            if s.n != n or not s.is_hermitian:
                raise TableauError(f"stabilizer row {s} must be Hermitian on {n} qubits")
        if len(stabs) + len(logs) != n:
            raise TableauError(
                f"{len(stabs)} stabilizers and {len(logs)} logical pairs do not account for {n} qubits")
        constraint_ops = stabs + [op for _, xb, zb in logs for op in (xb, zb)]
        for op in constraint_ops:
            if op.n != n:
                raise TableauError(f"operator {op} is not on {n} qubits")
        # v in GF(2)^{2n} as bits x_0..x_{n-1}, z_0..z_{n-1}; <v,w> = v.(w_z, w_x)
        rows = [w.z | (w.x << n) for w in constraint_ops]
        if _gf2.rank(rows) != len(rows):
            raise TableauError("stabilizers and logicals are not independent")
        rhs = [1 << i for i in range(len(stabs))] + [0] * (2 * len(logs))
        sol = _gf2.solve(rows, rhs, 2 * n)
        if sol is None:
            raise TableauError("cannot complete destabilizers")
        t = cls(n, 2 * n)
        for i, s in enumerate(stabs):
            dx = dz = 0
            for c in range(n):
                dx |= ((sol[c] >> i) & 1) << c
                dz |= ((sol[n + c] >> i) & 1) << c
            t._add_stabilizer(s, PauliOperator(n, dx, dz))
        for label, xb, zb in logs:
            t._add_logical(label, xb, zb)
        t.check_invariants()
        return t

    def copy(self) -> Tableau:
        t = Tableau.__new__(Tableau)
        t.n, t._cap, t._w = self.n, self._cap, self._w
        t._x, t._z = self._x.copy(), self._z.copy()
        t._p0, t._p1 = self._p0.copy(), self._p1.copy()
        t._stab, t._destab = list(self._stab), list(self._destab)
        t._logical = list(self._logical)
        t._free = list(self._free)
        return t

    # slot plumbing ------------------------------------------------------
    def _slot_bit(self, slot: int) -> tuple[int, np.uint64]:
        return slot >> 6, _ONE << np.uint64(slot & 63)

    def _mask(self, slots: Iterable[int]) -> np.ndarray:
        m = np.zeros(self._w, dtype=np.uint64)
        for s in slots:
            w, b = self._slot_bit(s)
            m[w] |= b
        return m

    def _active_mask(self) -> np.ndarray:
        return self._mask(self._active_slots())

    def _active_slots(self) -> list[int]:
        return self._stab + self._destab + [s for _, a, b in self._logical for s in (a, b)]

    def _row(self, slot: int) -> PauliOperator:
        w, b = self._slot_bit(slot)
        sh = np.uint64(slot & 63)
        xb = (self._x[:, w] >> sh) & _ONE
        zb = (self._z[:, w] >> sh) & _ONE
        ph = int((self._p0[w] >> sh) & _ONE) + 2 * int((self._p1[w] >> sh) & _ONE)
        return PauliOperator(self.n, _bits_to_int(xb), _bits_to_int(zb), ph)

    def _set_row(self, slot: int, p: PauliOperator) -> None:
        w, b = self._slot_bit(slot)
        keep = ~b
        xb = np.zeros(self.n, dtype=np.uint64)
        zb = np.zeros(self.n, dtype=np.uint64)
        xb[_int_to_index(p.x)] = b
        zb[_int_to_index(p.z)] = b
        self._x[:, w] = (self._x[:, w] & keep) | xb
        self._z[:, w] = (self._z[:, w] & keep) | zb
        self._p0[w] = (self._p0[w] & keep) | (b if p.phase & 1 else np.uint64(0))
        self._p1[w] = (self._p1[w] & keep) | (b if p.phase & 2 else np.uint64(0))

    def _take_slot(self) -> int:
        if not self._free:
            raise TableauError("row capacity exhausted")
        return self._free.pop()

    def _add_stabilizer(self, s: PauliOperator, d: PauliOperator) -> None:
        a, b = self._take_slot(), self._take_slot()
        self._set_row(a, s)
        self._set_row(b, d)
        self._stab.append(a)
        self._destab.append(b)

    def _add_logical(self, label: str, xb: PauliOperator, zb: PauliOperator) -> None:
        a, b = self._take_slot(), self._take_slot()
        self._set_row(a, xb)
        self._set_row(b, zb)
        self._logical.append((label, a, b))

    def _release(self, *slots: int) -> None:
        self._free.extend(slots)

    def _anticommute_mask(self, a: PauliOperator) -> np.ndarray:
        """Packed bit per slot: row anticommutes with ``a``."""
        xi, zi = _int_to_index(a.x), _int_to_index(a.z)
        return np.bitwise_xor.reduce(self._z[xi], axis=0) ^ np.bitwise_xor.reduce(self._x[zi], axis=0)

    @staticmethod
    def _has(mask: np.ndarray, slot: int) -> bool:
        return bool((int(mask[slot >> 6]) >> (slot & 63)) & 1)

    def _left_multiply(self, m: PauliOperator, rows: np.ndarray) -> None:
        """Replace every row ``N`` selected by ``rows`` with ``m N``."""
        if not rows.any():
            return
        xi, zi = _int_to_index(m.x), _int_to_index(m.z)
        parity = np.bitwise_xor.reduce(self._x[zi], axis=0) & rows
        if len(xi):
            self._x[xi] ^= rows
        if len(zi):
            self._z[zi] ^= rows
        a0 = rows if m.phase & 1 else np.zeros_like(rows)
        a1 = rows if m.phase & 2 else np.zeros_like(rows)
        carry = self._p0 & a0
        self._p0 ^= a0
        self._p1 ^= a1 ^ carry ^ parity

    # views --------------------------------------------------------------
    @property
    def stabilizer(self) -> GeneratorSet:
        return GeneratorSet(self.n, tuple(self._row(s) for s in self._stab))

    @property
    def destabilizers(self) -> list[PauliOperator]:
        return [self._row(s) for s in self._destab]

    @property
    def logicals(self) -> list[tuple[str, PauliOperator, PauliOperator]]:
        return [(label, self._row(a), self._row(b)) for label, a, b in self._logical]

    @property
    def labels(self) -> list[str]:
        return [label for label, _, _ in self._logical]

    @property
    def k(self) -> int:
        """Number of stabilizer generators."""
        return len(self._stab)

    def logical(self, label: str) -> tuple[PauliOperator, PauliOperator]:
        for lab, a, b in self._logical:
            if lab == label:
                return self._row(a), self._row(b)
        raise KeyError(label)

    def snapshot(self) -> list[str]:
        """Stabilizer rows (two-space indent) then ``Xbar_j:``/``Zbar_j:`` rows."""
        lines = [f"  {self._row(s)}" for s in self._stab]
        for label, a, b in self._logical:
            lines.append(f"Xbar_{label}: {self._row(a)}")
            lines.append(f"Zbar_{label}: {self._row(b)}")
        return lines

    def __str__(self) -> str:
        return "\n".join(self.snapshot())

    # gates --------------------------------------------------------------
    def _check_qubit(self, q: int) -> None:
        if not 0 <= q < self.n:
            raise TableauError(f"qubit index {q} out of range for {self.n} qubits")

    def apply_gate(self, name: str, *qubits: int) -> Tableau:
        gate = name.upper()
        if gate not in CLIFFORD_GATES:
            raise TableauError(f"gate {name!r} is not a supported Clifford generator (R, P, CNOT)")
        if len(qubits) != CLIFFORD_GATES[gate]:
            raise TableauError(f"{gate} takes {CLIFFORD_GATES[gate]} qubit(s), got {len(qubits)}")
        if gate == "R":
            return self.r(*qubits)
        if gate == "P":
            return self.p(*qubits)
        return self.cnot(*qubits)

    def r(self, q: int) -> Tableau:
        """Hadamard: X <-> Z, so X^x Z^z -> (-1)^{xz} X^z Z^x."""
        self._check_qubit(q)
        x, z = self._x[q], self._z[q]
        self._p1 ^= x & z
        self._x[q], self._z[q] = z.copy(), x.copy()
        return self

    def p(self, q: int) -> Tableau:
        """Phase gate: X -> Y = iXZ, Z -> Z."""
        self._check_qubit(q)
        x = self._x[q]
        self._p1 ^= self._p0 & x
        self._p0 ^= x
        self._z[q] ^= x
        return self

    def cnot(self, c: int, t: int) -> Tableau:
        self._check_qubit(c)
        self._check_qubit(t)
        if c == t:
            raise TableauError("CNOT control and target must differ")
        # phase-free in the X-before-Z decomposition
        self._x[t] ^= self._x[c]
        self._z[c] ^= self._z[t]
        return self

    def apply_pauli(self, e: PauliOperator) -> Tableau:
        """Conjugate by a Hermitian Pauli: rows anticommuting with ``e`` flip sign."""
        if e.n != self.n:
            raise TableauError(f"dimension mismatch: {e.n} vs {self.n} qubits")
        if not e.is_hermitian:
            raise TableauError(f"cannot apply non-Hermitian {e}")
        self._p1 ^= self._anticommute_mask(e)
        return self

    # measurement --------------------------------------------------------
    def measure(self, a: PauliOperator, mode: str = "force_plus",
                rng: np.random.Generator | None = None,
                outcome: int | None = None) -> MeasurementRecord:
        """Measure the Hermitian Pauli ``a``.

        ``mode`` is ``"force_plus"`` (apply the witness on a -1 draw, so ``+a``
        ends up stabilized) or ``"random"``. Non-deterministic draws come
        from ``outcome`` when given, else from ``rng`` (fair coin). In
        force-plus mode with neither, the draw is taken as +1.
        """
        if a.n != self.n:
            raise TableauError(f"dimension mismatch: {a.n} vs {self.n} qubits")
        if not a.is_hermitian:
            raise TableauError(f"cannot measure non-Hermitian {a} (imaginary eigenvalues)")
        if mode not in ("force_plus", "random"):
            raise TableauError(f"unknown measurement mode {mode!r}")
        ac = self._anticommute_mask(a)

        stab_hit = next((i for i, s in enumerate(self._stab) if self._has(ac, s)), None)
        if stab_hit is not None:
            return self._measure_random(a, ac, mode, rng, outcome, stab_hit)

        for j, (label, xs, zs) in enumerate(self._logical):
            for wit, partner in ((xs, zs), (zs, xs)):
                if self._has(ac, wit):
                    return self._measure_logical(a, ac, mode, rng, outcome, j, wit, partner)

        sign = self._deterministic_sign(a, ac)
        if outcome is not None and outcome != sign:
            raise TableauError(f"requested outcome {outcome:+d} has zero probability for {a}")
        return MeasurementRecord(a, sign, MeasureCase.DETERMINISTIC)

    def _draw(self, mode, rng, outcome) -> int:
        if outcome is not None:
            if outcome not in (1, -1):
                raise TableauError(f"outcome must be +1 or -1, got {outcome}")
            return outcome
        if rng is None:
            if mode == "random":
                raise TableauError("random-mode measurement needs a generator or a forced outcome")
            return 1
        return -1 if rng.integers(2) else 1

    def _measure_random(self, a, ac, mode, rng, outcome, p) -> MeasurementRecord:
        s_slot, d_slot = self._stab[p], self._destab[p]
        m = self._row(s_slot)
        rows = ac & self._active_mask() & ~self._mask([s_slot, d_slot])
        self._left_multiply(m, rows)
        draw = self._draw(mode, rng, outcome)
        corrected = mode == "force_plus" and draw == -1
        self._set_row(d_slot, m)
        self._set_row(s_slot, a if (draw == 1 or mode == "force_plus") else -a)
        return MeasurementRecord(a, draw, MeasureCase.RANDOM_ANTICOMMUTING, m, corrected)

    def _measure_logical(self, a, ac, mode, rng, outcome, j, wit, partner) -> MeasurementRecord:
        m = self._row(wit)
        rows = ac & self._active_mask() & ~self._mask([wit, partner])
        self._left_multiply(m, rows)
        draw = self._draw(mode, rng, outcome)
        corrected = mode == "force_plus" and draw == -1
        del self._logical[j]
        # witness slot becomes the destabilizer, partner slot holds +-a
        self._set_row(partner, a if (draw == 1 or mode == "force_plus") else -a)
        self._stab.append(partner)
        self._destab.append(wit)
        return MeasurementRecord(a, draw, MeasureCase.LOGICAL_CONSTRAINING, m, corrected)

    def _stab_product(self, selected: list[int]) -> PauliOperator:
        """Product of the given stabilizer slots (they commute, order is free)."""
        if not selected:
            return PauliOperator.identity(self.n)
        sel = np.array(sorted(selected))
        words, shifts = sel >> 6, (sel & 63).astype(np.uint64)
        xs = ((self._x[:, words] >> shifts) & _ONE).astype(np.uint8)  # (n, m)
        zs = ((self._z[:, words] >> shifts) & _ONE).astype(np.uint8)
        ph = (((self._p0[words] >> shifts) & _ONE) + 2 * ((self._p1[words] >> shifts) & _ONE)).astype(np.int64)
        # sum_{i<j} z_i . x_j, per qubit via exclusive prefix parity of z
        zprefix = (np.cumsum(zs, axis=1, dtype=np.int64) - zs) & 1
        cross = int(np.sum(zprefix & xs)) & 1
        phase = int(ph.sum()) + 2 * cross
        xb = np.bitwise_xor.reduce(xs, axis=1)
        zb = np.bitwise_xor.reduce(zs, axis=1)
        return PauliOperator(self.n, _bits_to_int(xb), _bits_to_int(zb), phase)

    def _decompose(self, a: PauliOperator, ac: np.ndarray) -> tuple[list[int], PauliOperator]:
        """Stabilizer indices whose product equals ``a`` up to phase."""
        idx = [i for i, d in enumerate(self._destab) if self._has(ac, d)]
        prod = self._stab_product([self._stab[i] for i in idx])
        if prod.x != a.x or prod.z != a.z:
            raise TableauError(f"internal error: {a} commutes with every row but is not in the stabilizer")
        return idx, prod

    def _deterministic_sign(self, a: PauliOperator, ac: np.ndarray) -> int:
        _, prod = self._decompose(a, ac)
        rel = (prod.phase - a.phase) % 4
        if rel == 0:
            return 1
        if rel == 2:
            return -1
        raise TableauError(f"internal error: imaginary relative phase measuring {a}")

    # qubit removal ------------------------------------------------------
    def drop_qubit(self, q: int) -> Tableau:
        """Remove a qubit that the stabilizer pins to a single-qubit eigenstate."""
        self._check_qubit(q)
        if self.n == 1:
            raise TableauError("cannot drop the last qubit")
        tracked = self._mask(self._stab + [s for _, a, b in self._logical for s in (a, b)])
        for letter in "ZXY":
            P = PauliOperator.single(self.n, q, letter)
            ac = self._anticommute_mask(P)
            if not (ac & tracked).any():
                break
        else:
            raise TableauError(
                f"qubit {q + 1} is not fully constrained by the stabilizer; refusing to drop it")
        idx, prod = self._decompose(P, ac)
        p = idx[0]
        new_s = prod
        dp = self._row(self._destab[p])
        for i in idx[1:]:
            d = self._destab[i]
            self._set_row(d, self._row(d) * dp)
        s_slot, d_slot = self._stab[p], self._destab[p]
        self._set_row(s_slot, new_s)
        w_rows = (self._x[q] | self._z[q]) & self._active_mask() & ~self._mask([s_slot, d_slot])
        self._left_multiply(new_s, w_rows)
        del self._stab[p]
        del self._destab[p]
        self._release(s_slot, d_slot)
        self._x = np.delete(self._x, q, axis=0)
        self._z = np.delete(self._z, q, axis=0)
        self.n -= 1
        return self

    # comparison ---------------------------------------------------------
    def equivalent(self, other: Tableau) -> bool:
        """Same stabilizer group and logicals equal modulo stabilizer elements."""
        if self.n != other.n or self.labels != other.labels:
            raise TableauError("tableaus differ in shape or logical labels")
        s1 = canonicalize(self.stabilizer)
        if s1 != canonicalize(other.stabilizer):
            return False
        for (_, x1, z1), (_, x2, z2) in zip(self.logicals, other.logicals):
            for a, b in ((x1, x2), (z1, z2)):
                mem = membership(s1, a * b)
                if not mem.in_group or mem.phase != 0:
                    return False
        return True

    # validation ---------------------------------------------------------
    def check_invariants(self) -> None:
        """Raise :class:`TableauError` if any structural invariant fails."""
        stabs = [self._row(s) for s in self._stab]
        destabs = [self._row(s) for s in self._destab]
        logs = self.logicals
        if len(stabs) + len(logs) != self.n:
            raise TableauError("rank + logical pairs != qubit count")
        if len(set(self._active_slots())) != 2 * self.n:
            raise TableauError("slot bookkeeping corrupted")
        for i, s in enumerate(stabs):
            if not s.is_hermitian:
                raise TableauError(f"stabilizer row {s} is not Hermitian")
            for j, t in enumerate(stabs):
                if not commutes(s, t):
                    raise TableauError(f"stabilizer rows {s} and {t} anticommute")
                if commutes(s, destabs[j]) != (i != j):
                    raise TableauError(f"destabilizer pairing broken at {i},{j}")
        ops = [op for _, xb, zb in logs for op in (xb, zb)]
        for op in ops:
            if not op.is_hermitian:
                raise TableauError(f"logical {op} is not Hermitian")
            for s in stabs:
                if not commutes(op, s):
                    raise TableauError(f"logical {op} anticommutes with stabilizer {s}")
            for d in destabs:
                if not commutes(op, d):
                    raise TableauError(f"logical {op} anticommutes with destabilizer {d}")
        for i, (_, xi, zi) in enumerate(logs):
            if commutes(xi, zi):
                raise TableauError(f"logical pair {i} commutes")
            for j, (_, xj, zj) in enumerate(logs):
                if i != j and not all(commutes(u, v) for u in (xi, zi) for v in (xj, zj)):
                    raise TableauError(f"logical pairs {i} and {j} do not commute")
        if -PauliOperator.identity(self.n) in set(stabs) or _gf2.rank(
                [s.x | (s.z << self.n) for s in stabs]) != len(stabs):
            raise TableauError("stabilizer generators are dependent")

    def memory_bytes(self) -> int:
        return self._x.nbytes + self._z.nbytes + self._p0.nbytes + self._p1.nbytes
