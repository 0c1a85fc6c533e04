"""Pauli group elements in symplectic binary form.

An n-qubit Pauli operator is stored as ``i**phase * prod_j X_j**x_j Z_j**z_j``
with the X factor written before the Z factor on every qubit. The bit
vectors ``x`` and ``z`` are packed into Python integers (bit ``j`` is qubit
``j``), so products and commutation checks are word-parallel.

Because ``Y = i X Z``, a bare ``Y`` has ``x = z = 1`` and raw phase ``1``;
the display form absorbs that factor and prints ``+Y``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

__all__ = [
    "PauliError",
    "PauliOperator",
    "GeneratorSet",
    "Membership",
    "parse_pauli",
    "multiply",
    "commutes",
    "weight",
    "conjugate_sign_flip",
    "canonicalize",
    "membership",
    "rank",
]

_LETTERS = "IXZY"  # indexed by x + 2*z
_SIGNS = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_SIGN_TEXT = ("+", "+i", "-", "-i")
_PAULI_RE = re.compile(r"^(\+i|-i|i|\+|-)?([A-Za-z]*)$")


class PauliError(ValueError):
    """Malformed Pauli text or incompatible operands."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliOperator:
    """An element of the n-qubit Pauli group.

    ``phase`` is the raw exponent of ``i`` in the X-before-Z decomposition,
    not the displayed sign. Use :attr:`sign_exp` for the latter.
    """

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise PauliError(f"qubit count must be non-negative, got {self.n}")
        mask = (1 << self.n) - 1
        if (self.x | self.z) & ~mask:
            raise PauliError("bits set beyond the qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    # construction -------------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliOperator:
        """``letter`` acting on ``qubit`` (0-based), identity elsewhere."""
        if not 0 <= qubit < n:
            raise PauliError(f"qubit {qubit} out of range for n={n}")
        return cls.from_letters(["I"] * qubit + [letter] + ["I"] * (n - qubit - 1))

    @classmethod
    def from_letters(cls, letters: Iterable[str], sign_exp: int = 0) -> PauliOperator:
        x = z = 0
        n = 0
        for j, ch in enumerate(letters):
            n = j + 1
            try:
                code = _LETTERS.index(ch.upper())
            except ValueError:
                raise PauliError(f"illegal Pauli letter {ch!r} at position {j + 1}") from None
            if code & 1:
                x |= 1 << j
            if code & 2:
                z |= 1 << j
        return cls(n, x, z, sign_exp + _popcount(x & z))

    @classmethod
    def from_bits(cls, x_bits: Sequence[int], z_bits: Sequence[int], phase: int = 0) -> PauliOperator:
        if len(x_bits) != len(z_bits):
            raise PauliError("x and z bit sequences differ in length")
        x = sum(1 << j for j, b in enumerate(x_bits) if b)
        z = sum(1 << j for j, b in enumerate(z_bits) if b)
        return cls(len(x_bits), x, z, phase)

    # views --------------------------------------------------------------
    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple((self.x >> j) & 1 for j in range(self.n))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple((self.z >> j) & 1 for j in range(self.n))

    @property
    def sign_exp(self) -> int:
        """Exponent ``k`` of the displayed prefactor ``i**k``."""
        return (self.phase - _popcount(self.x & self.z)) % 4

    @property
    def letters(self) -> str:
        return "".join(self.letter(j) for j in range(self.n))

    def letter(self, qubit: int) -> str:
        return _LETTERS[((self.x >> qubit) & 1) | (((self.z >> qubit) & 1) << 1)]

    @property
    def is_hermitian(self) -> bool:
        return self.sign_exp % 2 == 0

    @property
    def is_identity(self) -> bool:
        """True for any phase times the identity."""
        return self.x == 0 and self.z == 0

    @property
    def support(self) -> int:
        return self.x | self.z

    def __str__(self) -> str:
        return _SIGN_TEXT[self.sign_exp] + self.letters

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"

    # algebra ------------------------------------------------------------
    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return multiply(self, other)

    def __neg__(self) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, self.phase + 2)

    def times_phase(self, k: int) -> PauliOperator:
        """Multiply by ``i**k``."""
        return PauliOperator(self.n, self.x, self.z, self.phase + k)

    def with_sign(self, sign_exp: int) -> PauliOperator:
        """Same letters with displayed prefactor ``i**sign_exp``."""
        return PauliOperator(self.n, self.x, self.z, sign_exp + _popcount(self.x & self.z))

    def unsigned(self) -> PauliOperator:
        return self.with_sign(0)

    def dagger(self) -> PauliOperator:
        # (i^s X^x Z^z)^dag = i^-s Z^z X^x = i^-s (-1)^{x.z} X^x Z^z
        return PauliOperator(self.n, self.x, self.z, -self.phase + 2 * _popcount(self.x & self.z))

    def commutes(self, other: PauliOperator) -> bool:
        return commutes(self, other)

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def remove_qubit(self, qubit: int) -> PauliOperator:
        """Delete ``qubit``; it must carry the identity."""
        if (self.support >> qubit) & 1:
            raise PauliError(f"qubit {qubit} is not identity in {self}")
        low = (1 << qubit) - 1
        x = (self.x & low) | ((self.x >> (qubit + 1)) << qubit)
        z = (self.z & low) | ((self.z >> (qubit + 1)) << qubit)
        return PauliOperator(self.n - 1, x, z, self.phase)

    def permuted(self, perm: Sequence[int]) -> PauliOperator:
        """Operator whose qubit ``perm[j]`` carries this operator's qubit ``j``."""
        x = z = 0
        for j, p in enumerate(perm):
            x |= ((self.x >> j) & 1) << p
            z |= ((self.z >> j) & 1) << p
        return PauliOperator(self.n, x, z, self.phase)


def parse_pauli(text: str, n: int | None = None) -> PauliOperator:
    """Parse ``SIGN? LETTERS``; ``n`` enforces the letter count when given."""
    s = text.strip()
    m = _PAULI_RE.match(s)
    if m is None:
        raise PauliError(f"malformed sign or Pauli string {text!r}")
    sign, letters = m.group(1) or "", m.group(2)
    if not letters:
        raise PauliError(f"no Pauli letters in {text!r}")
    for j, ch in enumerate(letters):
        if ch.upper() not in _LETTERS:
            raise PauliError(f"illegal character {ch!r} at position {j + 1} in {text!r}")
    if n is not None and len(letters) != n:
        raise PauliError(f"length mismatch: {text!r} has {len(letters)} letters, expected {n}")
    return PauliOperator.from_letters(letters, _SIGNS[sign])


def _check_dims(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise PauliError(f"dimension mismatch: {a.n} vs {b.n} qubits")


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    _check_dims(a, b)
    # Z^za X^xb = (-1)^{za.xb} X^xb Z^za on each qubit
    return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z, a.phase + b.phase + 2 * _popcount(a.z & b.x))


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    _check_dims(a, b)
    return (_popcount(a.x & b.z) + _popcount(a.z & b.x)) % 2 == 0


def weight(a: PauliOperator) -> int:
    return a.weight


def conjugate_sign_flip(e: PauliOperator, m: PauliOperator) -> PauliOperator:
    """Return ``e m e^dagger`` for Hermitian ``e``: ``m`` or ``-m``."""
    _check_dims(e, m)
    if not e.is_hermitian:
        raise PauliError(f"conjugating operator {e} is not Hermitian")
    return m if commutes(e, m) else -m


@dataclass(frozen=True)
class GeneratorSet:
    """An ordered list of generators on a common number of qubits."""

    n: int
    generators: tuple[PauliOperator, ...] = field(default_factory=tuple)

    def __post_init__(self):
        gens = tuple(self.generators)
        for g in gens:
            if g.n != self.n:
                raise PauliError(f"generator {g} has {g.n} qubits, expected {self.n}")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def from_strings(cls, strings: Iterable[str], n: int | None = None) -> GeneratorSet:
        ops = [parse_pauli(s, n) for s in strings]
        if n is None:
            if not ops:
                raise PauliError("cannot infer qubit count from an empty list")
            n = ops[0].n
        return cls(n, tuple(ops))

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self) -> Iterator[PauliOperator]:
        return iter(self.generators)

    def __getitem__(self, i: int) -> PauliOperator:
        return self.generators[i]

    def __str__(self) -> str:
        return "<" + ", ".join(str(g) for g in self.generators) + ">"

    def product(self, mask: int) -> PauliOperator:
        """Ordered product of the generators selected by ``mask``."""
        out = PauliOperator.identity(self.n)
        for i, g in enumerate(self.generators):
            if (mask >> i) & 1:
                out = out * g
        return out

    def is_abelian(self) -> bool:
        gs = self.generators
        return all(commutes(gs[i], gs[j]) for i in range(len(gs)) for j in range(i + 1, len(gs)))


def _echelon(gens: GeneratorSet):
    """Reduced row echelon form over the columns x_0..x_{n-1}, z_0..z_{n-1}.

    Returns ``(rows, masks, pivots)`` where ``masks[r]`` records which input
    generators multiply to ``rows[r]``. Rows reducing to a multiple of the
    identity are dropped.
    """
    n = gens.n
    rows = list(gens.generators)
    masks = [1 << i for i in range(len(rows))]
    pivots: list[tuple[int, int]] = []
    top = 0
    for block in (0, 1):
        for q in range(n):
            bit = 1 << q

            def has(p: PauliOperator) -> bool:
                return bool((p.x if block == 0 else p.z) & bit)

            sel = next((r for r in range(top, len(rows)) if has(rows[r])), None)
            if sel is None:
                continue
            rows[top], rows[sel] = rows[sel], rows[top]
            masks[top], masks[sel] = masks[sel], masks[top]
            piv = rows[top]
            for r in range(len(rows)):
                if r != top and has(rows[r]):
                    rows[r] = piv * rows[r]
                    masks[r] ^= masks[top]
            pivots.append((block, q))
            top += 1
    return rows[:top], masks[:top], pivots


def canonicalize(gens: GeneratorSet) -> GeneratorSet:
    """Unique generating sequence of the group generated by ``gens``.

    Pivots on X bits first, then on Z bits of the remainder, both in
    ascending qubit order. Dependent generators are dropped; ``rank`` is
    the length of the result.
    """
    rows, _, _ = _echelon(gens)
    return GeneratorSet(gens.n, tuple(rows))


def rank(gens: GeneratorSet) -> int:
    return len(_echelon(gens)[0])


@dataclass(frozen=True)
class Membership:
    """Outcome of a group-membership query.

    When ``in_group`` holds, ``i**phase * e`` is the group element with the
    same letters as ``e`` and ``mask`` selects the input generators whose
    product it is.
    """

    in_group: bool
    phase: int = 0
    mask: int = 0

    @property
    def sign(self) -> complex | int:
        return (1, 1j, -1, -1j)[self.phase] if self.in_group else 0

    def __bool__(self) -> bool:
        return self.in_group


def membership(gens: GeneratorSet, e: PauliOperator) -> Membership:
    if e.n != gens.n:
        raise PauliError(f"dimension mismatch: {e.n} vs {gens.n} qubits")
    rows, masks, pivots = _echelon(gens)
    x, z, mask = e.x, e.z, 0
    for r, (block, q) in enumerate(pivots):
        bits = x if block == 0 else z
        if (bits >> q) & 1:
            x ^= rows[r].x
            z ^= rows[r].z
            mask ^= masks[r]
    if x or z:
        return Membership(False)
    # the product of the input generators selected by mask is the group element
    p = gens.product(mask)
    return Membership(True, (p.phase - e.phase) % 4, mask)
