"""Dense state-vector reference simulator for small qubit counts.

Amplitudes are stored in lexicographic basis order ``|q1 q2 ... qn>`` with
qubit 1 the most significant bit, matching the left-to-right tensor order
of the Pauli strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .pauli import GeneratorSet, PauliOperator, canonicalize
from .tableau import Tableau

__all__ = [
    "OracleError",
    "DEFAULT_LIMIT",
    "DenseState",
    "GATES",
    "gate_matrix",
    "pauli_matrix",
    "apply",
    "apply_pauli",
    "measure_pauli",
    "stabilizer_to_state",
    "tableau_state",
    "tableau_to_unitary",
    "circuit_unitary",
    "drop_qubit",
    "fidelity",
    "equal_up_to_phase",
    "fix_global_phase",
    "format_amplitudes",
    "format_matrix",
    "cross_validate",
]

DEFAULT_LIMIT = 12
_PHASES = np.array([1, 1j, -1, -1j])
_SQ2 = 1 / np.sqrt(2)

GATES = {
    "R": np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2,
    "P": np.array([[1, 0], [0, 1j]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
}


class OracleError(ValueError):
    pass


@dataclass
class DenseState:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (2 ** self.n,):
            raise OracleError(f"expected {2 ** self.n} amplitudes, got {self.amps.shape}")

    @classmethod
    def zero(cls, n: int) -> DenseState:
        amps = np.zeros(2 ** n, dtype=complex)
        amps[0] = 1
        return cls(n, amps)

    @classmethod
    def basis(cls, n: int, index: int) -> DenseState:
        amps = np.zeros(2 ** n, dtype=complex)
        amps[index] = 1
        return cls(n, amps)

    def copy(self) -> DenseState:
        return DenseState(self.n, self.amps.copy())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def _check_limit(n: int, limit: int) -> None:
    if n > limit:
        raise OracleError(f"{n} qubits exceeds the oracle limit of {limit}")


def gate_matrix(name: str) -> np.ndarray:
    try:
        return GATES[name.upper()]
    except KeyError:
        raise OracleError(f"unknown gate {name!r}") from None


def _basis_masks(p: PauliOperator) -> tuple[int, int]:
    n = p.n
    xm = zm = 0
    for j in range(n):
        if (p.x >> j) & 1:
            xm |= 1 << (n - 1 - j)
        if (p.z >> j) & 1:
            zm |= 1 << (n - 1 - j)
    return xm, zm


def apply_pauli(state: DenseState, p: PauliOperator) -> DenseState:
    """Return ``p |state>`` including the phase of ``p``."""
    if p.n != state.n:
        raise OracleError(f"dimension mismatch: {p.n} vs {state.n} qubits")
    xm, zm = _basis_masks(p)
    idx = np.arange(2 ** state.n)
    signs = 1 - 2 * (np.bitwise_count(idx & zm).astype(np.int64) & 1)
    out = np.empty_like(state.amps)
    out[idx ^ xm] = _PHASES[p.phase] * signs * state.amps
    return DenseState(state.n, out)


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    dim = 2 ** p.n
    cols = [apply_pauli(DenseState.basis(p.n, b), p).amps for b in range(dim)]
    return np.stack(cols, axis=1)


def apply(state: DenseState, gate: str, *qubits: int) -> DenseState:
    """Apply R, P, X, Y, Z to one qubit or CNOT(control, target); 0-based."""
    n = state.n
    name = gate.upper()
    for q in qubits:
        if not 0 <= q < n:
            raise OracleError(f"qubit index {q} out of range for {n} qubits")
    if name == "CNOT":
        c, t = qubits
        if c == t:
            raise OracleError("CNOT control and target must differ")
        idx = np.arange(2 ** n)
        cbit, tbit = 1 << (n - 1 - c), 1 << (n - 1 - t)
        src = np.where(idx & cbit, idx ^ tbit, idx)
        return DenseState(n, state.amps[src])
    if len(qubits) != 1:
        raise OracleError(f"{name} acts on one qubit")
    (q,) = qubits
    u = gate_matrix(name)
    psi = state.amps.reshape(2 ** q, 2, 2 ** (n - q - 1))
    return DenseState(n, np.einsum("ab,ibj->iaj", u, psi).reshape(-1))


def measure_pauli(state: DenseState, a: PauliOperator, rng: np.random.Generator | None = None,
                  outcome: int | None = None) -> tuple[DenseState, int, float]:
    """Projective measurement of Hermitian ``a``.

    Returns ``(post_state, outcome, p_plus)``. The outcome is forced when
    ``outcome`` is given (zero-probability requests raise), otherwise drawn
    from ``rng`` with the Born probabilities.
    """
    if not a.is_hermitian:
        raise OracleError(f"cannot measure non-Hermitian {a}")
    a_psi = apply_pauli(state, a).amps
    plus = (state.amps + a_psi) / 2
    minus = (state.amps - a_psi) / 2
    p_plus = float(np.vdot(plus, plus).real)
    p_minus = float(np.vdot(minus, minus).real)
    if outcome is None:
        if rng is None:
            raise OracleError("need a generator or a forced outcome")
        outcome = 1 if rng.random() < p_plus / (p_plus + p_minus) else -1
    if outcome not in (1, -1):
        raise OracleError(f"outcome must be +1 or -1, got {outcome}")
    branch, prob = (plus, p_plus) if outcome == 1 else (minus, p_minus)
    if prob < 1e-12:
        raise OracleError(f"outcome {outcome:+d} for {a} has zero probability")
    return DenseState(state.n, branch / np.sqrt(prob)), outcome, p_plus


def fix_global_phase(amps: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Rotate so the first nonzero amplitude is positive real."""
    nz = np.flatnonzero(np.abs(amps) > tol)
    if len(nz) == 0:
        return amps
    first = amps[nz[0]]
    return amps * (abs(first) / first)


def stabilizer_to_state(gens: GeneratorSet | Sequence[PauliOperator], limit: int = DEFAULT_LIMIT) -> DenseState:
    """The +1 eigenvector of a full-rank stabilizer.

    Projects successive computational basis states until one survives, since
    a fixed starting state can be annihilated (e.g. by ``-ZZ``).
    """
    if not isinstance(gens, GeneratorSet):
        gens = GeneratorSet(gens[0].n, tuple(gens))
    n = gens.n
    _check_limit(n, limit)
    for g in gens:
        if not g.is_hermitian:
            raise OracleError(f"stabilizer element {g} is not Hermitian")
    if not gens.is_abelian():
        raise OracleError("stabilizer generators do not commute")
    if len(canonicalize(gens)) != n:
        raise OracleError(f"stabilizer has rank {len(canonicalize(gens))}, need {n}")
    for b in range(2 ** n):
        st = DenseState.basis(n, b)
        for g in gens:
            st = DenseState(n, (st.amps + apply_pauli(st, g).amps) / 2)
        nrm = st.norm
        if nrm > 1e-9:
            return DenseState(n, fix_global_phase(st.amps / nrm))
    raise OracleError("stabilizer is inconsistent (-I lies in the group)")


def tableau_state(t: Tableau, data: np.ndarray | None = None, limit: int = DEFAULT_LIMIT) -> DenseState:
    """State described by ``t`` with logical amplitudes ``data``.

    ``data`` has one amplitude per logical basis state, ordered like the
    tableau's logical pairs (first pair most significant). The logical zero
    state is fixed by the first-nonzero-positive convention and the other
    logical basis states are reached by applying the X-bar images.
    """
    m = len(t.logicals)
    if data is None:
        data = np.zeros(2 ** m, dtype=complex)
        data[0] = 1
    data = np.asarray(data, dtype=complex)
    if data.shape != (2 ** m,):
        raise OracleError(f"expected {2 ** m} logical amplitudes, got {data.shape}")
    zbars = [zb for _, _, zb in t.logicals]
    xbars = [xb for _, xb, _ in t.logicals]
    zero = stabilizer_to_state(list(t.stabilizer) + zbars, limit)
    out = np.zeros(2 ** t.n, dtype=complex)
    for b in range(2 ** m):
        if abs(data[b]) < 1e-15:
            continue
        st = zero
        for j in range(m):
            if (b >> (m - 1 - j)) & 1:
                st = apply_pauli(st, xbars[j])
        out += data[b] * st.amps
    return DenseState(t.n, out / np.linalg.norm(out))


def tableau_to_unitary(t: Tableau, limit: int = DEFAULT_LIMIT) -> np.ndarray:
    """Rebuild the unitary of a full Clifford map by following basis states."""
    if t.k != 0:
        raise OracleError("tableau has stabilizer rows; it does not describe a unitary")
    _check_limit(t.n, limit)
    dim = 2 ** t.n
    cols = []
    for b in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[b] = 1
        cols.append(tableau_state(t, e, limit).amps)
    return np.stack(cols, axis=1)


def circuit_unitary(n: int, gates: Sequence[tuple], limit: int = DEFAULT_LIMIT) -> np.ndarray:
    """Compose gate matrices directly; ``gates`` holds ``(name, *qubits)``."""
    _check_limit(n, limit)
    cols = []
    for b in range(2 ** n):
        st = DenseState.basis(n, b)
        for name, *qs in gates:
            st = apply(st, name, *qs)
        cols.append(st.amps)
    return np.stack(cols, axis=1)


def drop_qubit(state: DenseState, q: int, tol: float = 1e-9) -> DenseState:
    """Factor out qubit ``q``, which must be unentangled from the rest."""
    n = state.n
    psi = state.amps.reshape(2 ** q, 2, 2 ** (n - q - 1))
    branches = [psi[:, i, :].reshape(-1) for i in (0, 1)]
    norms = [np.linalg.norm(v) for v in branches]
    keep = branches[int(np.argmax(norms))]
    keep = keep / np.linalg.norm(keep)
    for v in branches:
        overlap = np.vdot(keep, v)
        if np.linalg.norm(v - overlap * keep) > tol:
            raise OracleError(f"qubit {q + 1} is entangled; cannot drop it")
    return DenseState(n - 1, keep)


def fidelity(a: DenseState | np.ndarray, b: DenseState | np.ndarray) -> float:
    va = a.amps if isinstance(a, DenseState) else np.asarray(a)
    vb = b.amps if isinstance(b, DenseState) else np.asarray(b)
    return float(abs(np.vdot(va, vb)) ** 2 / (np.vdot(va, va).real * np.vdot(vb, vb).real))


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-10) -> bool:
    k = np.argmax(np.abs(v))
    if abs(v.flat[k]) < tol or abs(u.flat[k]) < tol:
        return False
    ph = u.flat[k] / v.flat[k]
    return bool(np.allclose(u, ph * v, atol=tol) and abs(abs(ph) - 1) < tol)


def format_amplitudes(amps: np.ndarray) -> str:
    """One ``index real imag`` line per amplitude, 17 significant digits."""
    # adding 0.0 turns -0.0 into 0.0
    return "".join(f"{i} {a.real + 0.0:.17g} {a.imag + 0.0:.17g}\n" for i, a in enumerate(np.asarray(amps)))


def format_matrix(u: np.ndarray) -> str:
    """Row-major dump: ``row col real imag`` per entry."""
    lines = []
    for r in range(u.shape[0]):
        for c in range(u.shape[1]):
            a = u[r, c]
            lines.append(f"{r} {c} {a.real + 0.0:.17g} {a.imag + 0.0:.17g}\n")
    return "".join(lines)


def cross_validate(circuit, seed: int = 0, limit: int = DEFAULT_LIMIT, **kwargs):
    """Run ``circuit`` on tableau and oracle in lockstep; see :func:`stabsim.circuit.run`."""
    from .circuit import run

    return run(circuit, backend="both", seed=seed, oracle_limit=limit, **kwargs)


def is_stabilized(state: DenseState, p: PauliOperator, tol: float = 1e-10) -> bool:
    return bool(np.linalg.norm(apply_pauli(state, p).amps - state.amps) < tol)


def expectation(state: DenseState, p: PauliOperator) -> complex:
    return complex(np.vdot(state.amps, apply_pauli(state, p).amps))


def conjugation_matrix(u: np.ndarray, p: PauliOperator) -> np.ndarray:
    return u @ pauli_matrix(p) @ u.conj().T
