import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabsim import oracle
from stabsim.circuit import parse, run
from stabsim.cli import read_source
from stabsim.oracle import DenseState, OracleError
from stabsim.pauli import GeneratorSet, parse_pauli
from stabsim.tableau import InputKind, Tableau

from strategies import conjugate, gate_lists, paulis, tick

P = parse_pauli
S2 = 1 / np.sqrt(2)

HITTITE = 0.5 * np.array([[1, 1j, 1, 1j], [1, -1j, 1, -1j], [-1, 1j, 1, -1j], [1, 1j, -1, -1j]])


def test_gate_actions():
    np.testing.assert_allclose(oracle.apply(DenseState.zero(1), "R", 0).amps, [S2, S2])
    np.testing.assert_allclose(oracle.apply(DenseState.basis(1, 1), "P", 0).amps, [0, 1j])
    np.testing.assert_allclose(oracle.apply(DenseState.basis(2, 0b10), "CNOT", 0, 1).amps, [0, 0, 0, 1])
    # qubit 1 is the most significant index bit
    np.testing.assert_allclose(oracle.apply(DenseState.zero(2), "X", 1).amps, [0, 1, 0, 0])


def test_apply_errors():
    with pytest.raises(OracleError):
        oracle.apply(DenseState.zero(2), "R", 2)
    with pytest.raises(OracleError):
        oracle.apply(DenseState.zero(2), "T", 0)
    with pytest.raises(OracleError, match="limit"):
        oracle.stabilizer_to_state(GeneratorSet.from_strings(["Z"] * 1 + []), limit=0)


def test_gates_unitary():
    for name in ("R", "P", "X", "Y", "Z", "CNOT"):
        u = oracle.gate_matrix(name)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(len(u)), atol=1e-10)


def test_measure_z_on_zero():
    st_, out, p = oracle.measure_pauli(DenseState.zero(1), P("Z"), np.random.default_rng(0))
    assert out == 1 and p == pytest.approx(1)
    np.testing.assert_allclose(st_.amps, [1, 0])


def test_measure_iy_branch():
    a, b = 0.6, 0.8j
    psi = DenseState(2, np.array([a, 0, 0, b]))
    st_, out, p = oracle.measure_pauli(psi, P("IY"), outcome=1)
    assert p == pytest.approx(0.5)
    expect = np.kron([a, -1j * b], [1, 1j])
    assert oracle.fidelity(st_, expect) == pytest.approx(1, abs=1e-12)
    with pytest.raises(OracleError):
        oracle.measure_pauli(psi, P("iIY"), outcome=1)


def test_measure_xx_on_bell_deterministic():
    bell = DenseState(2, np.array([S2, 0, 0, S2]))
    for seed in range(5):
        _, out, p = oracle.measure_pauli(bell, P("XX"), np.random.default_rng(seed))
        assert out == 1 and p == pytest.approx(1)
    with pytest.raises(OracleError, match="probability"):
        oracle.measure_pauli(bell, P("XX"), outcome=-1)


def test_stabilizer_to_state_examples():
    np.testing.assert_allclose(oracle.stabilizer_to_state(GeneratorSet.from_strings(["XX", "ZZ"])).amps,
                               [S2, 0, 0, S2], atol=1e-12)
    np.testing.assert_allclose(oracle.stabilizer_to_state(GeneratorSet.from_strings(["-XX", "-ZZ"])).amps,
                               [0, S2, -S2, 0], atol=1e-12)
    np.testing.assert_allclose(oracle.stabilizer_to_state([P("Z")]).amps, [1, 0])


def test_stabilizer_to_state_inconsistent():
    with pytest.raises(OracleError):
        oracle.stabilizer_to_state([P("ZI"), P("-ZI")])
    with pytest.raises(OracleError):
        oracle.stabilizer_to_state([P("ZI")])


def test_hittite_unitary_exact():
    t = Tableau.init(2).r(0).p(1).cnot(0, 1).r(1).cnot(0, 1)
    np.testing.assert_allclose(oracle.tableau_to_unitary(t), HITTITE, atol=1e-12)


def test_identity_and_swap_unitaries():
    np.testing.assert_allclose(oracle.tableau_to_unitary(Tableau.init(3)), np.eye(8), atol=1e-12)
    t = Tableau.init(2).cnot(0, 1).cnot(1, 0).cnot(0, 1)
    u = oracle.tableau_to_unitary(t)
    direct = oracle.circuit_unitary(2, [("CNOT", 0, 1), ("CNOT", 1, 0), ("CNOT", 0, 1)])
    np.testing.assert_allclose(u, direct, atol=1e-12)
    for b1 in (0, 1):
        for b2 in (0, 1):
            col = u[:, 2 * b1 + b2]
            assert abs(col[2 * b2 + b1]) == pytest.approx(1)
    with pytest.raises(OracleError):
        oracle.tableau_to_unitary(Tableau.init(2, [InputKind.DATA, InputKind.FIXED_ZERO]))


def test_cross_validate_bell():
    tr = oracle.cross_validate(parse(read_source("fig5_bell", "circuit")))
    assert tr.fidelities == pytest.approx([1, 1, 1], abs=1e-12)
    assert all(tr.stabilizer_checks)


def test_cross_validate_empty():
    tr = oracle.cross_validate(parse("qubits 1\n"))
    assert tr.fidelities == [pytest.approx(1)]


def test_cross_validate_limit():
    with pytest.raises(Exception, match="oracle limit"):
        oracle.cross_validate(parse("qubits 5\nR 1\n"), limit=4)


@pytest.mark.parametrize("alpha", [[1, 0], [0, 1], [S2, S2], [0.6, 0.8j]])
def test_pgate_circuit_is_p_dagger(alpha):
    c = parse(read_source("fig6_pgate", "circuit"))
    pdg = np.diag([1, -1j])
    for seed in range(6):
        tr = run(c, "both", seed, data=np.array(alpha))
        assert min(tr.fidelities) == pytest.approx(1, abs=1e-12)
        expect = np.kron(pdg @ np.array(alpha), [S2, 1j * S2])
        assert oracle.fidelity(tr.state, expect) == pytest.approx(1, abs=1e-12)


def test_drop_qubit_entangled():
    with pytest.raises(OracleError, match="entangled"):
        oracle.drop_qubit(DenseState(2, np.array([S2, 0, 0, S2])), 0)
    out = oracle.drop_qubit(DenseState(2, np.array([0, 0, 0.6, 0.8])), 0)
    np.testing.assert_allclose(out.amps, [0.6, 0.8])


def test_format_dumps():
    assert oracle.format_amplitudes(np.array([S2, -0.5j])) == "0 0.70710678118654746 0\n1 0 -0.5\n"
    assert oracle.format_matrix(np.eye(1)) == "0 0 1 0\n"


# properties ------------------------------------------------------------
@st.composite
def circuits(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    return n, draw(gate_lists(n, 15))


def _tableau(n, gates):
    t = Tableau.init(n)
    for name, *qs in gates:
        t.apply_gate(name, *qs)
    return t


@settings(max_examples=300, deadline=None)
@given(circuits(), st.data())
def test_prop_conjugation_consistency(circ, data):
    tick()
    n, gates = circ
    N = data.draw(paulis(n))
    u = oracle.circuit_unitary(n, gates)
    t = _tableau(n, gates)
    np.testing.assert_allclose(oracle.conjugation_matrix(u, N), oracle.pauli_matrix(conjugate(t, N)), atol=1e-10)


@settings(max_examples=300, deadline=None)
@given(circuits(), st.data())
def test_prop_unitary_reconstruction(circ, data):
    tick()
    n, gates = circ
    u = oracle.tableau_to_unitary(_tableau(n, gates))
    direct = oracle.circuit_unitary(n, gates)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(2**n), atol=1e-10)
    assert oracle.equal_up_to_phase(u, direct)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(st.just(n), gate_lists(n, 25))))
def test_prop_stabilizer_state_eigenvector(ng):
    tick()
    n, gates = ng
    t = Tableau.init(n, [InputKind.FIXED_ZERO] * n)
    for name, *qs in gates:
        t.apply_gate(name, *qs)
    psi = oracle.stabilizer_to_state(t.stabilizer)
    assert abs(np.linalg.norm(psi.amps) - 1) < 1e-12
    first = psi.amps[np.flatnonzero(np.abs(psi.amps) > 1e-9)[0]]
    assert abs(first.imag) < 1e-12 and first.real > 0
    for g in t.stabilizer:
        assert np.linalg.norm(oracle.apply_pauli(psi, g).amps - psi.amps) < 1e-10
    # same state as running the gates densely from |0...0>
    dense = DenseState.zero(n)
    for name, *qs in gates:
        dense = oracle.apply(dense, name, *qs)
    assert oracle.fidelity(psi, dense) == pytest.approx(1, abs=1e-10)


@settings(max_examples=300, deadline=None)
@given(circuits(), st.data())
def test_prop_norm_preserved(circ, data):
    tick()
    n, gates = circ
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32)))
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    psi = DenseState(n, v / np.linalg.norm(v))
    for name, *qs in gates:
        psi = oracle.apply(psi, name, *qs)
        assert abs(psi.norm - 1) < 1e-12
