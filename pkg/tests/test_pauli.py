import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabsim import oracle
from stabsim.pauli import (GeneratorSet, PauliError, PauliOperator, canonicalize, commutes,
                           conjugate_sign_flip, membership, multiply, parse_pauli, rank, weight)
from stabsim.tableau import InputKind, Tableau

from strategies import gate_lists, pauli_pairs, paulis, tick

P = parse_pauli


# parse / display -------------------------------------------------------
def test_parse_plus_xx():
    p = P("+XX", 2)
    assert (p.x_bits, p.z_bits, p.sign_exp) == ((1, 1), (0, 0), 0)


def test_parse_minus_zy_is_negated_product():
    z_y = PauliOperator.single(2, 0, "Z") * PauliOperator.single(2, 1, "Y")
    assert P("-ZY", 2) == -z_y
    assert str(P("-ZY")) == "-ZY"


def test_bare_y_raw_phase():
    y = P("Y")
    assert (y.x, y.z, y.phase) == (1, 1, 1)
    assert str(y) == "+Y"


@pytest.mark.parametrize("text,msg", [("XIZ", "length"), ("XQ", "illegal"), ("+-X", "malformed"), ("", "no Pauli letters")])
def test_parse_errors(text, msg):
    with pytest.raises(PauliError, match=msg):
        P(text, 2)


def test_parse_signs_normalize():
    assert str(P("X")) == "+X"
    assert str(P("i Z".replace(" ", ""))) == "+iZ"
    assert str(P("-iYY")) == "-iYY"
    assert P("xz") == P("XZ")


# products --------------------------------------------------------------
def test_swap_example_product():
    assert multiply(P("XI"), P("XX")) == P("+IX")


def test_x_times_z_is_minus_i_y():
    assert multiply(P("X"), P("Z")) == P("-iY")


def test_identity_product():
    assert multiply(P("I"), P("I")) == P("I")


def test_dimension_mismatch():
    with pytest.raises(PauliError):
        multiply(P("X"), P("XX"))
    with pytest.raises(PauliError):
        commutes(P("X"), P("XX"))


def test_commutes_examples():
    assert not commutes(P("X"), P("Z"))
    assert commutes(P("XX"), P("ZZ"))
    assert commutes(P("-iXYZ"), P("III"))


def test_weight_examples():
    assert weight(P("IY")) == 1
    assert weight(P("XZZXI")) == 4
    assert weight(P("III")) == 0


def test_conjugate_sign_flip_examples():
    assert conjugate_sign_flip(P("YI"), P("XX")) == P("-XX")
    assert conjugate_sign_flip(P("XZ"), P("ZZ")) == P("-ZZ")
    assert conjugate_sign_flip(P("XX"), P("XX")) == P("XX")
    with pytest.raises(PauliError):
        conjugate_sign_flip(P("iXX"), P("ZZ"))


def test_single_qubit_table_against_matrices():
    # all 16 signed letter products, checked against 2x2 matrices
    for a, b in itertools.product("IXYZ", repeat=2):
        for sa, sb in itertools.product(range(4), repeat=2):
            pa, pb = P(a).with_sign(sa), P(b).with_sign(sb)
            m = oracle.pauli_matrix(pa) @ oracle.pauli_matrix(pb)
            np.testing.assert_allclose(oracle.pauli_matrix(pa * pb), m, atol=1e-12)


# canonical form and membership ----------------------------------------
def test_bell_group_canonical_forms_agree():
    a = GeneratorSet.from_strings(["XX", "ZZ"])
    b = GeneratorSet.from_strings(["XX", "-YY"])
    assert canonicalize(a) == canonicalize(b)


def test_rank_examples():
    assert rank(GeneratorSet.from_strings(["ZI", "ZI"])) == 1
    assert len(canonicalize(GeneratorSet.from_strings(["ZI", "ZI"]))) == 1
    assert rank(GeneratorSet.from_strings(["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"])) == 4


def test_membership_minus_yy_in_bell_group():
    m = membership(GeneratorSet.from_strings(["XX", "ZZ"]), P("-YY"))
    assert m.in_group and m.phase == 0 and m.sign == 1


def test_membership_disjoint():
    assert not membership(GeneratorSet.from_strings(["ZI"]), P("IZ"))


def test_membership_yyyy_sign():
    # XXXX.ZZZZ = (XZ)^4 = (-iY)^4 = +YYYY, so +YYYY itself is a group element
    gens = GeneratorSet.from_strings(["XXXX", "ZZZZ"])
    assert multiply(P("XXXX"), P("ZZZZ")) == P("+YYYY")
    m = membership(gens, P("YYYY"))
    assert m.in_group and m.sign == 1 and m.mask == 0b11
    assert membership(gens, P("-YYYY")).sign == -1


# properties ------------------------------------------------------------
@settings(max_examples=1000, deadline=None)
@given(paulis())
def test_prop_round_trip(p):
    tick()
    assert parse_pauli(str(p), p.n) == p


@settings(max_examples=800, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(paulis(n), paulis(n), paulis(n))))
def test_prop_associative_with_unit(abc):
    tick()
    a, b, c = abc
    assert (a * b) * c == a * (b * c)
    assert a * PauliOperator.identity(a.n) == a == PauliOperator.identity(a.n) * a


@settings(max_examples=800, deadline=None)
@given(paulis(hermitian=True))
def test_prop_hermitian_squares_to_identity(p):
    tick()
    assert p * p == PauliOperator.identity(p.n)


@settings(max_examples=800, deadline=None)
@given(pauli_pairs())
def test_prop_commutes_iff_products_equal(ab):
    tick()
    a, b = ab
    assert commutes(a, b) == (a * b == b * a)
    if not commutes(a, b):
        assert a * b == -(b * a)


@settings(max_examples=800, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(paulis(n, hermitian=True), paulis(n))))
def test_prop_conjugate_sign_flip(em):
    tick()
    e, m = em
    out = conjugate_sign_flip(e, m)
    assert out == (m if commutes(e, m) else -m)
    assert out == e * m * e.dagger()


@settings(max_examples=200, deadline=None)
@given(pauli_pairs(max_n=4))
def test_prop_product_matches_matrices(ab):
    tick()
    a, b = ab
    np.testing.assert_allclose(oracle.pauli_matrix(a * b), oracle.pauli_matrix(a) @ oracle.pauli_matrix(b),
                               atol=1e-12)


@st.composite
def stabilizer_sets(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(0, n))
    t = Tableau.init(n, [InputKind.FIXED_ZERO] * k + [InputKind.DATA] * (n - k))
    for name, *qs in draw(gate_lists(n, 25)):
        t.apply_gate(name, *qs)
    return t.stabilizer


@settings(max_examples=400, deadline=None)
@given(stabilizer_sets())
def test_prop_canonicalize_idempotent(gens):
    tick()
    c = canonicalize(gens)
    assert canonicalize(c) == c
    assert rank(c) == rank(gens) == len(c)


@settings(max_examples=300, deadline=None)
@given(stabilizer_sets(), st.data())
def test_prop_membership_of_products(gens, data):
    tick()
    for g in gens:
        m = membership(gens, g)
        assert m.in_group and m.phase == 0
    if len(gens):
        mask = data.draw(st.integers(0, 2 ** len(gens) - 1))
        e = gens.product(mask)
        m = membership(gens, e)
        assert m.in_group and m.phase == 0 and m.mask == mask
        assert membership(gens, -e).sign == -1


@settings(max_examples=300, deadline=None)
@given(stabilizer_sets(), st.permutations(range(6)), st.data())
def test_prop_canonical_form_ignores_order_and_products(gens, perm, data):
    tick()
    gs = list(gens)
    if not gs:
        return
    order = [p for p in perm if p < len(gs)]
    shuffled = [gs[i] for i in order]
    # replace one generator by its product with another: same group
    i, j = data.draw(st.integers(0, len(gs) - 1)), data.draw(st.integers(0, len(gs) - 1))
    if i != j:
        shuffled[i] = shuffled[i] * shuffled[j]
    assert canonicalize(GeneratorSet(gens.n, tuple(shuffled))) == canonicalize(gens)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10).flatmap(lambda k: st.tuples(st.just(k), gate_lists(k + 1, 30))))
def test_prop_group_order(kg):
    tick()
    k, gates = kg
    n = k + 1
    t = Tableau.init(n, [InputKind.FIXED_ZERO] * k + [InputKind.DATA])
    for name, *qs in gates:
        t.apply_gate(name, *qs)
    gens = canonicalize(t.stabilizer)
    elements = {gens.product(mask) for mask in range(2**k)}
    assert len(elements) == 2**k
