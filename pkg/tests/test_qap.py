import random

import pytest

from zkpol.circuit import CircuitBuilder, compute_witness, satisfies
from zkpol.errors import FieldTooSmall, InternalInconsistency, MissingInput, UnsatisfiedWitness
from zkpol.field import PrimeField
from zkpol.polynomial import Polynomial
from zkpol.qap import assemble, circuit_to_qap
from helpers import random_assignment, random_circuit

F = PrimeField(0x4559CDF84098BDF)


def one_op():
    b = CircuitBuilder(F)
    x, y = b.input("x"), b.input("y")
    b.mul({x: 1}, {y: 1}, "z")
    return b.build(0)


def test_single_operation_qap():
    q = circuit_to_qap(one_op())
    assert q.target == Polynomial([F.p - 1, 1], F)
    one = Polynomial([1], F)
    assert q.l(1) == one and q.r(2) == one and q.o(3) == one
    zero = Polynomial.zero(F)
    assert q.l(0) == q.l(2) == q.l(3) == zero
    assert q.r(0) == q.r(1) == q.o(1) == zero


def test_two_operation_interpolation():
    b = CircuitBuilder(F)
    a = b.input("a")
    bb = b.mul({a: 1}, {a: 1}, "b")
    b.mul({bb: 1}, {a: 1}, "c")
    q = circuit_to_qap(b.build(0))
    assert q.l(a) == Polynomial([2, F.p - 1], F)   # 2 - x
    assert q.r(a) == Polynomial([1], F)
    assert q.target.degree == 2


def test_witness_and_assemble_small():
    c = one_op()
    w = compute_witness(c, {"x": 3, "y": 4})
    assert w.values == (1, 3, 4, 12)
    L, R, O, h = assemble(circuit_to_qap(c), w)
    assert (L * R - O).evaluate(1) == 0
    with pytest.raises(UnsatisfiedWitness):
        assemble(circuit_to_qap(c), w.replace(3, 13))


def test_missing_input():
    with pytest.raises(MissingInput):
        compute_witness(one_op(), {"x": 3})


def test_double_assignment_rejected():
    b = CircuitBuilder(F)
    x = b.input("x")
    b.enforce({x: 1}, {x: 1}, x)
    with pytest.raises(InternalInconsistency):
        b.build(0)


def test_field_too_small():
    f = PrimeField(5)
    b = CircuitBuilder(f)
    x = b.input("x")
    for j in range(5):
        x = b.mul({x: 1}, {x: 1}, f"w{j}")
    with pytest.raises(FieldTooSmall):
        circuit_to_qap(b.build(0))


def test_interpolation_matches_coefficients():
    rng = random.Random(9)
    for _ in range(30):
        c = random_circuit(F, rng)
        q = circuit_to_qap(c)
        for j, op in enumerate(c.operations, 1):
            left, right = dict(op.left), dict(op.right)
            for i in range(c.num_vars + 1):
                assert q.l(i).evaluate(j) == left.get(i, 0)
                assert q.r(i).evaluate(j) == right.get(i, 0)
                assert q.o(i).evaluate(j) == (1 if op.output == i else 0)
        for i in range(c.num_vars + 1):
            assert q.l(i).degree <= q.d - 1


def test_evaluate_at_matches_polynomials():
    rng = random.Random(4)
    c = random_circuit(F, rng, 8)
    q = circuit_to_qap(c)
    s = 10**12 + 39
    ls, rs, os_ = q.evaluate_at(s)
    for i in range(q.n + 1):
        assert ls[i] == q.l(i).evaluate(s)
        assert rs[i] == q.r(i).evaluate(s)
        assert os_[i] == q.o(i).evaluate(s)


def test_divisibility_agrees_with_brute_force():
    rng = random.Random(21)
    for trial in range(200):
        c = random_circuit(F, rng)
        w = random_assignment(c, rng, corrupt=trial % 2 == 1)
        q = circuit_to_qap(c)
        try:
            L, R, O, h = assemble(q, w)
            divisible = True
            assert h.degree <= max(q.d - 2, 0)
            assert all((L * R - O).evaluate(j) == 0 for j in range(1, q.d + 1))
        except UnsatisfiedWitness:
            divisible = False
        assert divisible == satisfies(c, w.values)


def test_export_lists_nonzero_polynomials():
    text = circuit_to_qap(one_op()).export()
    assert text.splitlines()[0] == "zkpol-qap v1 d 1 m 0 n 3"
    assert "l 1 1" in text and "r 2 1" in text and "o 3 1" in text
