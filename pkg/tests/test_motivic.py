import pytest

from panache.exactla import GF, QQ, Matrix
from panache.extmod import ExtClass
from panache.genext import GradedFrame, from_level1
from panache.motivic import (CancelToken, Cancelled, MotivicError, classify_star, end_dimension, end_scalar_check,
                             graded_independence_arithmetic, graded_independent, is_maximal, maximality_criterion,
                             tns_genext, totally_nonsplit, u_radical, w_minus1_end_dim)
from panache.repcat import ModelSignature, WeightedRep, pure, unit

SIG = ModelSignature.make(QQ, [("u", -1), ("v", -1), ("w", -2)])


def kummer(c=1):
    return ExtClass(unit(SIG), pure(SIG, -1), [Matrix(QQ, [[c]]), Matrix(QQ, [[0]]), Matrix(QQ, [[0]])])


def test_kummer_class_is_totally_nonsplit():
    assert totally_nonsplit(kummer())
    assert not totally_nonsplit(kummer(0))


def test_two_dimensional_target_needs_two_generators():
    h = pure(SIG, -1, 2)
    one = unit(SIG)
    e = ExtClass(one, h, [Matrix(QQ, [[1], [0]]), Matrix(QQ, [[0], [1]]), Matrix(QQ, [[0], [0]])])
    assert totally_nonsplit(e)
    e = ExtClass(one, h, [Matrix(QQ, [[1], [0]]), Matrix(QQ, [[2], [0]]), Matrix(QQ, [[0], [0]])])
    assert not totally_nonsplit(e)


def test_rigidity_for_totally_nonsplit():
    assert end_dimension(kummer()) == 1
    assert end_scalar_check(kummer())
    assert end_dimension(kummer(0)) == 2


def test_rigidity_needs_characteristic_zero():
    sig = ModelSignature.make(GF(3), [("u", -1)])
    e = ExtClass(unit(sig), pure(sig, -1), [Matrix(GF(3), [[1]])])
    with pytest.raises(MotivicError):
        end_scalar_check(e)


def test_graded_independence_examples():
    assert graded_independence_arithmetic((0, -1, -3))
    assert not graded_independence_arithmetic((0, -1, -2))
    sig = ModelSignature.make(QQ, [("a", -1), ("b", -2), ("c", -3)])
    assert graded_independent(GradedFrame.from_weights(sig, (-3, -1, 0)))
    assert not graded_independent(GradedFrame.from_weights(sig, (-2, -1, 0)))


def test_u_radical_of_kummer_object():
    x = WeightedRep(SIG, {-1: 1, 0: 1}, (Matrix(QQ, [[0, 1], [0, 0]]), Matrix.zeros(QQ, 2, 2),
                                          Matrix.zeros(QQ, 2, 2)))
    assert u_radical(x).dim == 1
    assert w_minus1_end_dim(x) == 1
    assert is_maximal(x)


def test_u_radical_of_split_object_is_zero():
    x = WeightedRep(SIG, {-1: 1, 0: 1})
    assert u_radical(x).dim == 0
    assert not is_maximal(x)


def test_u_radical_cancellation():
    tok = CancelToken()
    tok.cancel()
    with pytest.raises(Cancelled):
        u_radical(kummer_object_three(), tok)


def kummer_object_three():
    sig = ModelSignature.make(QQ, [("a", -1), ("b", -2)])
    ops = (Matrix(QQ, [[0, 1, 0], [0, 0, 1], [0, 0, 0]]), Matrix(QQ, [[0, 0, 1], [0, 0, 0], [0, 0, 0]]))
    return WeightedRep(sig, {-2: 1, -1: 1, 0: 1}, ops)


def test_maximality_criterion_reports_both_sides():
    sig = ModelSignature.make(QQ, [("a", -1), ("b", -2), ("c", -3)])
    ops = (Matrix(QQ, [[0, 0, 0], [0, 0, 1], [0, 0, 0]]), Matrix.zeros(QQ, 3, 3),
           Matrix(QQ, [[0, 0, 0], [0, 0, 0], [0, 0, 0]]))
    x = WeightedRep(sig, {-3: 1, -1: 1, 0: 1}, ops)
    m, adj = maximality_criterion(x)
    assert adj == [False, True]
    assert m is False


def test_classify_star_level_one():
    sig = ModelSignature.make(QQ, [("a", -1), ("b", -2), ("c", -3)])
    frame = GradedFrame.from_weights(sig, (-3, -1, 0))
    rep = classify_star(frame, 1)
    assert [f.ext_dim for f in rep.factors] == [1, 1]
    assert [f.orbit_space for f in rep.factors] == ["P^0", "P^0"]
    assert not rep.empty


def test_classify_star_level_two_fiber():
    sig = ModelSignature.make(QQ, [("a", -1), ("b", -2), ("c", -3)])
    frame = GradedFrame.from_weights(sig, (-3, -1, 0))
    z = Matrix(QQ, [[0]])
    one = Matrix(QQ, [[1]])
    pick = from_level1(frame, [ExtClass(frame.a(2), frame.a(1), [z, one, z]),
                               ExtClass(frame.a(3), frame.a(2), [one, z, z])])
    assert tns_genext(pick)
    rep = classify_star(frame, 2, pick)
    assert rep.fiber_dim == 1


def test_classify_star_rejects_dependent_frame():
    sig = ModelSignature.make(QQ, [("a", -1)])
    with pytest.raises(MotivicError):
        classify_star(GradedFrame.from_weights(sig, (-2, -1, 0)), 1)
