import random

import pytest

from panache.exactla import QQ, Matrix
from panache.extmod import (ExtClass, baer_sum, class_of, ext1_dim, ext1_space, is_split, pullback, pushforward,
                            realize, transfer_inverse, transfer_unit, yoneda_obstruction)
from panache.repcat import (ModelError, ModelSignature, RepMorphism, SignatureMismatch, build_ops, internal_hom,
                            is_isomorphic, pure, random_rep, unit)

SIG = ModelSignature.make(QQ, [("u", -1)])
SIG2 = ModelSignature.make(QQ, [("u", -1), ("v", -2)])


def test_unit_by_degree_minus_one_has_dim_one():
    assert ext1_dim(unit(SIG), pure(SIG, -1)) == 1


def test_same_degree_has_dim_zero():
    assert ext1_dim(pure(SIG, -1), pure(SIG, -1)) == 0


def test_zero_class_realizes_split():
    e = ExtClass.zero(unit(SIG), pure(SIG, -1))
    s = realize(e)
    assert is_isomorphic(s.mid, build_ops([pure(SIG, -1), unit(SIG)])) is not None


def test_roundtrip_random_classes():
    rng = random.Random(1)
    for _ in range(20):
        m = random_rep(SIG2, {0: rng.randint(1, 2), -1: rng.randint(0, 1)}, rng)
        n = random_rep(SIG2, {-2: rng.randint(1, 2), -1: rng.randint(0, 1)}, rng)
        e = ExtClass.random(m, n, rng)
        assert class_of(realize(e)) == e


def test_kummer_cocycle_read_off():
    e = ExtClass(unit(SIG), pure(SIG, -1), [Matrix(QQ, [[1]])])
    assert class_of(realize(e)).cocycle == (Matrix(QQ, [[1]]),)


def test_baer_unit_and_inverse():
    _, (b,) = ext1_space(unit(SIG), pure(SIG, -1))
    z = ExtClass.zero(unit(SIG), pure(SIG, -1))
    assert baer_sum(b, z) == b
    assert is_split(b + (-b))
    assert not is_split(b)


def test_pushforward_identity_and_doubling():
    _, (b,) = ext1_space(unit(SIG), pure(SIG, -1))
    by = b.by
    assert pushforward(b, RepMorphism.identity(by)) == b
    doubled = pushforward(b, RepMorphism(by, by, Matrix(QQ, [[2]])))
    assert doubled.reduced == tuple(m.scale(2) for m in b.reduced)


def test_transfer_zero_and_inverse():
    rng = random.Random(4)
    y = random_rep(SIG2, {0: 1, -1: 1}, rng)
    x = random_rep(SIG2, {-2: 1, -3: 1}, rng)
    z = ExtClass.zero(y, x)
    assert transfer_unit(z).is_split()
    e = ExtClass.random(y, x, rng)
    assert transfer_inverse(transfer_unit(e), y, x) == e


def test_transfer_preserves_dimension_on_random_pairs():
    rng = random.Random(5)
    for _ in range(50):
        y = random_rep(SIG2, {0: rng.randint(1, 2), -1: rng.randint(0, 1)}, rng)
        x = random_rep(SIG2, {-2: rng.randint(1, 2), -3: rng.randint(0, 1)}, rng)
        assert ext1_dim(y, x) == ext1_dim(unit(SIG2), internal_hom(y, x))


def test_signature_mismatch():
    other = ModelSignature.make(QQ, [("w", -1)])
    with pytest.raises(SignatureMismatch):
        ext1_dim(unit(SIG), pure(other, -1))


def test_yoneda_witness_blend_has_free_corner():
    sig = ModelSignature.make(QQ, [("u", -1), ("v", -2)])
    l = ExtClass(pure(sig, -1), pure(sig, -2), [Matrix(QQ, [[1]]), Matrix(QQ, [[0]])])
    n = ExtClass(unit(sig), pure(sig, -1), [Matrix(QQ, [[1]]), Matrix(QQ, [[0]])])
    b = yoneda_obstruction(l, n)
    b.validate()
    assert b.mid.support == ((-2, 1), (-1, 1), (0, 1))
    # the corner block of the canonical witness is zero and Ext¹(A3, A1) is one-dimensional
    assert ext1_dim(unit(sig), pure(sig, -2)) == 1


def test_split_blend_witness():
    sig = ModelSignature.make(QQ, [("u", -1)])
    l = ExtClass.zero(pure(sig, -1), pure(sig, -2))
    n = ExtClass.zero(unit(sig), pure(sig, -1))
    b = yoneda_obstruction(l, n)
    assert all(op.is_zero() for op in b.mid.operators)


def test_pushforward_needs_matching_source():
    _, (b,) = ext1_space(unit(SIG), pure(SIG, -1))
    with pytest.raises(ModelError):
        pushforward(b, RepMorphism.identity(unit(SIG)))


def test_pullback_along_zero_splits():
    _, (b,) = ext1_space(unit(SIG), pure(SIG, -1))
    g = RepMorphism.zero(unit(SIG), unit(SIG))
    assert pullback(b, g).is_split()
