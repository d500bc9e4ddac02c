import random

import pytest

from corpus import random_blocks, random_classes, random_frame, random_genext, random_invertible, scramble
from panache.exactla import GF, QQ, Matrix
from panache.extmod import ExtClass
from panache.genext import (FiberDescriptor, GenExtError, GradedFrame, act_autA, act_blocks, automorphism_space,
                            crop, denormalize, entries_of, equiv, family_between, from_level1, from_object,
                            gamma_act, level1_classes, normalize, realize_object, scalar_line, translate_member,
                            transport, truncate, validate_genext)
from panache.repcat import ModelSignature


def f2_frame():
    sig = ModelSignature.make(GF(2), [("u", -1), ("v", -2)])
    return GradedFrame.from_weights(sig, (-2, -1, 0))


def test_entries_of_level_one():
    assert entries_of(3, 1) == [(0, 1), (1, 2), (2, 3), (0, 2), (1, 3)]


def test_frame_requires_increasing_weights():
    sig = ModelSignature.make(QQ, [("u", -1)])
    with pytest.raises(GenExtError):
        GradedFrame.from_weights(sig, (0, -1))


def test_denormalized_blocks_validate_and_roundtrip():
    rng = random.Random(21)
    for _ in range(10):
        frame = random_frame(rng)
        bf = random_blocks(frame, rng.randint(1, frame.k - 1), rng)
        g = denormalize(bf)
        validate_genext(g)
        assert normalize(g).blocks == bf


def test_scrambled_diagram_has_same_normal_form():
    rng = random.Random(22)
    for _ in range(10):
        g = random_genext(rng, disguise=False)
        assert equiv(g, scramble(g, rng)) is not None


def test_truncate_and_crop():
    rng = random.Random(23)
    g = random_genext(rng, level=2, frame=random_frame(rng, k=4))
    t = truncate(g)
    assert t.level == 1
    assert normalize(t).blocks.as_dict() == {e: b for e, b in normalize(g).blocks.as_dict().items()
                                             if e[1] - e[0] == 1}
    c = crop(g, 1, 3)
    assert c.k == 2 and c.frame.weights == g.frame.weights[1:3]


def test_from_object_matches_realized_object():
    rng = random.Random(24)
    frame = random_frame(rng, k=3)
    g = random_genext(rng, level=2, frame=frame)
    x = realize_object(g)
    ident = [Matrix.identity(QQ, a.dim) for a in frame.parts]
    assert equiv(from_object(x, ident, frame), g, "iso") is not None


def test_level1_roundtrip():
    rng = random.Random(25)
    frame = random_frame(rng)
    cls = random_classes(frame, 1, rng)
    assert level1_classes(from_level1(frame, cls)) == cls


def test_fiber_over_f2_has_expected_size():
    frame = f2_frame()
    f = frame.field
    base = from_level1(frame, [ExtClass(frame.a(2), frame.a(1), [Matrix(f, [[1]]), Matrix(f, [[0]])]),
                               ExtClass(frame.a(3), frame.a(2), [Matrix(f, [[1]]), Matrix(f, [[0]])])])
    fd = FiberDescriptor(base)
    assert fd.group_dim == 1 and fd.group_order() == 2
    members = list(fd.members())
    assert len(members) == 2
    assert equiv(members[0], members[1]) is None
    assert all(fd.is_member(m) for m in members)


def test_translate_member_matches_coordinates():
    rng = random.Random(26)
    frame = random_frame(rng, k=3)
    base = from_level1(frame, random_classes(frame, 1, rng))
    fd = FiberDescriptor(base)
    es = random_classes(frame, 2, rng)
    moved = translate_member(es, fd.basepoint())
    assert fd.coords(moved) == es


def test_act_autA_matches_act_blocks():
    rng = random.Random(27)
    for _ in range(5):
        g = random_genext(rng)
        sigma = [random_invertible(QQ, a.dim, rng) for a in g.frame.parts]
        assert normalize(act_autA(sigma, g)).blocks == act_blocks(sigma, normalize(g).blocks)


def test_iso_equivalence_via_frame_maps():
    rng = random.Random(28)
    g = random_genext(rng)
    sigma = [random_invertible(QQ, a.dim, rng) for a in g.frame.parts]
    h = act_autA(sigma, g)
    assert equiv(g, h, "iso") is not None


def test_transport_along_family_between():
    rng = random.Random(29)
    g = random_genext(rng, level=2, frame=random_frame(rng, k=3))
    y = truncate(g)
    F = [random_invertible(QQ, a.dim, rng) for a in g.frame.parts]
    yp = scramble(denormalize(act_blocks(F, normalize(y).blocks)), rng)
    t = transport(g, family_between(y, yp, F))
    assert truncate(t) == yp


def test_family_between_rejects_wrong_maps():
    frame = f2_frame()
    f = frame.field
    g = from_level1(frame, [ExtClass(frame.a(2), frame.a(1), [Matrix(f, [[1]]), Matrix(f, [[0]])]),
                            ExtClass(frame.a(3), frame.a(2), [Matrix(f, [[0]]), Matrix(f, [[0]])])])
    h = from_level1(frame, [ExtClass(frame.a(2), frame.a(1), [Matrix(f, [[0]]), Matrix(f, [[0]])]),
                            ExtClass(frame.a(3), frame.a(2), [Matrix(f, [[0]]), Matrix(f, [[0]])])])
    ident = [Matrix.identity(f, 1)] * 3
    with pytest.raises(GenExtError):
        family_between(g, h, ident)


def test_gamma_action_by_scalars_is_trivial():
    rng = random.Random(30)
    frame = random_frame(rng, k=3)
    base = from_level1(frame, random_classes(frame, 1, rng))
    member = FiberDescriptor(base).lift(random_classes(frame, 2, rng))
    F = [Matrix.scalar(QQ, a.dim, QQ(3)) for a in frame.parts]
    assert equiv(gamma_act(F, member), member) is not None


def test_scalar_line_lies_in_automorphisms():
    rng = random.Random(31)
    g = random_genext(rng)
    assert scalar_line(g.frame).issubspace(automorphism_space(g))


def test_translate_member_needs_level_two():
    rng = random.Random(32)
    frame = random_frame(rng, k=3)
    g = from_level1(frame, random_classes(frame, 1, rng))
    with pytest.raises(GenExtError):
        translate_member([], g)
