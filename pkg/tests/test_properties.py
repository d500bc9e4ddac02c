"""Property-based checks of the algebraic invariants."""

import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from corpus import blend_instance, random_blocks, random_frame, random_genext, scramble, two_block_instance
from panache.blended import blend_equiv, make_blend, translate, translate_column, translate_row
from panache.exactla import QQ, GF, Matrix, rref_kernel_image, solve
from panache.extmod import ExtClass, class_of, ext1_dim, pushforward, realize, transfer_inverse, transfer_unit
from panache.genext import GradedFrame, denormalize, equiv, normalize, truncate
from panache.motivic import end_dimension, graded_independence_arithmetic, graded_independent, totally_nonsplit
from panache.mtdemo import build_mt
from panache.repcat import ModelSignature, RepMorphism, internal_hom, random_rep, unit

SLOW = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
seeds = st.integers(min_value=0, max_value=2 ** 32)
small = st.integers(min_value=-4, max_value=4)


@st.composite
def matrices(draw, max_rows=4, max_cols=4):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
    return Matrix(QQ, rows, c)


@given(matrices())
def test_rank_nullity(m):
    _, ker, im = rref_kernel_image(m)
    assert ker.dim + im.dim == m.cols


@given(matrices(), st.data())
def test_solve_solutions_satisfy_system(a, data):
    x0 = Matrix(QQ, [[data.draw(small)] for _ in range(a.cols)], 1)
    b = a @ x0
    x = solve(a, b)
    assert x is not None and a @ x == b


@given(matrices())
def test_kernel_vectors_are_annihilated(m):
    _, ker, _ = rref_kernel_image(m)
    for v in ker.vectors():
        assert (m @ Matrix(QQ, [[c] for c in v], 1)).is_zero()


def _ext_pair(rng, field=QQ):
    sig = ModelSignature.make(field, [("u", -1), ("v", -2), ("w", -1)])
    m = random_rep(sig, {0: rng.randint(1, 2), -1: rng.randint(0, 1)}, rng)
    n = random_rep(sig, {-2: rng.randint(1, 2), -1: rng.randint(0, 1), -3: rng.randint(0, 1)}, rng)
    return m, n


@SLOW
@given(seeds)
def test_realize_then_read_off_is_identity(seed):
    rng = random.Random(seed)
    m, n = _ext_pair(rng)
    e = ExtClass.random(m, n, rng)
    assert class_of(realize(e)) == e


@SLOW
@given(seeds)
def test_baer_sum_is_abelian_group(seed):
    rng = random.Random(seed)
    m, n = _ext_pair(rng)
    a, b, c = (ExtClass.random(m, n, rng) for _ in range(3))
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert (a + (-a)).is_split()


@SLOW
@given(seeds)
def test_pushforward_is_additive(seed):
    rng = random.Random(seed)
    m, n = _ext_pair(rng)
    a, b = ExtClass.random(m, n, rng), ExtClass.random(m, n, rng)
    f = RepMorphism(n, n, Matrix.scalar(QQ, n.dim, QQ(rng.randint(-3, 3))))
    assert pushforward(a + b, f) == pushforward(a, f) + pushforward(b, f)


@SLOW
@given(seeds)
def test_transfer_to_unit_is_bijective(seed):
    rng = random.Random(seed)
    m, n = _ext_pair(rng)
    assert ext1_dim(m, n) == ext1_dim(unit(m.signature), internal_hom(m, n))
    e = ExtClass.random(m, n, rng)
    assert transfer_inverse(transfer_unit(e), m, n) == e


@SLOW
@given(seeds)
def test_blend_translation_is_an_action(seed):
    rng = random.Random(seed)
    b = make_blend(*blend_instance(rng))
    e1, e2 = ExtClass.random(b.a3, b.a1, rng), ExtClass.random(b.a3, b.a1, rng)
    assert blend_equiv(translate(e1, translate(e2, b)), translate(e1 + e2, b)) is not None
    assert blend_equiv(translate_row(e1, b), translate_column(e1, b)) is not None
    assert (blend_equiv(translate(e1, b), b) is not None) == e1.is_split()


@SLOW
@given(seeds)
def test_normal_form_roundtrip(seed):
    rng = random.Random(seed)
    frame = random_frame(rng)
    bf = random_blocks(frame, rng.randint(1, frame.k - 1), rng)
    g = denormalize(bf)
    assert normalize(scramble(g, rng)).blocks == bf


@SLOW
@given(seeds)
def test_truncation_commutes_with_scrambling(seed):
    rng = random.Random(seed)
    g = random_genext(rng, disguise=False)
    assert equiv(truncate(scramble(g, rng)), truncate(g)) is not None


@SLOW
@given(seeds)
def test_totally_nonsplit_implies_scalar_endomorphisms(seed):
    e = two_block_instance(random.Random(seed))
    if totally_nonsplit(e):
        assert end_dimension(e) == 1


@given(st.lists(st.integers(1, 6), min_size=1, max_size=3))
def test_graded_independence_general_matches_arithmetic(gaps):
    weights = [0]
    for g in gaps:
        weights.insert(0, weights[0] - g)
    sig = ModelSignature.make(QQ, [(f"g{d}", -d) for d in range(1, sum(gaps) + 1)])
    assert graded_independent(GradedFrame.from_weights(sig, weights)) == graded_independence_arithmetic(weights)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([3, 5, 7, 9, 11, 13]), st.integers(1, 3))
def test_mt_ext_table_pattern(cutoff, nlabels):
    mt = build_mt(labels=(2, 3, 5)[:nlabels], cutoff=cutoff)
    table = mt.ext_table(lo=-1)
    for n, d in table.items():
        if n <= 0:
            assert d == 0
        elif n == 1:
            assert d == nlabels
        else:
            assert d == (n % 2)


@SLOW
@given(seeds)
def test_prime_field_classes_roundtrip(seed):
    rng = random.Random(seed)
    m, n = _ext_pair(rng, GF(3))
    e = ExtClass.random(m, n, rng)
    assert class_of(realize(e)) == e
