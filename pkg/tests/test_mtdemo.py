import random

import pytest

from panache.mtdemo import (MTError, build_mt, four_weight_pipeline, kummer_class, named_objects, period_scaffold,
                            scaffold_is_unipotent_after_twists, twist, z_class)
from panache.repcat import is_isomorphic
from panache.extmod import realize

EXPECTED_SCAFFOLD = [
    ["(2*pi*i)^-9", "(2*pi*i)^-9*zeta(5)", "(2*pi*i)^-9*p'_{5,2}", "p_{3,2,5}(X)"],
    [None, "(2*pi*i)^-4", "(2*pi*i)^-4*log(2)", "(2*pi*i)^-4*p_{3,2}"],
    [None, None, "(2*pi*i)^-3", "(2*pi*i)^-3*zeta(3)"],
    [None, None, None, "1"],
]


def test_ext_table_cutoff_five_one_label():
    mt = build_mt(labels=(2,), cutoff=5)
    assert mt.ext_table() == {1: 1, 2: 0, 3: 1, 4: 0, 5: 1}


def test_ext_table_nonpositive_twists():
    mt = build_mt(labels=(2,), cutoff=5)
    assert mt.expected(0) == 0
    assert mt.expected(-1) == 0
    assert mt.ext_table(lo=-1, hi=0) == {-1: 0, 0: 0}


def test_ext_table_counts_labels_at_one():
    mt = build_mt(labels=(2, 3, 5), cutoff=7)
    assert mt.ext_table(hi=3) == {1: 3, 2: 0, 3: 1}


@pytest.mark.parametrize("cutoff", [2, 4, 1])
def test_invalid_cutoff(cutoff):
    with pytest.raises(MTError):
        build_mt(cutoff=cutoff)


def test_no_labels_rejected():
    with pytest.raises(MTError):
        build_mt(labels=())


def test_z3_support():
    mt = build_mt()
    objs = named_objects(mt, n=3, r=2, rng=random.Random(0))
    assert objs["Z_3"].support == ((-6, 1), (0, 1))


def test_distinct_kummer_objects_not_isomorphic():
    mt = build_mt()
    l2 = realize(kummer_class(mt, 2)).mid
    l3 = realize(kummer_class(mt, 3)).mid
    assert is_isomorphic(l2, l3) is None
    assert is_isomorphic(l2, realize(kummer_class(mt, 2, c=4)).mid) is not None


def test_twist_shifts_weights():
    mt = build_mt()
    z = realize(z_class(mt, 3)).mid
    assert twist(z, 1).support == ((-8, 1), (-2, 1))


def test_named_blend_middles_have_three_weights():
    mt = build_mt()
    objs = named_objects(mt, rng=random.Random(1))
    assert objs["M_3,2"].support == ((-8, 1), (-6, 1), (0, 1))
    assert objs["M'_5,2"].support == ((-12, 1), (-2, 1), (0, 1))


def test_pipeline_report():
    rep = four_weight_pipeline(3, 5, 2)
    assert rep["frame"]["weights"] == [-18, -8, -6, 0]
    assert rep["graded_independent"] is True
    assert rep["level2"]["fiber_dim"] == 0 and rep["level2"]["unique_lift"]
    assert rep["level3"]["fiber_dim"] == 1
    assert rep["realized"]["u_radical_dim"] == 6
    assert rep["galois_dimension"] == 7
    assert rep["period_scaffold"] == EXPECTED_SCAFFOLD


def test_pipeline_realized_object_verdicts_agree():
    rep = four_weight_pipeline(3, 5, 2)
    crit = rep["realized"]["criterion"]
    assert rep["realized"]["is_maximal"] == crit["maximal"] == all(crit["adjacent_totally_nonsplit"])


def test_pipeline_other_parameters():
    rep = four_weight_pipeline(5, 3, 3)
    assert rep["galois_dimension"] == 7
    assert rep["frame"]["weights"] == [-18, -12, -10, 0]


@pytest.mark.parametrize("a,c", [(3, 3), (4, 5), (3, 4), (3, 2), (5, 6)])
def test_pipeline_rejects_bad_parameters(a, c):
    with pytest.raises(MTError):
        four_weight_pipeline(a, c, 2)


def test_scaffold_shape():
    assert period_scaffold(3, 5, 2) == EXPECTED_SCAFFOLD
    assert scaffold_is_unipotent_after_twists(EXPECTED_SCAFFOLD)
    broken = [row[:] for row in EXPECTED_SCAFFOLD]
    broken[2][0] = "x"
    assert not scaffold_is_unipotent_after_twists(broken)
