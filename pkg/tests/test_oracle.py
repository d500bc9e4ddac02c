import json

import pytest

from panache.exactla import GF, Matrix
from panache.extmod import ExtClass
from panache.motivic import totally_nonsplit
from panache.oracle import (BoundExceeded, CensusConfig, QuantifierCase, _merge, _census_shard,
                            enumerate_and_verify, quantified_totally_nonsplit, subobject_quantifier_check)
from panache.repcat import ModelSignature, pure, unit


def test_p2_k3_counts():
    rep = enumerate_and_verify(CensusConfig(2, (-2, -1, 0), (-1, -2)))
    l1, l2 = rep["levels"]
    assert l1["strict_classes"] == 4
    assert l2["fiber_sizes"] == [2]
    assert l2["strict_classes"] == 8
    assert l2["truncation_surjective"]


def test_p3_scaling_merges_classes():
    rep = enumerate_and_verify(CensusConfig(3, (-2, -1, 0), (-1, -2), levels=(1, 1)))
    (l1,) = rep["levels"]
    assert l1["strict_classes"] == 9
    assert l1["iso_classes"] < 9


def test_no_generators_gives_single_class():
    rep = enumerate_and_verify(CensusConfig(2, (-2, -1, 0), ()))
    assert [lv["strict_classes"] for lv in rep["levels"]] == [1, 1]


def test_bound_is_enforced():
    cfg = CensusConfig(3, (-3, -2, -1, 0), (-1, -1, -1, -2, -2, -2, -3, -3, -3))
    with pytest.raises(BoundExceeded):
        enumerate_and_verify(cfg)


def test_report_is_deterministic():
    cfg = CensusConfig(2, (-2, -1, 0), (-1, -2))
    a = json.dumps(enumerate_and_verify(cfg), sort_keys=True)
    b = json.dumps(enumerate_and_verify(cfg, workers=2), sort_keys=True)
    assert a == b


def test_shard_merge_is_order_independent():
    cfg = CensusConfig(2, (-2, -1, 0), (-1, -2))
    n = cfg.configurations(2)
    parts = [_census_shard(cfg, 2, 0, n // 2), _census_shard(cfg, 2, n // 2, n)]
    assert _merge(parts) == _merge(parts[::-1]) == _census_shard(cfg, 2, 0, n)


def test_split_class_fails_both_tests():
    sig = ModelSignature.make(GF(3), [("g0", -1)])
    e = ExtClass.zero(unit(sig), pure(sig, -1))
    assert not totally_nonsplit(e)
    assert not quantified_totally_nonsplit(e)


def test_one_dimensional_target_is_nonsplitness():
    sig = ModelSignature.make(GF(3), [("g0", -1)])
    for c in range(3):
        e = ExtClass(unit(sig), pure(sig, -1), [Matrix(GF(3), [[c]])])
        assert totally_nonsplit(e) == quantified_totally_nonsplit(e) == (c != 0)


def test_two_weight_target_all_classes_agree():
    rep = subobject_quantifier_check([QuantifierCase(3, (-1, -1, -2, -2), ((-2, 1), (-1, 1)))])
    (case,) = rep["cases"]
    assert case["classes"] == 81
    assert case["disagree"] == 0
    assert rep["all_agree"]


def test_quantifier_rejects_large_ambient():
    with pytest.raises(BoundExceeded):
        subobject_quantifier_check([QuantifierCase(3, (-1,), ((-1, 5),))])
