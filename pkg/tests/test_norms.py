import random

import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import iv

from shadowbound.errors import NotRegular, UncertifiableComparison
from shadowbound.exact import Q, QVector
from shadowbound.norms import (
    CertifiedInterval,
    NormSpec,
    check_regular,
    compare_ratios,
    interval_eval,
    is_regular,
    norm_eval,
    parse_norm,
    random_regular_polyhedral,
    regular_battery,
)

BUILTINS = [
    NormSpec.l1(), NormSpec.l2(), NormSpec.linf(), NormSpec.lp("3/2"), NormSpec.lp(3),
    NormSpec.weighted_l1([1, 2, "1/3"]),
    NormSpec.polyhedral([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]),
]

rationals = st.fractions(min_value=-30, max_value=30, max_denominator=9)
vectors = st.lists(rationals, min_size=3, max_size=3).map(QVector)


def upper(val):
    return val.hi if isinstance(val, CertifiedInterval) else val


def lower(val):
    return val.lo if isinstance(val, CertifiedInterval) else val


def test_examples():
    assert norm_eval(NormSpec.l2(), [3, 4]) == 5
    assert norm_eval(NormSpec.l1(), ["1/2", "-1/3"]) == Q("5/6")
    assert norm_eval(NormSpec.linf(), [-2, "3/2"]) == 2


def test_l2_irrational_is_an_interval():
    enc = norm_eval(NormSpec.l2(), [1, 1])
    assert isinstance(enc, CertifiedInterval)
    assert enc.lo * enc.lo <= 2 <= enc.hi * enc.hi


def test_lp_enclosure_shrinks_with_bits():
    eta = NormSpec.lp(3)
    a = interval_eval(eta, QVector([1, 2]), 64)
    b = interval_eval(eta, QVector([1, 2]), 512)
    assert a.lo <= b.lo <= b.hi <= a.hi
    assert b.lo ** 3 <= 9 <= b.hi ** 3


def test_lp_two_is_l2():
    assert NormSpec.lp(2).kind == "l2"
    with pytest.raises(ValueError):
        NormSpec.lp(1)


def test_regularity():
    assert is_regular(NormSpec.weighted_l1([1, 1]), 2)
    with pytest.raises(NotRegular):
        check_regular(NormSpec.weighted_l1([1, 2]), 2)
    eta = NormSpec.weighted_l1([1, 2], regular_required=True)
    with pytest.raises(NotRegular):
        norm_eval(eta, [1, 1])
    for eta in regular_battery(4, 25, seed=3):
        check_regular(eta, 4)


def test_battery_size_and_names():
    norms = regular_battery(3, 25, seed=1)
    assert len(norms) == 25
    names = [n.name for n in norms[:8]]
    assert names[:3] == ["l1", "l2", "linf"]


def test_random_polyhedral_is_regular():
    rng = random.Random(0)
    for _ in range(10):
        assert is_regular(random_regular_polyhedral(4, rng), 4)


def test_compare_ratios_exact_and_certified():
    # 1/1 against 2/sqrt(5)
    assert compare_ratios(NormSpec.l2(), Q(1), [1, 0], Q(2), [1, 2]) == 1
    assert compare_ratios(NormSpec.l1(), Q(1), [1, 0], Q(2), [1, 1]) == 0
    assert compare_ratios(NormSpec.lp(3), Q(1), [1, 0], Q(1), [0, 1]) == 0
    assert compare_ratios(NormSpec.lp(3), Q(3), [1, 1], Q(1), [1, 0]) == 1


def test_uncertifiable_tie_raises():
    # 2/eta(2,2) == 1/eta(1,1) exactly, but both sides are irrational
    with pytest.raises(UncertifiableComparison):
        compare_ratios(NormSpec.lp(3), Q(2), [2, 2], Q(1), [1, 1])


def test_plugin_registration():
    def l2_plugin(xs):
        return iv.sqrt(sum(x * x for x in xs))

    eta = NormSpec.from_plugin(l2_plugin, positive=True, homogeneous=True, dim=3, name="l2-plugin")
    enc = norm_eval(eta, [3, 4, 0])
    assert enc.contains(5)
    with pytest.raises(ValueError):
        NormSpec.from_plugin(l2_plugin, positive=True, homogeneous=False, dim=3)

    def not_homogeneous(xs):
        return sum(x * x for x in xs)

    with pytest.raises(ValueError):
        NormSpec.from_plugin(not_homogeneous, positive=True, homogeneous=True, dim=3)


def test_parse_norm(tmp_path):
    assert parse_norm("l1").kind == "l1"
    assert parse_norm("lp:3/2").p == Q("3/2")
    assert parse_norm("wl1:1,2").weights == QVector([1, 2])
    f = tmp_path / "g.json"
    f.write_text('[["1","0"],["0","1"],["1","1"]]')
    assert parse_norm(f"poly:{f}").kind == "poly"
    with pytest.raises(ValueError):
        parse_norm("l7")


@pytest.mark.parametrize("eta", BUILTINS, ids=lambda e: e.name)
@given(x=vectors, y=vectors, lam=rationals)
def test_norm_axioms(eta, x, y, lam):
    if not x.is_zero():
        assert lower(norm_eval(eta, x)) > 0
    else:
        assert upper(norm_eval(eta, x)) == 0
    sx = x * Q(lam)
    a, b = norm_eval(eta, sx, 128), norm_eval(eta, x, 128)
    lam_abs = abs(Q(lam))
    assert lower(a) <= upper(b) * lam_abs and lower(b) * lam_abs <= upper(a)
    assert lower(norm_eval(eta, x + y, 128)) <= upper(norm_eval(eta, x, 128)) + upper(norm_eval(eta, y, 128))


def test_battery_names_are_distinct():
    from shadowbound.norms import regular_battery

    battery = regular_battery(3, 25, seed=0)
    assert len({eta.name for eta in battery}) == 25
