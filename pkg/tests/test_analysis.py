import random

import pytest

from conftest import make_square, square_vertex
from shadowbound.analysis import (
    VerificationReport,
    all_norms_battery,
    brute_force_paths,
    check_certificate,
    check_ordering_coincide,
    convex_hull_2d,
    local_path_agreement,
    parametric_path,
    sample_shadow_paths,
    shadow_polygon,
)
from shadowbound.constructions import Ball, cube_vertex, fixed_c_variant, goldfarb_cube, many_from_one, unit_cube
from shadowbound.errors import DegenerateProjection, DuplicateValues, NonGeneric, NotRegular
from shadowbound.exact import Q, QVector
from shadowbound.norms import NormSpec
from shadowbound.pivot import PARAMETRIC, PivotRuleSpec, ShadowSpec, run_simplex


def test_parametric_square():
    P = make_square()
    # w = (-1,-2) would be -c, which is the NonGeneric case below
    spec = ShadowSpec([-2, -1], [1, 2], PARAMETRIC)
    path = parametric_path(P, spec, square_vertex(P, 0, 0))
    assert [v.point for v in path.vertices] == [QVector([0, 0]), QVector([0, 1]), QVector([1, 1])]
    assert path.intervals == [(Q("2/3"), 1), (Q("1/3"), Q("2/3")), (0, Q("1/3"))]
    assert local_path_agreement(P, spec, square_vertex(P, 0, 0))


def test_parametric_intervals_tile(goldfarb3):
    P, spec, start = goldfarb3
    path = parametric_path(P, spec, start)
    assert path.length == 7
    ivs = path.intervals
    assert ivs[0][1] == 1 and ivs[-1][0] == 0
    for (lo, _), (_, hi) in zip(ivs, ivs[1:]):
        assert hi == lo
    assert all(lo < hi for lo, hi in ivs)


def test_parametric_opposite_objectives():
    P = make_square()
    with pytest.raises(NonGeneric):
        parametric_path(P, ShadowSpec([-1, -2], [1, 2], PARAMETRIC), square_vertex(P, 0, 0))


def test_parametric_finds_start(goldfarb3):
    P, spec, start = goldfarb3
    assert parametric_path(P, spec).vertices[0] == start


def test_local_agreement_goldfarb(goldfarb3):
    P, spec, start = goldfarb3
    assert local_path_agreement(P, spec, start)


def test_shadow_polygon_examples(goldfarb3):
    P = make_square()
    assert shadow_polygon(P, ShadowSpec([1, 0], [0, 1])).hull_size == 4
    G, spec, start = goldfarb3
    assert shadow_polygon(G, spec, start).hull_size == 8
    C, s = unit_cube(3)
    assert shadow_polygon(C, ShadowSpec([1, 0, 0], [0, 0, 1]), s).hull_size == 4
    with pytest.raises(DegenerateProjection):
        shadow_polygon(C, ShadowSpec([1, 1, 1], [1, 1, 1]), s)


def test_hull_drops_collinear_points():
    pts = [(Q(0), Q(0)), (Q(1), Q(0)), (Q(2), Q(0)), (Q(2), Q(2)), (Q(0), Q(2)), (Q(1), Q(1))]
    hull = convex_hull_2d(pts)
    assert sorted(hull) == [0, 2, 3, 4]


def test_brute_force_examples():
    P = make_square()
    st = brute_force_paths(P, [1, 2], square_vertex(P, 0, 0), square_vertex(P, 1, 1))
    assert (st.count, st.min_length, st.max_length) == (2, 2, 2)
    C, s = unit_cube(3)
    st = brute_force_paths(C, [1, 2, 4], s, cube_vertex(C, [1, 1, 1]))
    assert (st.count, st.min_length, st.max_length) == (6, 3, 3)


def test_brute_force_bounds_rules(goldfarb3):
    P, spec, start = goldfarb3
    top = run_simplex(P, spec.c, start, PivotRuleSpec.shadow_rule(spec))
    st = brute_force_paths(P, spec.c, start, top.vertices[-1])
    for rule in (PivotRuleSpec.shadow_rule(spec), PivotRuleSpec.dantzig(), PivotRuleSpec.greatest()):
        assert st.min_length <= run_simplex(P, spec.c, start, rule).length <= st.max_length


def test_ordering_coincide(goldfarb3):
    P, spec, start = goldfarb3
    assert check_ordering_coincide(P, spec, start)
    S = make_square()
    assert not check_ordering_coincide(S, ShadowSpec([2, 1], [1, 2]))
    assert check_ordering_coincide(S, ShadowSpec([1, 2], [1, 2]))
    with pytest.raises(DuplicateValues):
        check_ordering_coincide(S, ShadowSpec([1, 1], [1, 2]))


def test_certificate_checks_and_tampering(goldfarb3):
    P, spec, start = goldfarb3
    Qp, a, b, cert = many_from_one(P, spec, start)
    assert check_certificate(Qp, a, b, cert)
    # deleting a thin-cone facet breaks the certificate
    dropped = Qp.drop_facet(cert.cut_facets[0][-1])
    assert not check_certificate(dropped, a, b, cert)
    doubled = type(cert)(**{**cert.__dict__, "epsilon": cert.epsilon * 2,
                            "D_w": Ball(cert.D_w.center, cert.epsilon * 2),
                            "D_c": Ball(cert.D_c.center, cert.epsilon * 2)})
    res = check_certificate(Qp, a, b, doubled)
    assert not res and any("inradius" in r for r in res.reasons)


def test_sampling_goldfarb3(goldfarb3):
    P, spec, start = goldfarb3
    Qp, a, b, cert = many_from_one(P, spec, start)
    rep = sample_shadow_paths(Qp, a, b, cert.alpha, 200, seed=7, cert=cert)
    assert rep.passed and rep.min_length >= 7 and rep.certificate_ok
    again = sample_shadow_paths(Qp, a, b, cert.alpha, 200, seed=7, cert=cert)
    assert again.to_json() == rep.to_json()
    empty = sample_shadow_paths(Qp, a, b, cert.alpha, 0, seed=7, cert=cert)
    assert empty.min_length is None and empty.certificate_ok and empty.passed


def test_sampling_fixed_c():
    P, spec, start = goldfarb_cube(4)
    Qp, a, cert = fixed_c_variant(P, spec, start)
    rep = sample_shadow_paths(Qp, a, None, 15, 200, seed=1, cert=cert)
    assert rep.passed and rep.min_length >= 15


def test_certificate_implies_sampling_bound():
    rng = random.Random(11)
    for n in (2, 3, 4):
        P, spec, start = goldfarb_cube(n)
        Qp, a, b, cert = many_from_one(P, spec, start)
        if check_certificate(Qp, a, b, cert):
            rep = sample_shadow_paths(Qp, a, b, cert.alpha, 30, seed=rng.randrange(10**6))
            assert rep.min_length >= cert.alpha


def test_battery(goldfarb3):
    from shadowbound.constructions import all_norms_instance

    norms = [NormSpec.l1(True), NormSpec.l2(True), NormSpec.linf(True), NormSpec.lp("3/2", True), NormSpec.lp(10, True)]
    P2, c2, start, _ = all_norms_instance(3, norms)
    rep = all_norms_battery(P2, c2, start, norms, 7)
    assert rep.passed and rep.min_length == rep.max_length == 7
    assert all_norms_battery(P2, c2, start, [], 7).passed
    with pytest.raises(NotRegular):
        all_norms_battery(P2, c2, start, [NormSpec.weighted_l1([1, 2, 3])], 7)


def test_battery_negative_control(goldfarb3):
    P, spec, start = goldfarb3
    norms = [NormSpec.l1(), NormSpec.l2(), NormSpec.linf()]
    rep = all_norms_battery(P, spec.c, start, norms, 7)
    assert not rep.passed


def test_report_csv():
    rep = VerificationReport(10, 7, 9, 3, target=7, instance_id="g3", n=3, m=12, certificate_ok=True)
    assert rep.csv_row() == "g3,3,12,7,10,7,True,3"
    assert rep.to_json()["passed"]
    rep.failures.append("x")
    assert not rep.passed
