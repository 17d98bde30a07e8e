import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_square, square_vertex
from shadowbound.analysis import parametric_path
from shadowbound.constructions import (
    GOLDFARB_GRID,
    Ball,
    CompressSpec,
    all_norms_instance,
    ball_in_cone,
    canonicalize_w_to_e1,
    compress,
    cube_vertex,
    cut_children,
    find_k_for_norm,
    fixed_c_variant,
    goldfarb_cube,
    klee_minty,
    many_from_one,
    thin_cone,
    unit_cube,
    vertex_cut,
)
from shadowbound.errors import BallNotInterior, EpsTooLarge, GenerationFailed, NotInterior
from shadowbound.exact import Q, QMatrix, QVector, dot
from shadowbound.norms import NormSpec
from shadowbound.pivot import PARAMETRIC, PivotRuleSpec, ShadowSpec, run_simplex
from shadowbound.polytope import enumerate_by_bases, enumerate_vertices, is_simple, normal_cone, vertex_from_basis


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_goldfarb_visits_all_vertices(n):
    P, spec, start = goldfarb_cube(n)
    assert P.m == 2 * n
    path = parametric_path(P, spec, start)
    assert path.length == 2**n - 1
    assert {v.tight for v in path.vertices} == {v.tight for v in enumerate_vertices(P, start)}


def test_goldfarb_cap_and_presets():
    with pytest.raises(GenerationFailed):
        goldfarb_cube(40)
    with pytest.raises(GenerationFailed):
        goldfarb_cube(1)
    P, _, _ = goldfarb_cube(3, params=GOLDFARB_GRID[0])
    assert P.m == 6
    # gamma = 0 and a tilt of 1 give a Klee-Minty cube whose shadow is short
    with pytest.raises(GenerationFailed):
        goldfarb_cube(3, params=(Q("1/3"), Q(0), Q(1)))


def test_klee_minty_is_cube():
    P, start = klee_minty(4)
    assert len(enumerate_vertices(P, start)) == 16 and is_simple(P)


def test_vertex_cut_square():
    P = make_square()
    v = square_vertex(P, 1, 1)
    out = vertex_cut(P, v, [1, 1])
    assert out.m == 5
    assert out.A[4] == QVector([1, 1]) and out.b[4] == Q("3/2")
    pts = {u.point for u in cut_children(out, v)}
    assert pts == {QVector([1, "1/2"]), QVector(["1/2", 1])}
    with pytest.raises(NotInterior):
        vertex_cut(P, v, [1, 0])
    with pytest.raises(EpsTooLarge):
        vertex_cut(P, v, [1, 1], eps=1)


def test_vertex_cut_cube():
    P, _ = unit_cube(3)
    v = cube_vertex(P, [1, 1, 1])
    out = vertex_cut(P, v, [1, 1, 1])
    assert out.m == 7
    assert len(enumerate_by_bases(out)) == 10


def test_vertex_cut_fan_refinement():
    P, _ = unit_cube(3)
    v = cube_vertex(P, [1, 0, 1])
    old_rays = set(normal_cone(P, v).rays)
    w = sum(old_rays, QVector.zeros(3))
    out = vertex_cut(P, v, w)
    for child in cut_children(out, v):
        rays = set(normal_cone(out, child).rays)
        assert w in rays and len(rays & old_rays) == 2


def test_thin_cone_square():
    P = make_square()
    v = square_vertex(P, 1, 1)
    D = Ball([1, 1], Q("1/4"))
    out, a = thin_cone(P, v, D)
    assert out.m == 6
    assert set(a.tight) == {4, 5}
    assert all(D.contains(r) for r in normal_cone(out, a).rays)
    with pytest.raises(BallNotInterior):
        thin_cone(P, v, Ball([-1, 1], Q("1/4")))


def test_thin_cone_cube_keeps_other_cones():
    P, start = unit_cube(3)
    v = cube_vertex(P, [1, 1, 1])
    D = Ball([1, 1, 1], Q("1/8"))
    out, a = thin_cone(P, v, D)
    assert out.m == 9 and is_simple(out)
    assert all(D.contains(out.A[i]) for i in a.tight)
    for u in enumerate_vertices(P, start):
        if u != v:
            assert vertex_from_basis(out, u.tight).point == u.point


def test_ball_in_cone():
    C = normal_cone(make_square(), square_vertex(make_square(), 1, 1))
    assert ball_in_cone(Ball([1, 1], Q("1/2")), C)
    assert not ball_in_cone(Ball([1, 1], Q(2)), C)


def test_many_from_one_goldfarb(goldfarb3):
    P, spec, start = goldfarb3
    Qp, a, b, cert = many_from_one(P, spec, start)
    assert Qp.m == 12 and cert.alpha == 7
    assert is_simple(Qp)
    assert set(a.tight) == set(cert.cut_facets[0]) and set(b.tight) == set(cert.cut_facets[1])
    for i in a.tight:
        assert cert.D_w.contains(Qp.A[i])
    assert cert.epsilon > 0


def test_many_from_one_square_sanity():
    P = make_square()
    spec = ShadowSpec([1, -1], [1, 1], PARAMETRIC)
    Qp, a, b, cert = many_from_one(P, spec, square_vertex(P, 1, 0))
    assert Qp.m == 8 and cert.alpha == 1


def test_fixed_c_facet_counts():
    for n in (3, 4):
        P, spec, start = goldfarb_cube(n)
        Qp, a, cert = fixed_c_variant(P, spec, start)
        assert Qp.m == 3 * n and cert.D_c is None


def test_segment_corner_translation(goldfarb3):
    P, spec, start = goldfarb3
    _, _, _, cert = many_from_one(P, spec, start)
    c = cert.D_c.center
    for corner in cert.D_w.corners():
        for lam, z in zip(cert.lambdas, cert.segment_points):
            moved = corner * lam + c * (1 - lam)
            assert (moved - z).norm_inf() <= cert.epsilon


def test_compress_examples():
    cs = CompressSpec([1, 0], 4)
    assert cs.matrix == QMatrix.diag([1, "1/4"])
    P = make_square()
    out, c2 = compress(P, [1, 2], cs)
    assert [tuple(r) for r in out.A] == [(-1, 0), (0, -4), (1, 0), (0, 4)]
    one = CompressSpec([3, 7], 1)
    assert compress(P, [1, 2], one)[0].A == P.A
    cs = CompressSpec([1, 1], 2)
    assert cs.matrix == QMatrix([["3/4", "1/4"], ["1/4", "3/4"]])
    assert cs.matrix @ QVector([1, 1]) == QVector([1, 1])


@given(st.lists(st.integers(-9, 9), min_size=3, max_size=3), st.integers(1, 64),
       st.lists(st.integers(-9, 9), min_size=3, max_size=3))
def test_compress_invariants(w, k, c):
    if not any(w):
        return
    cs = CompressSpec(w, k)
    A, Ainv = cs.matrix, cs.inverse
    assert A == A.T
    assert A @ Ainv == QMatrix.identity(3)
    assert A @ cs.w == cs.w
    P, start = unit_cube(3)
    out, c2 = compress(P, c, cs)
    verts = sorted(enumerate_vertices(P, start), key=lambda v: v.tight)
    for u, v in zip(verts, verts[1:]):
        assert dot(c2, cs.apply(u.point) - cs.apply(v.point)) == dot(c, u.point - v.point)
        assert vertex_from_basis(out, u.tight).point == cs.apply(u.point)


@pytest.mark.parametrize("w, expected", [
    ([1, 0], QMatrix.identity(2)),
    ([2, 0], QMatrix.diag(["1/2", 1])),
])
def test_canonicalize_examples(w, expected):
    P = make_square()
    _, spec2, T = canonicalize_w_to_e1(P, ShadowSpec(w, [0, 1]))
    assert T == expected
    assert spec2.w == QVector([1, 0])


def test_canonicalize_preserves_paths(goldfarb3):
    P, spec, start = goldfarb3
    proj = spec.as_projection()
    P2, spec2, T = canonicalize_w_to_e1(P, proj)
    assert T @ proj.w == QVector.unit(3, 0)
    a = run_simplex(P, proj.c, start, PivotRuleSpec.shadow_rule(proj))
    b = run_simplex(P2, spec2.c, vertex_from_basis(P2, start.tight), PivotRuleSpec.shadow_rule(spec2))
    assert a.tight_sequence == b.tight_sequence
    assert a.c_values == b.c_values


@pytest.mark.parametrize("eta", [NormSpec.l1(), NormSpec.l2(), NormSpec.linf()], ids=lambda e: e.name)
def test_find_k(goldfarb3, eta):
    P, spec, start = goldfarb3
    k, run = find_k_for_norm(P, spec, start, eta)
    assert run.length == 7 and k >= 2


def test_all_norms_instance():
    norms = [NormSpec.l1(True), NormSpec.l2(True), NormSpec.linf(True)]
    P2, c2, start, k = all_norms_instance(3, norms)
    for eta in norms:
        assert run_simplex(P2, c2, start, PivotRuleSpec.steepest(eta)).length == 7
