import json

from hypothesis import given
from hypothesis import strategies as st

from shadowbound.constructions import fixed_c_variant, many_from_one
from shadowbound.exact import QMatrix, QVector
from shadowbound.io import (
    InstanceBundle,
    certificate_from_json,
    certificate_to_json,
    dumps,
    path_from_json,
    path_to_json,
    polytope_from_json,
    polytope_to_json,
)
from shadowbound.pivot import PivotRuleSpec, run_simplex
from shadowbound.polytope import HPolytope

rationals = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)


def test_polytope_schema(goldfarb3):
    P, _, _ = goldfarb3
    d = polytope_to_json(P)
    assert set(d) == {"dim", "A", "b", "labels", "trusted_bounded"}
    assert d["dim"] == 3 and all(isinstance(x, str) for x in d["b"])
    back = polytope_from_json(json.loads(json.dumps(d)))
    assert back.A == P.A and back.b == P.b and back.labels == P.labels


def test_rational_strings():
    P = HPolytope(QMatrix([["-3/7", 1], [1, 0], [-1, -1]]), QVector([1, 1, 0]))
    d = polytope_to_json(P)
    assert d["A"][0] == ["-3/7", "1"]


def test_certificate_round_trip(goldfarb3):
    P, spec, start = goldfarb3
    _, _, _, cert = many_from_one(P, spec, start)
    d = json.loads(dumps(certificate_to_json(cert)))
    assert {"alpha", "epsilon", "segment_points", "D_w", "D_c", "cut_facets"} <= set(d)
    back = certificate_from_json(d)
    assert certificate_to_json(back) == certificate_to_json(cert)
    _, _, cert2 = fixed_c_variant(P, spec, start)
    d2 = json.loads(dumps(certificate_to_json(cert2)))
    assert d2["D_c"] is None
    assert certificate_from_json(d2).c_fixed == cert2.c_fixed


def test_path_round_trip(goldfarb3):
    P, spec, start = goldfarb3
    path = run_simplex(P, spec.c, start, PivotRuleSpec.shadow_rule(spec))
    d = json.loads(dumps(path_to_json(path)))
    assert d["length"] == 7 and d["rule"].startswith("shadow:")
    back = path_from_json(d)
    assert back.tight_sequence == path.tight_sequence and back.c_values == path.c_values


def test_bundle_chain(goldfarb3):
    P, spec, start = goldfarb3
    proj = spec.as_projection()
    b = InstanceBundle(P, proj.c, proj.w, start.tight, {"generator": "goldfarb"})
    b2 = b.derive(P, {"op": "noop"})
    assert b.metadata["chain"] == [] and b2.metadata["chain"] == [{"op": "noop"}]
    again = InstanceBundle.from_json(json.loads(dumps(b2.to_json())))
    assert again.to_json() == b2.to_json()
    assert again.start_vertex() == start


@given(st.lists(st.lists(rationals, min_size=3, max_size=3), min_size=1, max_size=6))
def test_matrix_round_trip_exact(rows):
    from shadowbound.io import mat_in, mat_out

    M = QMatrix(rows)
    back = mat_in(json.loads(json.dumps(mat_out(M))))
    assert back == M
    for r1, r2 in zip(M, back):
        for a, b in zip(r1, r2):
            assert (a.numerator, a.denominator) == (b.numerator, b.denominator)


def test_dumps_is_deterministic(goldfarb3):
    P, spec, start = goldfarb3
    proj = spec.as_projection()
    b = InstanceBundle(P, proj.c, proj.w, start.tight, {"seed": 1})
    assert dumps(b.to_json()) == dumps(InstanceBundle.from_json(json.loads(dumps(b.to_json()))).to_json())
