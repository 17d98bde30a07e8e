"""Simplex walks on simple polytopes with pluggable pivot rules.

The walk is done geometrically on ``A x <= b``: at a vertex with tight set
T, dropping tight facet j moves along the direction d_j with
``a_i . d_j = 0`` for i in T - {j} and ``a_j . d_j = -1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .errors import Degenerate, StepCapExceeded, Tie
from .exact import QVector, Scalar, dot, parse_vector
from .norms import NormSpec, check_regular, compare_ratios, parse_norm
from .polytope import HPolytope, VertexBasis, edge_directions, step_along

DEFAULT_STEP_CAP = 10**6

PROJECTION = "projection"
PARAMETRIC = "parametric"


@dataclass(frozen=True)
class ShadowSpec:
    """An objective pair (w, c) defining a shadow path.

    Under the projection convention the walk starts at the w-minimizer and
    each step maximizes ``(c.s)/(w.s)``. Under the parametric convention
    the start is the w-maximizer and the path follows the vertices that
    maximize ``lam w + (1 - lam) c`` as lam goes from 1 to 0. The two are
    related by negating w.
    """

    w: QVector
    c: QVector
    convention: str = PROJECTION

    def __post_init__(self):
        object.__setattr__(self, "w", QVector(self.w))
        object.__setattr__(self, "c", QVector(self.c))
        if self.convention not in (PROJECTION, PARAMETRIC):
            raise ValueError(f"unknown convention {self.convention!r}")
        if len(self.w) != len(self.c):
            raise ValueError("w and c must have the same dimension")
        if self.w.is_zero() or self.c.is_zero():
            raise ValueError("w and c must be nonzero")

    def as_projection(self) -> "ShadowSpec":
        if self.convention == PROJECTION:
            return self
        return ShadowSpec(-self.w, self.c, PROJECTION)

    def as_parametric(self) -> "ShadowSpec":
        if self.convention == PARAMETRIC:
            return self
        return ShadowSpec(-self.w, self.c, PARAMETRIC)


@dataclass(frozen=True)
class PivotRuleSpec:
    variant: str
    shadow: Optional[ShadowSpec] = None
    norm: Optional[NormSpec] = None
    tie_policy: str = "error"

    def __post_init__(self):
        if self.variant not in ("shadow", "steepest", "dantzig", "greatest"):
            raise ValueError(f"unknown pivot rule {self.variant!r}")
        if self.tie_policy not in ("error", "lowest_index"):
            raise ValueError(f"unknown tie policy {self.tie_policy!r}")
        if self.variant == "shadow" and self.shadow is None:
            raise ValueError("shadow rule needs a ShadowSpec")
        if self.variant == "steepest" and self.norm is None:
            raise ValueError("steepest edge rule needs a NormSpec")

    @classmethod
    def dantzig(cls, tie_policy="error"):
        return cls("dantzig", tie_policy=tie_policy)

    @classmethod
    def greatest(cls, tie_policy="error"):
        return cls("greatest", tie_policy=tie_policy)

    @classmethod
    def shadow_rule(cls, spec: ShadowSpec, tie_policy="error"):
        return cls("shadow", shadow=spec, tie_policy=tie_policy)

    @classmethod
    def steepest(cls, norm: NormSpec, tie_policy="error"):
        return cls("steepest", norm=norm, tie_policy=tie_policy)

    def syntax(self) -> str:
        if self.variant == "shadow":
            return "shadow:" + ",".join(str(a) for a in self.shadow.as_projection().w)
        if self.variant == "steepest":
            return "steepest:" + self.norm.name
        return self.variant


@dataclass
class PathRecord:
    vertices: list[VertexBasis]
    c_values: list[Scalar]
    rule: Optional[PivotRuleSpec] = None
    w_values: Optional[list[Scalar]] = None
    intervals: Optional[list[tuple[Scalar, Scalar]]] = None

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def tight_sequence(self) -> list[tuple[int, ...]]:
        return [v.tight for v in self.vertices]


class Edge(NamedTuple):
    leaving: int
    target: VertexBasis
    direction: QVector  # normalized d_j
    step: Scalar
    s: QVector  # target.point - source.point


def improving_edges(P: HPolytope, c: Sequence[Scalar], v: VertexBasis) -> list[Edge]:
    """Edges out of ``v`` with ``c . s > 0``; raises Degenerate on ``c . s == 0``."""
    out = []
    slack = None
    for j, d in edge_directions(P, v):
        gain = dot(c, d)
        if gain == 0:
            raise Degenerate(f"c is constant along the edge leaving facet {j} at {v.tight}")
        if gain > 0:
            if slack is None:
                slack = P.slack(v.point)
            t, u = step_along(P, v, j, d, slack)
            out.append(Edge(j, u, d, t, d * t))
    return out


def improving_neighbors(P: HPolytope, c: Sequence[Scalar], v: VertexBasis) -> list[tuple[VertexBasis, QVector]]:
    """The c-improving neighbors of ``v`` with edge vectors ``u - v``."""
    return [(e.target, e.s) for e in improving_edges(P, QVector(c), v)]


def _argmax(items: list, better, tie_policy: str, what: str):
    """``better(a, b)`` returns the sign of score(a) - score(b)."""
    best = items[0]
    tied = False
    for item in items[1:]:
        sign = better(item, best)
        if sign > 0:
            best, tied = item, False
        elif sign == 0:
            tied = True
    if tied and tie_policy == "error":
        raise Tie(f"{what}: two candidates share the maximal score")
    return best


def _slope_cmp(c: Sequence[Scalar], w: Sequence[Scalar]):
    def key_class(s):
        ws = dot(w, s)
        return (ws > 0) - (ws < 0), ws, dot(c, s)

    def cmp(a, b):
        ca, wa, na = key_class(a[1])
        cb, wb, nb = key_class(b[1])
        if ca != cb:
            return (ca > cb) - (ca < cb)
        if ca == 0:
            return (na > nb) - (na < nb)
        # na/wa vs nb/wb with wa*wb > 0
        lhs, rhs = na * wb, nb * wa
        return (lhs > rhs) - (lhs < rhs)

    return cmp


def select_shadow(candidates: list[tuple[VertexBasis, QVector]], spec: ShadowSpec, tie_policy: str = "error"):
    """Candidate maximizing the projected slope ``(c.s)/(w.s)``.

    Candidates with ``w.s > 0`` always beat those with ``w.s <= 0``.
    """
    if not candidates:
        raise ValueError("no candidates")
    spec = spec.as_projection()
    return _argmax(list(candidates), _slope_cmp(spec.c, spec.w), tie_policy, "shadow")


def select_steepest(candidates: list[tuple[VertexBasis, QVector]], c: Sequence[Scalar], norm: NormSpec,
                    tie_policy: str = "error"):
    """Candidate maximizing ``(c.s)/eta(s)``."""
    if not candidates:
        raise ValueError("no candidates")
    c = QVector(c)
    if norm.regular_required:
        check_regular(norm, len(c))
    scored = [(u, s, dot(c, s)) for u, s in candidates]

    def cmp(a, b):
        return compare_ratios(norm, a[2], a[1], b[2], b[1])

    u, s, _ = _argmax(scored, cmp, tie_policy, f"steepest {norm.name}")
    return u, s


def _select(rule: PivotRuleSpec, c: QVector, edges: list[Edge]) -> Edge:
    if rule.variant == "shadow":
        slope = _slope_cmp(c, rule.shadow.as_projection().w)
        return _argmax(edges, lambda a, b: slope((a, a.s), (b, b.s)), rule.tie_policy, "shadow")
    if rule.variant == "steepest":
        u, _ = select_steepest([(e.target, e.s) for e in edges], c, rule.norm, rule.tie_policy)
        return next(e for e in edges if e.target == u)
    if rule.variant == "dantzig":
        def cmp(a, b):
            x, y = dot(c, a.direction), dot(c, b.direction)
            return (x > y) - (x < y)
        return _argmax(edges, cmp, rule.tie_policy, "dantzig")

    def cmp(a, b):
        x, y = dot(c, a.s), dot(c, b.s)
        return (x > y) - (x < y)

    return _argmax(edges, cmp, rule.tie_policy, "greatest improvement")


def run_simplex(P: HPolytope, c: Sequence[Scalar], start: VertexBasis, rule: PivotRuleSpec,
                step_cap: int = DEFAULT_STEP_CAP) -> PathRecord:
    """Walk from ``start`` to the c-maximizer following ``rule``."""
    c = QVector(c)
    w = rule.shadow.as_projection().w if rule.variant == "shadow" else None
    v = start
    record = PathRecord([v], [dot(c, v.point)], rule, [dot(w, v.point)] if w is not None else None)
    while True:
        edges = improving_edges(P, c, v)
        if not edges:
            return record
        if record.length + 1 >= step_cap:
            raise StepCapExceeded(f"no optimum within {step_cap} steps")
        e = _select(rule, c, edges)
        v = e.target
        record.vertices.append(v)
        record.c_values.append(dot(c, v.point))
        if w is not None:
            record.w_values.append(dot(w, v.point))


def optimize_from(P: HPolytope, c: Sequence[Scalar], start: VertexBasis) -> VertexBasis:
    """Some c-maximizing vertex, reached by a greatest-improvement walk."""
    return run_simplex(P, c, start, PivotRuleSpec.greatest("lowest_index")).vertices[-1]


def parse_rule(text: str, w: Optional[Sequence[Scalar]] = None, c: Optional[Sequence[Scalar]] = None,
               n: Optional[int] = None, tie_policy: str = "error") -> PivotRuleSpec:
    """Parse ``dantzig | greatest | shadow[:<w>] | steepest:<norm>``.

    A bare ``shadow`` uses the projection-convention ``w`` supplied by the caller.
    """
    text = text.strip()
    low = text.lower()
    if low == "dantzig":
        return PivotRuleSpec.dantzig(tie_policy)
    if low == "greatest":
        return PivotRuleSpec.greatest(tie_policy)
    if low.startswith("shadow"):
        if ":" in text:
            w = parse_vector(text.split(":", 1)[1])
        if w is None or c is None:
            raise ValueError("shadow rule needs w and c")
        return PivotRuleSpec.shadow_rule(ShadowSpec(w, c, PROJECTION), tie_policy)
    if low.startswith("steepest:"):
        return PivotRuleSpec.steepest(parse_norm(text.split(":", 1)[1], n), tie_policy)
    raise ValueError(f"unknown rule syntax {text!r}")
