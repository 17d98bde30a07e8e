"""Exact-arithmetic constructions of polytopes with long shadow paths."""

__version__ = "0.1.0"

from .exact import Q, QMatrix, QVector, dot, invert, rank, solve  # noqa: E402
from .polytope import HPolytope, VertexBasis, enumerate_vertices, normal_cone, vertex_from_basis  # noqa: E402
from .norms import NormSpec  # noqa: E402
from .pivot import PivotRuleSpec, ShadowSpec, run_simplex  # noqa: E402

__all__ = [
    "HPolytope", "NormSpec", "PivotRuleSpec", "Q", "QMatrix", "QVector", "ShadowSpec", "VertexBasis",
    "dot", "enumerate_vertices", "invert", "normal_cone", "rank", "run_simplex", "solve", "vertex_from_basis",
]
