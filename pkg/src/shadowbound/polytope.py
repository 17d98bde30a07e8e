"""Simple bounded polytopes in inequality form and their normal fans."""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    Degenerate,
    DimensionMismatch,
    Infeasible,
    LimitExceeded,
    Singular,
    UnboundedEdge,
)
from .exact import ONE, ZERO, QMatrix, QVector, Scalar, dot, invert, rank, solve

DEFAULT_VERTEX_CAP = 2**20
EXHAUSTIVE_BASIS_CAP = 10**6


def _direction_key(row: QVector) -> tuple:
    # rows that are positive multiples of each other share this key
    lead = next(abs(a) for a in row if a)
    return tuple(a / lead for a in row)


@dataclass(frozen=True, eq=False)
class HPolytope:
    """``{x : A x <= b}`` for a simple, bounded, full-dimensional polytope.

    Rows of ``A`` are outer facet normals. ``trusted_bounded`` marks
    instances too large to validate by enumeration.
    """

    A: QMatrix
    b: QVector
    labels: tuple[str, ...] = ()
    trusted_bounded: bool = False
    _inv_cache: dict = field(default_factory=dict, repr=False, compare=False)
    _sparse: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        A = self.A if isinstance(self.A, QMatrix) else QMatrix(self.A)
        b = self.b if isinstance(self.b, QVector) else QVector(self.b)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        if len(A) != len(b):
            raise DimensionMismatch(f"A has {len(A)} rows but b has {len(b)} entries")
        labels = tuple(self.labels) if self.labels else tuple(f"f{i}" for i in range(len(A)))
        if len(labels) != len(A):
            raise DimensionMismatch("one label per facet required")
        object.__setattr__(self, "labels", labels)
        seen = {}
        for i, row in enumerate(A):
            if row.is_zero():
                raise ValueError(f"row {i} is zero")
            key = _direction_key(row)
            if key in seen:
                raise ValueError(f"rows {seen[key]} and {i} are positive multiples of each other")
            seen[key] = i

    @property
    def m(self) -> int:
        return len(self.A)

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def basis_inverse(self, tight: tuple[int, ...]) -> QMatrix:
        """Inverse of the tight-row submatrix, memoized per tight set."""
        inv = self._inv_cache.get(tight)
        if inv is None:
            inv = invert(QMatrix._raw([self.A[i] for i in tight]))
            if len(self._inv_cache) < 200_000:
                self._inv_cache[tight] = inv
        return inv

    @property
    def sparse_rows(self) -> list[tuple[tuple[int, Scalar], ...]]:
        """Rows as ``((j, a_ij), ...)`` over the nonzero entries."""
        if not self._sparse:
            self._sparse.extend(tuple((j, a) for j, a in enumerate(row) if a) for row in self.A)
        return self._sparse

    def slack(self, x: Sequence[Scalar]) -> QVector:
        return QVector._raw([bi - sum((a * x[j] for j, a in row), ZERO)
                             for row, bi in zip(self.sparse_rows, self.b)])

    def add_facets(self, rows, rhs, labels) -> "HPolytope":
        return HPolytope(
            QMatrix._raw(tuple(self.A) + tuple(QVector(r) for r in rows)),
            QVector._raw(tuple(self.b) + tuple(QVector(rhs))),
            self.labels + tuple(labels),
            self.trusted_bounded,
        )

    def drop_facet(self, i: int) -> "HPolytope":
        keep = [j for j in range(self.m) if j != i]
        return HPolytope(
            QMatrix._raw([self.A[j] for j in keep]),
            QVector._raw([self.b[j] for j in keep]),
            tuple(self.labels[j] for j in keep),
            self.trusted_bounded,
        )


@dataclass(frozen=True, eq=False)
class VertexBasis:
    """A vertex identified by its sorted set of tight facet indices."""

    point: QVector
    tight: tuple[int, ...]

    def __eq__(self, other):
        return isinstance(other, VertexBasis) and self.tight == other.tight

    def __hash__(self):
        return hash(self.tight)

    def __repr__(self):
        return f"VertexBasis(tight={self.tight}, point={self.point!r})"


@dataclass(frozen=True, eq=False)
class SimplicialCone:
    """Cone generated by ``n`` linearly independent rays (rows of ``rays``)."""

    rays: QMatrix
    origin_tight: Optional[tuple[int, ...]] = None
    _normals: list = field(default_factory=list, repr=False, compare=False)

    @property
    def facet_normals(self) -> QMatrix:
        """Rows ``h_j`` with ``h_j . ray_i = delta_ij``."""
        if not self._normals:
            self._normals.append(invert(self.rays).T)
        return self._normals[0]

    def coefficients(self, z: Sequence[Scalar]) -> QVector:
        """``mu`` with ``z = sum_j mu_j ray_j``."""
        return self.facet_normals @ QVector(z)


def vertex_from_basis(P: HPolytope, tight: Iterable[int]) -> VertexBasis:
    """Solve the tight rows for a vertex.

    Raises Singular if the rows are dependent, Infeasible if the point
    violates another constraint, Degenerate if it makes another one tight.
    """
    tight = tuple(sorted(tight))
    if len(tight) != P.n or len(set(tight)) != P.n:
        raise DimensionMismatch(f"need {P.n} distinct tight indices, got {tight}")
    if any(not 0 <= i < P.m for i in tight):
        raise IndexError(f"tight index out of range in {tight}")
    inv = P.basis_inverse(tight)
    x = inv @ QVector._raw([P.b[i] for i in tight])
    tset = set(tight)
    extra = None
    for i, (row, bi) in enumerate(zip(P.sparse_rows, P.b)):
        if i in tset:
            continue
        s = bi - sum((a * x[j] for j, a in row), ZERO)
        if s < 0:
            raise Infeasible(f"basis {tight} violates facet {i}")
        if s == 0 and extra is None:
            extra = i
    # infeasibility wins: an infeasible point touching another facet is not a vertex
    if extra is not None:
        raise Degenerate(f"basis {tight}: facet {extra} is also tight (polytope not simple here)")
    return VertexBasis(x, tight)


def edge_directions(P: HPolytope, v: VertexBasis) -> list[tuple[int, QVector]]:
    """For each tight index j, the direction ``d`` with ``a_j.d = -1`` and
    ``a_i.d = 0`` for the other tight rows."""
    inv = P.basis_inverse(v.tight)
    out = []
    for pos, j in enumerate(v.tight):
        out.append((j, QVector._raw([-r[pos] for r in inv])))
    return out


def _ratio_test(P: HPolytope, v: VertexBasis, leaving: int, d: QVector, slack) -> tuple[Scalar, int, Scalar]:
    """(step, entering row, a_entering . d) for the edge leaving ``leaving``."""
    best = None
    entering = []
    best_rate = ZERO
    tset = set(v.tight)
    for i, row in enumerate(P.sparse_rows):
        if i in tset:
            continue
        rate = ZERO
        for j, a in row:
            if d[j]:
                rate += a * d[j]
        if rate > 0:
            t = slack[i] / rate
            if best is None or t < best:
                best, entering, best_rate = t, [i], rate
            elif t == best:
                entering.append(i)
    if best is None:
        raise UnboundedEdge(f"edge leaving facet {leaving} at {v.tight} is unbounded")
    if len(entering) > 1 or best == 0:
        raise Degenerate(f"degenerate pivot at {v.tight} leaving {leaving}: entering {entering}")
    return best, entering[0], best_rate


def _seed_inverse(P: HPolytope, v: VertexBasis, leaving: int, entering: int, d: QVector, rate: Scalar,
                  new_tight: tuple[int, ...]) -> None:
    """Cache the neighbor's basis inverse by a rank-one update of v's.

    Replacing row p of B by a_e gives
    ``B'^{-1} = B^{-1} - d (a_e^T B^{-1} - e_p^T) / (a_e . d)``;
    the columns are then reordered to the sorted tight set.
    """
    if new_tight in P._inv_cache or len(P._inv_cache) >= 200_000:
        return
    inv = P.basis_inverse(v.tight)
    pos = v.tight.index(leaving)
    g = list(inv.vecmat(P.A[entering]))
    g[pos] -= 1
    g = [x / rate for x in g]
    rows = [[a - dr * gk if dr and gk else a for a, gk in zip(r, g)] for r, dr in zip(inv, d)]
    order = list(v.tight)
    order[pos] = entering
    perm = sorted(range(len(order)), key=lambda k: order[k])
    P._inv_cache[new_tight] = QMatrix._raw([QVector._raw([r[k] for k in perm]) for r in rows])


def step_along(P: HPolytope, v: VertexBasis, leaving: int, d: QVector,
               slack: Optional[Sequence[Scalar]] = None) -> tuple[Scalar, VertexBasis]:
    """Ratio test from ``v`` along ``d``; returns (step length, neighbor).

    ``slack`` may pass a precomputed ``b - A v``.
    """
    if slack is None:
        slack = P.slack(v.point)
    t, entering, rate = _ratio_test(P, v, leaving, d, slack)
    new_tight = tuple(sorted((set(v.tight) - {leaving}) | {entering}))
    _seed_inverse(P, v, leaving, entering, d, rate, new_tight)
    return t, VertexBasis(v.point + d * t, new_tight)


def neighbors(P: HPolytope, v: VertexBasis) -> list[tuple[int, VertexBasis]]:
    """All ``n`` neighbors of ``v`` as (leaving facet index, neighbor)."""
    slack = P.slack(v.point)
    return [(j, step_along(P, v, j, d, slack)[1]) for j, d in edge_directions(P, v)]


def enumerate_vertices(P: HPolytope, seed: VertexBasis, cap: int = DEFAULT_VERTEX_CAP) -> set[VertexBasis]:
    """Breadth-first closure of ``seed`` under :func:`neighbors`."""
    seen = {seed.tight: seed}
    queue = deque([seed])
    while queue:
        v = queue.popleft()
        slack = P.slack(v.point)
        tset = set(v.tight)
        for j, d in edge_directions(P, v):
            t, entering, rate = _ratio_test(P, v, j, d, slack)
            new_tight = tuple(sorted((tset - {j}) | {entering}))
            if new_tight in seen:
                continue
            _seed_inverse(P, v, j, entering, d, rate, new_tight)
            u = VertexBasis(v.point + d * t, new_tight)
            seen[new_tight] = u
            if len(seen) > cap:
                raise LimitExceeded(f"more than {cap} vertices")
            queue.append(u)
    return set(seen.values())


def enumerate_by_bases(P: HPolytope, cap: int = EXHAUSTIVE_BASIS_CAP) -> set[VertexBasis]:
    """Oracle: every size-n row subset that solves to a strictly feasible vertex.

    Non-simple vertices (extra tight rows) raise Degenerate.
    """
    if math.comb(P.m, P.n) > cap:
        raise LimitExceeded(f"C({P.m},{P.n}) exceeds {cap}")
    out = set()
    for tight, _, _ in _feasible_bases(P):
        out.add(vertex_from_basis(P, tight))
    return out


def _feasible_bases(P: HPolytope):
    """Yield (tight, point, slack) for every nonsingular n-subset with a feasible point."""
    for tight in itertools.combinations(range(P.m), P.n):
        try:
            x = solve(QMatrix._raw([P.A[i] for i in tight]), [P.b[i] for i in tight])
        except Singular:
            continue
        s = P.slack(x)
        if min(s) >= 0:
            yield tight, x, s


def _feasible_points(P: HPolytope) -> dict[tuple, int]:
    """Map each vertex point (exhaustive bases) to its tight-row count."""
    pts = {}
    for _, x, s in _feasible_bases(P):
        pts[tuple(x)] = sum(1 for t in s if t == 0)
    return pts


def is_simple(P: HPolytope, seed: Optional[VertexBasis] = None) -> bool:
    """True iff every vertex lies on exactly ``n`` facets."""
    if math.comb(P.m, P.n) <= EXHAUSTIVE_BASIS_CAP or seed is None:
        return all(c == P.n for c in _feasible_points(P).values())
    try:
        enumerate_vertices(P, seed)
    except Degenerate:
        return False
    return True


def is_bounded(P: HPolytope, seed: Optional[VertexBasis] = None, cap: int = DEFAULT_VERTEX_CAP) -> bool:
    """Exact boundedness check by edge-graph traversal.

    A pointed polyhedron is bounded iff no vertex has an unbounded edge, and
    its bounded edges connect all vertices.
    """
    if rank(P.A) < P.n:
        return False
    seed = seed if seed is not None else find_vertex(P)
    try:
        enumerate_vertices(P, seed, cap)
    except UnboundedEdge:
        return False
    return True


def normal_cone(P: HPolytope, v: VertexBasis) -> SimplicialCone:
    return SimplicialCone(QMatrix._raw([P.A[i] for i in v.tight]), v.tight)


def cone_contains(C: SimplicialCone, z: Sequence[Scalar], strict: bool = False) -> bool:
    mu = C.coefficients(z)
    if strict:
        return all(m > 0 for m in mu)
    return all(m >= 0 for m in mu)


def segment_cone_interval(
    C: SimplicialCone, w: Sequence[Scalar], c: Sequence[Scalar]
) -> Optional[tuple[Scalar, Scalar]]:
    """Closed interval of ``lam`` in [0, 1] with ``lam w + (1-lam) c`` in C."""
    mu_w = C.coefficients(w)
    mu_c = C.coefficients(c)
    lo, hi = ZERO, ONE
    for a, b in zip(mu_c, mu_w):
        slope = b - a
        # need a + lam * slope >= 0
        if slope > 0:
            lo = max(lo, -a / slope)
        elif slope < 0:
            hi = min(hi, a / -slope)
        elif a < 0:
            return None
    if lo > hi:
        return None
    return (lo, hi)


def inradius_linf(C: SimplicialCone, z: Sequence[Scalar]) -> Scalar:
    """Largest r such that the open l-inf ball of radius r about z sits in C."""
    return min(dot(h, z) / h.norm1() for h in C.facet_normals)


@dataclass
class NormalFan:
    """Normal cones keyed by vertex tight set."""

    cones: dict[tuple[int, ...], SimplicialCone]

    @classmethod
    def of(cls, P: HPolytope, vertices: Iterable[VertexBasis]) -> "NormalFan":
        return cls({v.tight: normal_cone(P, v) for v in sorted(vertices, key=lambda u: u.tight)})

    def locate(self, z: Sequence[Scalar], strict: bool = True) -> list[tuple[int, ...]]:
        return [k for k, C in self.cones.items() if cone_contains(C, z, strict)]


def find_vertex(P: HPolytope) -> VertexBasis:
    """Some vertex of P: an LP solve proposes a basis, exact arithmetic confirms it."""
    from scipy.optimize import linprog
    import numpy as np

    A = np.array([[float(a) for a in row] for row in P.A])
    b = np.array([float(x) for x in P.b])
    obj = np.array([1.0 + 0.1234567 * (i + 1) ** 0.5 for i in range(P.n)])
    res = linprog(obj, A_ub=A, b_ub=b, bounds=[(None, None)] * P.n, method="highs-ds")
    if res.status == 0:
        slack = b - A @ res.x
        order = sorted(range(P.m), key=lambda i: abs(slack[i]))
        picked: list[int] = []
        for i in order:
            if rank([P.A[j] for j in picked + [i]]) == len(picked) + 1:
                picked.append(i)
            if len(picked) == P.n:
                break
        try:
            return vertex_from_basis(P, picked)
        except (Singular, Infeasible, Degenerate, DimensionMismatch):
            pass
    for tight in itertools.combinations(range(P.m), P.n):
        try:
            return vertex_from_basis(P, tight)
        except (Singular, Infeasible, Degenerate):
            continue
    raise Infeasible("polytope has no simple vertex")
