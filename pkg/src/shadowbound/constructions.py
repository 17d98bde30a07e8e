"""Generators and transforms for adversarial polytopes.

* ``goldfarb_cube`` builds a deformed-product cube whose shadow path visits
  every vertex, validated by the parametric-path oracle before it is returned.
* ``vertex_cut`` and ``thin_cone`` refine one normal cone by cutting vertices.
* ``many_from_one`` / ``fixed_c_variant`` thin the endpoint cones of a long
  shadow path so that every shadow path between the new endpoints is long.
* ``compress`` applies the linear map A_k that fixes w and shrinks its
  orthogonal complement, so steepest-edge rules imitate the shadow rule.
"""
from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import gmpy2

from .errors import (
    BallNotInterior,
    DegeneratePath,
    DeltaUnderflow,
    EpsTooLarge,
    GenerationFailed,
    KSearchExhausted,
    NonGeneric,
    NotInterior,
    Tie,
    UncertifiableComparison,
)
from .exact import ONE, ZERO, Q, QMatrix, QVector, Scalar, dot, invert
from .norms import NormSpec, compare_ratios
from .pivot import (
    PARAMETRIC,
    PathRecord,
    PivotRuleSpec,
    ShadowSpec,
    improving_edges,
    run_simplex,
)
from .polytope import (
    HPolytope,
    VertexBasis,
    cone_contains,
    enumerate_vertices,
    inradius_linf,
    neighbors,
    normal_cone,
    vertex_from_basis,
)

GOLDFARB_CAP = 14
DELTA_HALVINGS = 200
K_CAP = 2**64


@dataclass(frozen=True)
class Ball:
    """Open l-infinity ball."""

    center: QVector
    radius: Scalar

    def __post_init__(self):
        object.__setattr__(self, "center", QVector(self.center))
        object.__setattr__(self, "radius", Q(self.radius))
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    def contains(self, x: Sequence[Scalar]) -> bool:
        return all(abs(a - b) < self.radius for a, b in zip(x, self.center))

    def corners(self):
        for signs in itertools.product((-1, 1), repeat=len(self.center)):
            yield QVector._raw([c + s * self.radius for c, s in zip(self.center, signs)])


def ball_in_cone(D: Ball, cone) -> bool:
    """Open ball inside the open cone, via the exact l-inf inradius."""
    return inradius_linf(cone, D.center) >= D.radius


# -- instance generators ----------------------------------------------------


def unit_cube(n: int) -> tuple[HPolytope, VertexBasis]:
    """[0,1]^n with rows -x_i <= 0 (index 2i) and x_i <= 1 (index 2i+1)."""
    rows, rhs, labels = [], [], []
    for i in range(n):
        rows.append(QVector.unit(n, i) * -1)
        rhs.append(ZERO)
        labels.append(f"x{i + 1}>=0")
        rows.append(QVector.unit(n, i))
        rhs.append(ONE)
        labels.append(f"x{i + 1}<=1")
    P = HPolytope(QMatrix._raw(rows), QVector._raw(rhs), tuple(labels))
    return P, vertex_from_basis(P, range(0, 2 * n, 2))


def cube_vertex(P: HPolytope, bits: Sequence[int]) -> VertexBasis:
    """Vertex of :func:`unit_cube` with the given 0/1 coordinates."""
    return vertex_from_basis(P, [2 * i + int(b) for i, b in enumerate(bits)])


def klee_minty(n: int, eps: Scalar = gmpy2.mpq(1, 3)) -> tuple[HPolytope, VertexBasis]:
    """Klee-Minty cube ``0 <= x1 <= 1, eps x_{k-1} <= x_k <= 1 - eps x_{k-1}``."""
    eps = Q(eps)
    return _deformed_product(n, eps, ZERO)


def _deformed_product(n: int, beta: Scalar, gamma: Scalar) -> tuple[HPolytope, VertexBasis]:
    """``beta (x_{k-1} - gamma x_{k-2}) <= x_k <= 1 - beta (x_{k-1} - gamma x_{k-2})``."""
    rows, rhs, labels = [], [], []
    for k in range(n):
        lo = [ZERO] * n
        up = [ZERO] * n
        lo[k] = -ONE
        up[k] = ONE
        if k >= 1:
            lo[k - 1] = beta
            up[k - 1] = beta
        if k >= 2:
            lo[k - 2] = -beta * gamma
            up[k - 2] = -beta * gamma
        rows += [QVector._raw(lo), QVector._raw(up)]
        rhs += [ZERO, ONE]
        labels += [f"x{k + 1}:lower", f"x{k + 1}:upper"]
    P = HPolytope(QMatrix._raw(rows), QVector._raw(rhs), tuple(labels))
    return P, vertex_from_basis(P, range(0, 2 * n, 2))


# beta, gamma, tilt of the shadow direction; first passing entry wins
GOLDFARB_GRID = [
    (gmpy2.mpq(b), gmpy2.mpq(g), gmpy2.mpq(t))
    for b, g, t in [
        ("1/4", "1/16", "1/1000"),
        ("2/7", "1/13", "1/997"),
        ("1/3", "1/17", "1/1009"),
        ("1/5", "1/23", "1/2003"),
        ("3/10", "1/19", "1/4001"),
    ]
]


def goldfarb_instance(n: int, beta, gamma, tilt) -> tuple[HPolytope, ShadowSpec, VertexBasis]:
    """Unvalidated deformed-product cube with objective ``c = e_n`` and
    parametric auxiliary ``w = tilt e_{n-1} - e_n``."""
    beta, gamma, tilt = Q(beta), Q(gamma), Q(tilt)
    P, start = _deformed_product(n, beta, gamma)
    c = QVector.unit(n, n - 1)
    w = QVector.unit(n, n - 2) * tilt - c
    return P, ShadowSpec(w, c, PARAMETRIC), start


@functools.lru_cache(maxsize=None)
def _grid_passes(n: int, idx: int) -> bool:
    from .analysis import parametric_path

    P, spec, start = goldfarb_instance(n, *GOLDFARB_GRID[idx])
    try:
        path = parametric_path(P, spec, start)
        run = run_simplex(P, spec.c, start, PivotRuleSpec.shadow_rule(spec))
    except (NonGeneric, Tie):
        return False
    if path.length != 2**n - 1 or run.tight_sequence != path.tight_sequence:
        return False
    return len({v.tight for v in path.vertices}) == 2**n


def goldfarb_cube(n: int, params: Optional[tuple] = None, cap: int = GOLDFARB_CAP,
                  validate_up_to: int = 10) -> tuple[HPolytope, ShadowSpec, VertexBasis]:
    """Combinatorial n-cube with a shadow path through all 2^n vertices.

    Parameters come from ``params`` (a preset ``(beta, gamma, tilt)``) or
    from the first grid entry that passes the parametric-path oracle at n and
    at every smaller dimension. Validation runs for n <= ``validate_up_to``.
    """
    if not 2 <= n <= cap:
        raise GenerationFailed(f"n={n} outside supported range 2..{cap}")
    if params is not None:
        P, spec, start = goldfarb_instance(n, *params)
        if n <= validate_up_to:
            from .analysis import parametric_path

            try:
                ok = parametric_path(P, spec, start).length == 2**n - 1
            except NonGeneric:
                ok = False
            if not ok:
                raise GenerationFailed(f"preset parameters fail the all-vertices check at n={n}")
        return P, spec, start
    for idx in range(len(GOLDFARB_GRID)):
        if all(_grid_passes(k, idx) for k in range(2, min(n, validate_up_to) + 1)):
            return goldfarb_instance(n, *GOLDFARB_GRID[idx])
    raise GenerationFailed(f"no grid parameters pass the all-vertices check at n={n}")


def goldfarb_params(n: int, validate_up_to: int = 10) -> tuple:
    for idx in range(len(GOLDFARB_GRID)):
        if all(_grid_passes(k, idx) for k in range(2, min(n, validate_up_to) + 1)):
            return GOLDFARB_GRID[idx]
    raise GenerationFailed(f"no grid parameters pass at n={n}")


def random_polygon_rows(rng: random.Random, k: int) -> list[tuple[int, int]]:
    """k integer directions in angular order with every gap below pi."""
    import math

    while True:
        dirs = set()
        while len(dirs) < k:
            a, b = rng.randint(-6, 6), rng.randint(-6, 6)
            if (a, b) != (0, 0) and math.gcd(a, b) == 1:
                dirs.add((a, b))
        dirs = sorted(dirs, key=lambda d: math.atan2(d[1], d[0]))
        angles = [math.atan2(d[1], d[0]) for d in dirs]
        gaps = [b - a for a, b in zip(angles, angles[1:])] + [angles[0] + 2 * math.pi - angles[-1]]
        if max(gaps) < math.pi - 1e-9:
            return dirs


def random_product(n: int, rng: random.Random) -> HPolytope:
    """Product of random polygons (and one interval when n is odd)."""
    rows, rhs = [], []
    col = 0
    while col < n:
        if n - col >= 2:
            for a, b in random_polygon_rows(rng, rng.randint(3, 5)):
                r = [ZERO] * n
                r[col], r[col + 1] = gmpy2.mpq(a), gmpy2.mpq(b)
                rows.append(QVector._raw(r))
                rhs.append(gmpy2.mpq(rng.randint(4, 9), rng.randint(2, 4)))
            col += 2
        else:
            for sign in (-1, 1):
                r = [ZERO] * n
                r[col] = gmpy2.mpq(sign)
                rows.append(QVector._raw(r))
                rhs.append(gmpy2.mpq(rng.randint(1, 5), 2))
            col += 1
    return HPolytope(QMatrix._raw(rows), QVector._raw(rhs))


def random_rational_vector(rng: random.Random, n: int, scale: int = 50) -> QVector:
    while True:
        v = QVector._raw([gmpy2.mpq(rng.randint(-scale, scale), rng.randint(1, 7)) for _ in range(n)])
        if not v.is_zero():
            return v


def random_interior(rng: random.Random, cone) -> QVector:
    """Random point in the open cone as a positive combination of its rays."""
    out = QVector.zeros(cone.rays.shape[1])
    for r in cone.rays:
        out = out + r * gmpy2.mpq(rng.randint(1, 100), rng.randint(1, 9))
    return out


def random_cut(P: HPolytope, rng: random.Random, start: VertexBasis) -> HPolytope:
    """Cut a random vertex of P with a random interior direction of its cone."""
    verts = sorted(enumerate_vertices(P, start), key=lambda v: v.tight)
    v = rng.choice(verts)
    return vertex_cut(P, v, random_interior(rng, normal_cone(P, v)))


# -- cone refinement ----------------------------------------------------------


def vertex_cut(P: HPolytope, v: VertexBasis, w: Sequence[Scalar], eps: Optional[Scalar] = None,
               label: Optional[str] = None) -> HPolytope:
    """Intersect P with ``w.x <= w.v - eps``, cutting off exactly the vertex v.

    ``w`` must lie in the open normal cone at v. The default ``eps`` is half
    the smallest drop of ``w`` from v to a neighbor.
    """
    w = QVector(w)
    C = normal_cone(P, v)
    if not cone_contains(C, w, strict=True):
        raise NotInterior(f"w is not in the interior of the normal cone at {v.tight}")
    wv = dot(w, v.point)
    gap = min(wv - dot(w, u.point) for _, u in neighbors(P, v))
    if eps is None:
        eps = gap / 2
    else:
        eps = Q(eps)
        if not 0 < eps < gap:
            raise EpsTooLarge(f"eps={eps} must lie in (0, {gap})")
    return P.add_facets([w], [wv - eps], [label or f"cut{P.m}"])


def cut_children(P_cut: HPolytope, v: VertexBasis) -> list[VertexBasis]:
    """The n vertices created when ``v`` was cut by the last facet of ``P_cut``."""
    new = P_cut.m - 1
    return [vertex_from_basis(P_cut, (set(v.tight) - {j}) | {new}) for j in v.tight]


def thin_cone(P: HPolytope, v: VertexBasis, D: Ball) -> tuple[HPolytope, VertexBasis]:
    """n successive vertex cuts leaving a vertex whose cone rays all lie in D.

    Cut normals: ``w_1 = D.center``; ``w_{k+1} = mean(w_1..w_k) + delta *
    (sum of the remaining original rays)`` with delta halved until the point
    is inside D. The returned vertex is tight exactly on the n new facets.
    """
    C = normal_cone(P, v)
    if not ball_in_cone(D, C):
        raise BallNotInterior(f"ball is not inside the open normal cone at {v.tight}")
    n = P.n
    original = list(v.tight)
    rays = {j: P.A[j] for j in original}
    cuts: list[QVector] = []
    cut_idx: list[int] = []
    cur_P, cur_v = P, v
    for k in range(n):
        if k == 0:
            w_next = D.center
        else:
            mean = sum(cuts[1:], cuts[0]) / k
            rest = QVector.zeros(n)
            for j in original[k:]:
                rest = rest + rays[j]
            delta = D.radius / (1 + rest.norm_inf())
            for _ in range(DELTA_HALVINGS):
                w_next = mean + rest * delta
                if D.contains(w_next):
                    break
                delta /= 2
            else:
                raise DeltaUnderflow(f"delta halving failed at stage {k + 1}")
        new_P = vertex_cut(cur_P, cur_v, w_next, label=f"thin{len(cut_idx) + 1}@{cur_P.m}")
        new_index = new_P.m - 1
        tight = (set(cur_v.tight) - {original[k]}) | {new_index}
        cur_P, cur_v = new_P, vertex_from_basis(new_P, tight)
        cuts.append(w_next)
        cut_idx.append(new_index)
    return cur_P, cur_v


# -- long-path certificates --------------------------------------------------


@dataclass
class Certificate:
    """Data whose exact check implies every shadow path a -> b has length >= alpha.

    ``segment_points[i] = lambdas[i] w + (1 - lambdas[i]) c`` lies in the
    open cone of the polytope's rows ``path_tight[i]``; ``epsilon`` is the
    smallest l-inf inradius among them. ``D_c`` is None when c is fixed.
    """

    alpha: int
    epsilon: Scalar
    segment_points: list[QVector]
    lambdas: list[Scalar]
    path_tight: list[tuple[int, ...]]
    D_w: Ball
    D_c: Optional[Ball]
    cut_facets: list[list[int]]
    c_fixed: Optional[QVector] = None
    source_path: Optional[PathRecord] = field(default=None, repr=False)


def _segment_certificate(P: HPolytope, spec: ShadowSpec, start: Optional[VertexBasis]):
    from .analysis import parametric_path

    spec = spec.as_parametric()
    try:
        path = parametric_path(P, spec, start)
    except NonGeneric as exc:
        raise DegeneratePath(str(exc)) from exc
    if path.length < 1:
        raise DegeneratePath("shadow path has length 0")
    lambdas = []
    last = path.length
    for i, (lo, hi) in enumerate(path.intervals):
        if i == 0:
            lambdas.append(ONE)
        elif i == last:
            lambdas.append(ZERO)
        else:
            lambdas.append((lo + hi) / 2)
    points = [spec.w * lam + spec.c * (1 - lam) for lam in lambdas]
    radii = [inradius_linf(normal_cone(P, v), z) for v, z in zip(path.vertices, points)]
    eps = min(radii)
    if eps <= 0:
        raise DegeneratePath("a segment point lies on a cone boundary")
    return spec, path, lambdas, points, eps


def many_from_one(P: HPolytope, spec: ShadowSpec, start: Optional[VertexBasis] = None):
    """Thin both endpoint cones of the (w, c) shadow path.

    Returns ``(Q, a, b, certificate)`` with Q having m + 2n facets.
    """
    spec, path, lambdas, points, eps = _segment_certificate(P, spec, start)
    u, v = path.vertices[0], path.vertices[-1]
    D_w, D_c = Ball(spec.w, eps), Ball(spec.c, eps)
    Q1, a = thin_cone(P, u, D_w)
    v1 = vertex_from_basis(Q1, v.tight)
    Qp, b = thin_cone(Q1, v1, D_c)
    a = vertex_from_basis(Qp, a.tight)
    m, n = P.m, P.n
    cert = Certificate(
        alpha=path.length,
        epsilon=eps,
        segment_points=points,
        lambdas=lambdas,
        path_tight=path.tight_sequence,
        D_w=D_w,
        D_c=D_c,
        cut_facets=[list(range(m, m + n)), list(range(m + n, m + 2 * n))],
        source_path=path,
    )
    return Qp, a, b, cert


def fixed_c_variant(P: HPolytope, spec: ShadowSpec, start: Optional[VertexBasis] = None):
    """Thin only the start cone; returns ``(Q, a, certificate)`` with m + n facets."""
    spec, path, lambdas, points, eps = _segment_certificate(P, spec, start)
    u = path.vertices[0]
    D_w = Ball(spec.w, eps)
    Qp, a = thin_cone(P, u, D_w)
    cert = Certificate(
        alpha=path.length,
        epsilon=eps,
        segment_points=points,
        lambdas=lambdas,
        path_tight=path.tight_sequence,
        D_w=D_w,
        D_c=None,
        cut_facets=[list(range(P.m, P.m + P.n)), []],
        c_fixed=spec.c,
        source_path=path,
    )
    return Qp, a, cert


# -- linear transforms ---------------------------------------------------------


@dataclass(frozen=True)
class CompressSpec:
    """``A_k = I/k + (1 - 1/k) w w^T / (w^T w)``: fixes w, shrinks w-perp by 1/k."""

    w: QVector
    k: Scalar

    def __post_init__(self):
        object.__setattr__(self, "w", QVector(self.w))
        object.__setattr__(self, "k", Q(self.k))
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.w.is_zero():
            raise ValueError("w must be nonzero")

    def _build(self, diag: Scalar, proj: Scalar) -> QMatrix:
        w, n = self.w, len(self.w)
        ww = w.norm2_sq()
        return QMatrix._raw([
            QVector._raw([(diag if i == j else ZERO) + proj * w[i] * w[j] / ww for j in range(n)])
            for i in range(n)
        ])

    @property
    def matrix(self) -> QMatrix:
        return self._build(1 / self.k, 1 - 1 / self.k)

    @property
    def inverse(self) -> QMatrix:
        return self._build(self.k, 1 - self.k)

    def apply(self, x: Sequence[Scalar]) -> QVector:
        """``A_k x`` without forming the matrix."""
        x = QVector(x)
        w = self.w
        along = dot(w, x) / w.norm2_sq()
        return QVector._raw([xi / self.k + (1 - 1 / self.k) * along * wi for xi, wi in zip(x, w)])

    def apply_inverse(self, x: Sequence[Scalar]) -> QVector:
        x = QVector(x)
        w = self.w
        along = dot(w, x) / w.norm2_sq()
        return QVector._raw([xi * self.k + (1 - self.k) * along * wi for xi, wi in zip(x, w)])


def compress(P: HPolytope, c: Sequence[Scalar], spec: CompressSpec) -> tuple[HPolytope, QVector]:
    """H-description of A_k(P) and the objective c' with ``c'.A_k x = c.x``."""
    rows = [spec.apply_inverse(a) for a in P.A]
    out = HPolytope(QMatrix._raw(rows), P.b, P.labels, P.trusted_bounded)
    return out, spec.apply_inverse(c)


def canonicalize_w_to_e1(P: HPolytope, spec: ShadowSpec) -> tuple[HPolytope, ShadowSpec, QMatrix]:
    """Change coordinates so the auxiliary objective becomes e_1.

    Returns ``T`` with ``T w = e_1``. Objective vectors and facet normals map
    by ``T`` and points by ``T^{-T}``, so every objective value (hence every
    path) is preserved.
    """
    w = spec.w
    n = len(w)
    p = next(i for i, a in enumerate(w) if a)
    # basis [w, e_i (i != p)] as columns; T is its inverse
    cols = [w] + [QVector.unit(n, i) for i in range(n) if i != p]
    B = QMatrix._raw(cols).T
    T = invert(B)
    rows = [T @ a for a in P.A]
    P2 = HPolytope(QMatrix._raw(rows), P.b, P.labels, P.trusted_bounded)
    return P2, ShadowSpec(T @ w, T @ spec.c, spec.convention), T


def transform_vertex(P_new: HPolytope, v: VertexBasis) -> VertexBasis:
    """Same tight set on the transformed polytope."""
    return vertex_from_basis(P_new, v.tight)


# -- k search ------------------------------------------------------------------


@dataclass
class _PathEdges:
    scores: list[list[tuple[Scalar, QVector]]]  # per path vertex: (c.s, s) per improving edge
    chosen: list[int]  # index of the path edge among them


def _path_edges(P: HPolytope, c: QVector, path: PathRecord) -> _PathEdges:
    scores, chosen = [], []
    for v, nxt in zip(path.vertices, path.vertices[1:]):
        edges = improving_edges(P, c, v)
        scores.append([(dot(c, e.s), e.s) for e in edges])
        chosen.append(next(i for i, e in enumerate(edges) if e.target == nxt))
    return _PathEdges(scores, chosen)


def _steepest_follows(pe: _PathEdges, norm: NormSpec, spec: CompressSpec) -> bool:
    """Does the eta-steepest rule on A_k(P) pick every path edge strictly?"""
    for cands, pick in zip(pe.scores, pe.chosen):
        gain_p, s_p = cands[pick]
        sp = spec.apply(s_p)
        for i, (gain, s) in enumerate(cands):
            if i == pick:
                continue
            try:
                if compare_ratios(norm, gain_p, sp, gain, spec.apply(s)) <= 0:
                    return False
            except UncertifiableComparison:
                return False
    return True


def _full_shadow_path(P: HPolytope, spec: ShadowSpec, start: VertexBasis) -> PathRecord:
    path = run_simplex(P, spec.c, start, PivotRuleSpec.shadow_rule(spec))
    total = len(enumerate_vertices(P, start))
    if path.length != total - 1:
        raise ValueError(f"shadow path has length {path.length}, not through all {total} vertices")
    return path


def find_k_for_norm(P: HPolytope, spec: ShadowSpec, start: VertexBasis, norm: NormSpec,
                    k_cap: int = K_CAP) -> tuple[Scalar, PathRecord]:
    """Smallest k in 2, 4, 8, ... making the eta-steepest path on A_k(P) visit every vertex.

    The compression direction is the projection-convention w.
    """
    path = _full_shadow_path(P, spec, start)
    w = spec.as_projection().w
    pe = _path_edges(P, spec.c, path)
    k = 2
    while k <= k_cap:
        cs = CompressSpec(w, k)
        if _steepest_follows(pe, norm, cs):
            P2, c2 = compress(P, spec.c, cs)
            run = run_simplex(P2, c2, transform_vertex(P2, start), PivotRuleSpec.steepest(norm))
            if run.length == path.length:
                return cs.k, run
        k *= 2
    raise KSearchExhausted(f"no k <= {k_cap} makes the {norm.name} steepest path follow the shadow path")


def find_uniform_k(P: HPolytope, spec: ShadowSpec, start: VertexBasis, norms: Sequence[NormSpec],
                   k_cap: int = K_CAP) -> Scalar:
    """Smallest doubling k for which every norm in ``norms`` follows the shadow path."""
    path = _full_shadow_path(P, spec, start)
    w = spec.as_projection().w
    pe = _path_edges(P, spec.c, path)
    k = 2
    while k <= k_cap:
        cs = CompressSpec(w, k)
        if all(_steepest_follows(pe, eta, cs) for eta in norms):
            return cs.k
        k *= 2
    raise KSearchExhausted(f"no single k <= {k_cap} works for all {len(norms)} norms")


def all_norms_instance(n: int, norms: Sequence[NormSpec], k: Optional[Scalar] = None):
    """Canonicalized, compressed Goldfarb cube shared by all regular norms.

    Returns ``(P', c', start', k)``.
    """
    P, spec, start = goldfarb_cube(n)
    proj = spec.as_projection()
    Pc, spec_c, _ = canonicalize_w_to_e1(P, proj)
    start_c = transform_vertex(Pc, start)
    if k is None:
        k = find_uniform_k(Pc, spec_c, start_c, norms)
    P2, c2 = compress(Pc, spec_c.c, CompressSpec(spec_c.w, k))
    return P2, c2, transform_vertex(P2, start_c), Q(k)
