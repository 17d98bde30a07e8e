"""Global shadow paths, shadow polygons, oracles and verifiers."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Union

import gmpy2
import numpy as np

from .constructions import Certificate
from .errors import (
    Degenerate,
    DegenerateProjection,
    DuplicateValues,
    Infeasible,
    LimitExceeded,
    NonGeneric,
    Singular,
)
from .exact import ONE, ZERO, QVector, Scalar, dot, fmt
from .norms import NormSpec, check_regular
from .pivot import (
    PARAMETRIC,
    PathRecord,
    PivotRuleSpec,
    ShadowSpec,
    improving_edges,
    optimize_from,
    run_simplex,
)
from .polytope import (
    HPolytope,
    VertexBasis,
    cone_contains,
    enumerate_vertices,
    find_vertex,
    inradius_linf,
    normal_cone,
    step_along,
    vertex_from_basis,
)
from .exact import QMatrix

SpecLike = Union[ShadowSpec, tuple]


def _wc(spec: SpecLike) -> tuple[QVector, QVector]:
    """Projection-convention (w, c) from a ShadowSpec or a raw ``(w, c)`` pair."""
    if isinstance(spec, ShadowSpec):
        p = spec.as_projection()
        return p.w, p.c
    w, c = spec
    return QVector(w), QVector(c)


def _interval(mu_w: Sequence[Scalar], mu_c: Sequence[Scalar]):
    """lam-interval where ``lam mu_w + (1-lam) mu_c >= 0``, plus the indices
    whose constraint is active at the lower end."""
    lo, hi = ZERO, ONE
    at_lo: list[int] = []
    for j, (a, b) in enumerate(zip(mu_c, mu_w)):
        slope = b - a
        if slope > 0:
            t = -a / slope
            if t > lo:
                lo, at_lo = t, [j]
            elif t == lo and t > 0:
                at_lo.append(j)
        elif slope < 0:
            hi = min(hi, a / -slope)
        elif a < 0:
            return None, None, []
    if lo > hi:
        return None, None, []
    return lo, hi, at_lo


def parametric_path(P: HPolytope, spec: ShadowSpec, start: Optional[VertexBasis] = None) -> PathRecord:
    """Vertices whose normal cones meet the segment from w to c, in order.

    Walks lam from 1 (the w-maximizer) down to 0 (the c-maximizer). The
    record carries the lam-interval of every visited cone in ``intervals``.
    """
    spec = spec.as_parametric()
    w, c = spec.w, spec.c
    if start is None:
        start = optimize_from(P, w, find_vertex(P))
    w_proj = -w
    v = start
    inv = P.basis_inverse(v.tight)
    mu_w, mu_c = inv.vecmat(w), inv.vecmat(c)
    if not all(x > 0 for x in mu_w):
        raise NonGeneric(f"w is not uniquely maximized at the start vertex {v.tight}")
    vertices, intervals = [v], []
    limit = 2**22
    while True:
        lo, hi, at_lo = _interval(mu_w, mu_c)
        if lo is None:
            raise NonGeneric(f"segment misses the cone at {v.tight}")
        if intervals and hi != intervals[-1][0]:
            raise NonGeneric(f"cone intervals do not tile at {v.tight}")
        if lo == hi:
            raise NonGeneric(f"segment touches the cone at {v.tight} in a single point")
        intervals.append((lo, hi))
        if lo == 0:
            if not all(x > 0 for x in mu_c):
                raise NonGeneric("c is not uniquely maximized at the final vertex")
            break
        if len(at_lo) > 1:
            raise NonGeneric(f"three or more cones meet the segment at lam={lo}")
        pos = at_lo[0]
        leaving = v.tight[pos]
        d = QVector._raw([-r[pos] for r in inv])
        _, v = step_along(P, v, leaving, d)
        inv = P.basis_inverse(v.tight)
        mu_w, mu_c = inv.vecmat(w), inv.vecmat(c)
        vertices.append(v)
        if len(vertices) > limit:
            raise LimitExceeded("parametric path too long")
    return PathRecord(
        vertices=vertices,
        c_values=[dot(c, u.point) for u in vertices],
        rule=PivotRuleSpec.shadow_rule(spec),
        w_values=[dot(w_proj, u.point) for u in vertices],
        intervals=intervals,
    )


def local_path_agreement(P: HPolytope, spec: ShadowSpec, start: VertexBasis) -> bool:
    """Does the local slope rule reproduce the global parametric path?"""
    glob = parametric_path(P, spec, start)
    loc = run_simplex(P, spec.c, start, PivotRuleSpec.shadow_rule(spec.as_projection()))
    return glob.tight_sequence == loc.tight_sequence


# -- shadow polygon ----------------------------------------------------------


@dataclass
class ShadowPolygon:
    projected_points: list[tuple[Scalar, Scalar]]
    hull: list[int]  # indices into projected_points, counter-clockwise
    vertices: list[VertexBasis] = field(default_factory=list, repr=False)

    @property
    def hull_size(self) -> int:
        return len(self.hull)


def _cross(o, a, b) -> Scalar:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points: Sequence[tuple[Scalar, Scalar]]) -> list[int]:
    """Monotone-chain hull with exact predicates; collinear points dropped."""
    order = sorted(range(len(points)), key=lambda i: points[i])
    uniq = []
    for i in order:
        if not uniq or points[uniq[-1]] != points[i]:
            uniq.append(i)
    if len(uniq) < 3:
        return uniq

    def chain(idx):
        out = []
        for i in idx:
            while len(out) >= 2 and _cross(points[out[-2]], points[out[-1]], points[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = chain(uniq)
    upper = chain(list(reversed(uniq)))
    return lower[:-1] + upper[:-1]


def shadow_polygon(P: HPolytope, spec: SpecLike, start: Optional[VertexBasis] = None,
                   vertices: Optional[Sequence[VertexBasis]] = None) -> ShadowPolygon:
    """Exact convex hull of the vertices projected by ``x -> (w.x, c.x)``."""
    w, c = _wc(spec)
    if vertices is None:
        vertices = enumerate_vertices(P, start if start is not None else find_vertex(P))
    vertices = sorted(vertices, key=lambda v: v.tight)
    pts = [(dot(w, v.point), dot(c, v.point)) for v in vertices]
    hull = convex_hull_2d(pts)
    if len(hull) < 3:
        raise DegenerateProjection("projected vertices are collinear")
    return ShadowPolygon(pts, hull, list(vertices))


# -- oracles ------------------------------------------------------------------


@dataclass(frozen=True)
class PathStats:
    count: int
    min_length: Optional[int]
    max_length: Optional[int]


def brute_force_paths(P: HPolytope, c: Sequence[Scalar], frm: VertexBasis, to: VertexBasis,
                      cap: int = 2**20) -> PathStats:
    """Count all c-monotone edge paths from ``frm`` to ``to`` with min/max length.

    Exhaustive over the directed acyclic graph of improving edges.
    """
    c = QVector(c)
    succ: dict[tuple, list[tuple]] = {}
    value: dict[tuple, Scalar] = {}
    stack = [frm]
    while stack:
        v = stack.pop()
        if v.tight in succ:
            continue
        value[v.tight] = dot(c, v.point)
        nxt = [e.target for e in improving_edges(P, c, v)]
        succ[v.tight] = [u.tight for u in nxt]
        if len(succ) > cap:
            raise LimitExceeded(f"more than {cap} vertices reachable")
        stack.extend(u for u in nxt if u.tight not in succ)
    stats: dict[tuple, tuple[int, float, float]] = {}
    for t in sorted(succ, key=lambda k: value[k], reverse=True):
        if t == to.tight:
            stats[t] = (1, 0, 0)
            continue
        cnt, lo, hi = 0, float("inf"), float("-inf")
        for u in succ[t]:
            uc, ulo, uhi = stats[u]
            if uc:
                cnt += uc
                lo = min(lo, ulo + 1)
                hi = max(hi, uhi + 1)
        stats[t] = (cnt, lo, hi)
    cnt, lo, hi = stats.get(frm.tight, (0, None, None))
    if not cnt:
        return PathStats(0, None, None)
    return PathStats(cnt, int(lo), int(hi))


def check_ordering_coincide(P: HPolytope, spec: SpecLike, start: Optional[VertexBasis] = None) -> bool:
    """Do c and the projection-convention w sort the vertices identically?"""
    w, c = _wc(spec)
    verts = list(enumerate_vertices(P, start if start is not None else find_vertex(P)))
    cv = [dot(c, v.point) for v in verts]
    wv = [dot(w, v.point) for v in verts]
    if len(set(cv)) < len(cv) or len(set(wv)) < len(wv):
        raise DuplicateValues("an objective takes equal values on two vertices")
    by_c = sorted(range(len(verts)), key=lambda i: cv[i])
    by_w = sorted(range(len(verts)), key=lambda i: wv[i])
    return by_c == by_w


# -- certificates and reports --------------------------------------------------


@dataclass
class CertificateCheck:
    ok: bool
    reasons: list[str]

    def __bool__(self) -> bool:
        return self.ok


def _ray_in_ball(ray: QVector, ball) -> bool:
    # rays are stored as the exact chosen generators; allow any positive rescaling
    # that lands on the ball center's scale by testing the ray itself first
    return ball.contains(ray)


def check_certificate(Q: HPolytope, a: VertexBasis, b: Optional[VertexBasis], cert: Certificate) -> CertificateCheck:
    """Exactly verify the sufficient condition for "every shadow path a -> b
    has length >= alpha".

    ``b`` may be None for fixed-c certificates; the last path cone is used.
    """
    reasons: list[str] = []
    try:
        a = vertex_from_basis(Q, a.tight)
        b = vertex_from_basis(Q, b.tight if b is not None else cert.path_tight[-1])
    except (Singular, Infeasible, Degenerate, IndexError, ValueError) as exc:
        return CertificateCheck(False, [f"endpoint is not a vertex of Q: {exc}"])
    n = Q.n
    if len(cert.segment_points) != cert.alpha + 1 or len(cert.path_tight) != cert.alpha + 1:
        return CertificateCheck(False, ["certificate lists do not have alpha + 1 entries"])

    def rays_in(v: VertexBasis, ball, cut: list[int], label: str):
        if sorted(cut) != list(v.tight):
            reasons.append(f"{label}: vertex tight set {v.tight} differs from recorded cuts {sorted(cut)}")
        for i in v.tight:
            if not ball.contains(Q.A[i]):
                reasons.append(f"{label}: ray of facet {i} escapes the ball")

    rays_in(a, cert.D_w, cert.cut_facets[0], "a")
    w = cert.D_w.center
    if cert.D_c is not None:
        rays_in(b, cert.D_c, cert.cut_facets[1], "b")
        c = cert.D_c.center
    else:
        c = cert.c_fixed
        if c is None:
            return CertificateCheck(False, ["fixed-c certificate without c"])
        if not cone_contains(normal_cone(Q, b), c, strict=True):
            reasons.append("c is not interior to the normal cone at b")
    radii = []
    for i, (lam, z, tight) in enumerate(zip(cert.lambdas, cert.segment_points, cert.path_tight)):
        if QVector(z) != w * lam + c * (1 - lam):
            reasons.append(f"segment point {i} is not on the w-c segment")
        if any(not 0 <= j < Q.m for j in tight) or len(tight) != n:
            reasons.append(f"cone {i} references invalid facets")
            continue
        from .polytope import SimplicialCone

        try:
            cone = SimplicialCone(QMatrix._raw([Q.A[j] for j in tight]), tuple(tight))
            inside = cone_contains(cone, z, strict=True)
            radii.append(inradius_linf(cone, z))
        except Singular:
            reasons.append(f"cone {i} is not simplicial")
            continue
        if not inside:
            reasons.append(f"segment point {i} is not interior to its cone")
        interior_index = 0 < i < cert.alpha or (i == cert.alpha and cert.D_c is None)
        if interior_index:
            try:
                vertex_from_basis(Q, tight)
            except (Singular, Infeasible, Degenerate) as exc:
                reasons.append(f"cone {i} is not a normal cone of Q: {exc}")
    if len({tuple(t) for t in cert.path_tight}) != len(cert.path_tight):
        reasons.append("path cones are not distinct")
    if radii and min(radii) != cert.epsilon:
        reasons.append(f"epsilon {fmt(cert.epsilon)} differs from min inradius {fmt(min(radii))}")
    if cert.epsilon <= 0 or cert.D_w.radius != cert.epsilon or (cert.D_c is not None and cert.D_c.radius != cert.epsilon):
        reasons.append("ball radii must equal epsilon > 0")
    return CertificateCheck(not reasons, reasons)


@dataclass
class VerificationReport:
    samples: int
    min_length: Optional[int]
    max_length: Optional[int]
    seed: int
    failures: list[str] = field(default_factory=list)
    certificate_ok: Optional[bool] = None
    target: Optional[int] = None
    resampled: int = 0
    instance_id: str = ""
    n: Optional[int] = None
    m: Optional[int] = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures and self.certificate_ok is not False

    def to_json(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    CSV_HEADER = ("instance_id", "n", "m", "target", "samples", "min_length", "certificate_ok", "seed")

    def csv_row(self) -> str:
        vals = [self.instance_id, self.n, self.m, self.target, self.samples, self.min_length,
                self.certificate_ok, self.seed]
        return ",".join("" if v is None else str(v) for v in vals)


def _random_in_cone(rng: np.random.Generator, rays) -> QVector:
    out = QVector.zeros(len(rays[0]))
    for r in rays:
        out = out + r * gmpy2.mpq(int(rng.integers(1, 1001)), 1000)
    return out


def sample_shadow_paths(Q: HPolytope, a: VertexBasis, b: Optional[VertexBasis], target_alpha: int, samples: int,
                        seed: int, cert: Optional[Certificate] = None,
                        c_fixed: Optional[Sequence[Scalar]] = None, max_resample: int = 50) -> VerificationReport:
    """Shadow paths a -> b for seeded random (w_a, c_b) from the two open cones.

    Sample i draws from ``default_rng([seed, i, attempt])``; NonGeneric draws
    are redrawn and counted. With ``c_fixed`` only w is sampled.
    """
    report = VerificationReport(samples, None, None, seed, target=target_alpha, n=Q.n, m=Q.m)
    if b is None:
        if cert is None:
            raise ValueError("b is required without a certificate")
        b = vertex_from_basis(Q, cert.path_tight[-1])
    if cert is not None:
        chk = check_certificate(Q, a, b, cert)
        report.certificate_ok = chk.ok
        report.failures.extend(f"certificate: {r}" for r in chk.reasons)
        if c_fixed is None:
            c_fixed = cert.c_fixed
    rays_a = [Q.A[i] for i in a.tight]
    rays_b = [Q.A[i] for i in b.tight]
    lengths = []
    for i in range(samples):
        for attempt in range(max_resample):
            rng = np.random.default_rng([seed, i, attempt])
            w_a = _random_in_cone(rng, rays_a)
            c_b = QVector(c_fixed) if c_fixed is not None else _random_in_cone(rng, rays_b)
            try:
                path = parametric_path(Q, ShadowSpec(w_a, c_b, PARAMETRIC), a)
                break
            except NonGeneric:
                report.resampled += 1
        else:
            report.failures.append(f"sample {i}: no generic draw in {max_resample} attempts")
            continue
        if path.vertices[-1] != b:
            report.failures.append(f"sample {i}: path ended at {path.vertices[-1].tight}, not b")
        lengths.append(path.length)
        if path.length < target_alpha:
            report.failures.append(f"sample {i}: length {path.length} < {target_alpha}")
    if lengths:
        report.min_length, report.max_length = min(lengths), max(lengths)
    return report


def all_norms_battery(P: HPolytope, c: Sequence[Scalar], start: VertexBasis, norms: Sequence[NormSpec],
                      target: Optional[int] = None, seed: int = 0) -> VerificationReport:
    """Steepest-edge runs for every norm; pass iff all have length ``target``
    and the same vertex sequence."""
    for eta in norms:
        check_regular(eta, P.n)
    if target is None:
        target = len(enumerate_vertices(P, start)) - 1
    report = VerificationReport(len(norms), None, None, seed, target=target, n=P.n, m=P.m)
    lengths, first = [], None
    for eta in norms:
        try:
            run = run_simplex(P, c, start, PivotRuleSpec.steepest(eta))
        except Exception as exc:  # recorded, never silently passed
            report.failures.append(f"{eta.name}: {type(exc).__name__}: {exc}")
            continue
        lengths.append(run.length)
        report.details[eta.name] = run.length
        if run.length != target:
            report.failures.append(f"{eta.name}: length {run.length} != {target}")
        if first is None:
            first = run.tight_sequence
        elif run.tight_sequence != first:
            report.failures.append(f"{eta.name}: vertex sequence differs")
    if lengths:
        report.min_length, report.max_length = min(lengths), max(lengths)
    return report
