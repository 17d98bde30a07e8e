"""JSON serialization with rationals stored as "p/q" strings.

Every structured artifact (polytopes, instance bundles, certificates, path
records and reports) round-trips exactly. Output is deterministic: keys keep
insertion order and files end with a newline.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

from .constructions import Ball, Certificate
from .exact import QMatrix, QVector, Scalar, fmt
from .polytope import HPolytope, VertexBasis, vertex_from_basis
from .pivot import PathRecord


def vec_out(v: Sequence[Scalar]) -> list[str]:
    return [fmt(x) for x in v]


def vec_in(v) -> QVector:
    if not isinstance(v, list) or not all(isinstance(x, (str, int)) for x in v):
        raise ValueError(f"expected a list of rational strings, got {v!r}")
    return QVector(str(x) for x in v)


def mat_out(M) -> list[list[str]]:
    return [vec_out(r) for r in M]


def mat_in(M) -> QMatrix:
    return QMatrix(vec_in(r) for r in M)


def polytope_to_json(P: HPolytope) -> dict:
    return {
        "dim": P.n,
        "A": mat_out(P.A),
        "b": vec_out(P.b),
        "labels": list(P.labels),
        "trusted_bounded": P.trusted_bounded,
    }


def polytope_from_json(d: dict) -> HPolytope:
    A = mat_in(d["A"])
    if A.shape[1] != d["dim"]:
        raise ValueError(f"dim {d['dim']} does not match A with {A.shape[1]} columns")
    return HPolytope(A, vec_in(d["b"]), tuple(d.get("labels") or ()), bool(d.get("trusted_bounded", False)))


def ball_to_json(D: Optional[Ball]) -> Optional[dict]:
    if D is None:
        return None
    return {"center": vec_out(D.center), "radius": fmt(D.radius)}


def ball_from_json(d: Optional[dict]) -> Optional[Ball]:
    if d is None:
        return None
    return Ball(vec_in(d["center"]), d["radius"])


def certificate_to_json(cert: Certificate) -> dict:
    return {
        "alpha": cert.alpha,
        "epsilon": fmt(cert.epsilon),
        "segment_points": mat_out(cert.segment_points),
        "lambdas": vec_out(cert.lambdas),
        "path_tight": [list(t) for t in cert.path_tight],
        "D_w": ball_to_json(cert.D_w),
        "D_c": ball_to_json(cert.D_c),
        "cut_facets": [list(x) for x in cert.cut_facets],
        "c_fixed": vec_out(cert.c_fixed) if cert.c_fixed is not None else None,
    }


def certificate_from_json(d: dict) -> Certificate:
    return Certificate(
        alpha=int(d["alpha"]),
        epsilon=QVector([d["epsilon"]])[0],
        segment_points=[vec_in(p) for p in d["segment_points"]],
        lambdas=list(vec_in(d["lambdas"])),
        path_tight=[tuple(int(i) for i in t) for t in d["path_tight"]],
        D_w=ball_from_json(d["D_w"]),
        D_c=ball_from_json(d.get("D_c")),
        cut_facets=[[int(i) for i in x] for x in d["cut_facets"]],
        c_fixed=vec_in(d["c_fixed"]) if d.get("c_fixed") is not None else None,
    )


def path_to_json(path: PathRecord) -> dict:
    out: dict[str, Any] = {
        "rule": path.rule.syntax() if path.rule is not None else None,
        "length": path.length,
        "vertices": [{"tight": list(v.tight), "point": vec_out(v.point)} for v in path.vertices],
        "c_values": vec_out(path.c_values),
    }
    if path.w_values is not None:
        out["w_values"] = vec_out(path.w_values)
    if path.intervals is not None:
        out["intervals"] = [[fmt(lo), fmt(hi)] for lo, hi in path.intervals]
    return out


def path_from_json(d: dict) -> PathRecord:
    """Rebuild a PathRecord; the rule is kept only as its syntax string."""
    verts = [VertexBasis(vec_in(v["point"]), tuple(v["tight"])) for v in d["vertices"]]
    rec = PathRecord(verts, list(vec_in(d["c_values"])))
    if "w_values" in d:
        rec.w_values = list(vec_in(d["w_values"]))
    if "intervals" in d:
        rec.intervals = [tuple(vec_in(iv)) for iv in d["intervals"]]
    return rec


@dataclass
class InstanceBundle:
    """A polytope with its objective, optional shadow direction and start basis.

    ``w`` is stored in the projection convention (the walk starts at the
    w-minimizer). ``metadata["chain"]`` lists every transform applied.
    """

    polytope: HPolytope
    c: QVector
    w: Optional[QVector] = None
    start: Optional[tuple[int, ...]] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.c = QVector(self.c)
        if self.w is not None:
            self.w = QVector(self.w)
        if self.start is not None:
            self.start = tuple(sorted(int(i) for i in self.start))
        self.metadata.setdefault("chain", [])

    def start_vertex(self) -> VertexBasis:
        if self.start is None:
            raise ValueError("bundle has no start vertex")
        return vertex_from_basis(self.polytope, self.start)

    def derive(self, polytope: HPolytope, step: dict, **changes) -> "InstanceBundle":
        meta = json.loads(json.dumps(self.metadata))
        meta["chain"].append(step)
        fields = {"polytope": polytope, "c": self.c, "w": self.w, "start": self.start, "metadata": meta}
        fields.update(changes)
        return InstanceBundle(**fields)

    def to_json(self) -> dict:
        return {
            "polytope": polytope_to_json(self.polytope),
            "c": vec_out(self.c),
            "w": vec_out(self.w) if self.w is not None else None,
            "start": list(self.start) if self.start is not None else None,
            "metadata": self.metadata,
        }

    @classmethod
    def from_json(cls, d: dict) -> "InstanceBundle":
        return cls(
            polytope=polytope_from_json(d["polytope"]),
            c=vec_in(d["c"]),
            w=vec_in(d["w"]) if d.get("w") is not None else None,
            start=tuple(d["start"]) if d.get("start") is not None else None,
            metadata=dict(d.get("metadata") or {}),
        )


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def write_json(path, obj: dict) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def load_bundle(path) -> InstanceBundle:
    return InstanceBundle.from_json(read_json(path))


def save_bundle(path, bundle: InstanceBundle) -> None:
    write_json(path, bundle.to_json())
