"""Command-line front end.

Exit codes: 0 success, 1 verification failed, 2 generation failed,
3 I/O error, 4 pivot tie, 5 step cap exceeded, 6 degenerate projection,
7 any other violated precondition.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .analysis import (
    VerificationReport,
    all_norms_battery,
    check_certificate,
    local_path_agreement,
    parametric_path,
    sample_shadow_paths,
    shadow_polygon,
)
from .constructions import (
    Ball,
    CompressSpec,
    canonicalize_w_to_e1,
    compress,
    find_k_for_norm,
    find_uniform_k,
    fixed_c_variant,
    goldfarb_cube,
    goldfarb_params,
    klee_minty,
    many_from_one,
    thin_cone,
    unit_cube,
    vertex_cut,
)
from .errors import (
    DegenerateProjection,
    GenerationFailed,
    ShadowBoundError,
    StepCapExceeded,
    Tie,
)
from .exact import QVector, Q, bit_size, fmt, parse_vector
from .io import (
    InstanceBundle,
    certificate_from_json,
    certificate_to_json,
    dumps,
    load_bundle,
    path_to_json,
    read_json,
    write_json,
)
from .norms import parse_norm, regular_battery
from .pivot import PROJECTION, PivotRuleSpec, ShadowSpec, parse_rule, run_simplex
from .polytope import (
    DEFAULT_VERTEX_CAP,
    NormalFan,
    enumerate_vertices,
    inradius_linf,
    is_bounded,
    is_simple,
    normal_cone,
    vertex_from_basis,
)

EXIT_OK, EXIT_VERIFY, EXIT_GENERATE, EXIT_IO, EXIT_TIE, EXIT_STEPCAP, EXIT_DEGENERATE, EXIT_PRECONDITION = range(8)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _log(args, *parts):
    if not args.quiet:
        print(*parts, file=sys.stderr)


def _load(path) -> InstanceBundle:
    try:
        return load_bundle(path)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise CliError(EXIT_IO, f"cannot read bundle {path}: {exc}") from exc


def _write(path, obj: dict) -> None:
    try:
        write_json(path, obj)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _write_text(path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _emit(args, obj: dict, out: Optional[str]) -> None:
    if out:
        _write(out, obj)
    elif not args.quiet:
        sys.stdout.write(dumps(obj))


def _spec(bundle: InstanceBundle) -> ShadowSpec:
    if bundle.w is None:
        raise CliError(EXIT_PRECONDITION, "bundle has no shadow direction w")
    return ShadowSpec(bundle.w, bundle.c, PROJECTION)


def _find_vertex(bundle: InstanceBundle, text: str, cap: int):
    """A vertex given by coordinates ``"1,1,0"`` or by tight set ``"t:0,3,4"``."""
    P = bundle.polytope
    if text.startswith("t:"):
        return vertex_from_basis(P, [int(i) for i in text[2:].split(",")])
    target = parse_vector(text)
    for v in enumerate_vertices(P, bundle.start_vertex(), cap):
        if v.point == target:
            return v
    raise CliError(EXIT_PRECONDITION, f"no vertex at {text}")


# -- generate ---------------------------------------------------------------


def cmd_generate(args) -> int:
    n = args.n
    meta = {"generator": args.kind, "params": {"n": n}, "seed": args.seed, "chain": []}
    if args.kind == "goldfarb":
        try:
            P, spec, start = goldfarb_cube(n)
            beta, gamma, tilt = goldfarb_params(n)
        except GenerationFailed as exc:
            raise CliError(EXIT_GENERATE, str(exc)) from exc
        meta["params"].update(beta=fmt(beta), gamma=fmt(gamma), tilt=fmt(tilt))
        proj = spec.as_projection()
        bundle = InstanceBundle(P, proj.c, proj.w, start.tight, meta)
    elif args.kind == "cube":
        if n < 1:
            raise CliError(EXIT_GENERATE, "n must be positive")
        P, start = unit_cube(n)
        c = QVector(range(1, n + 1))
        bundle = InstanceBundle(P, c, None, start.tight, meta)
    else:
        if n < 2:
            raise CliError(EXIT_GENERATE, "n must be at least 2")
        P, start = klee_minty(n)
        bundle = InstanceBundle(P, QVector.unit(n, n - 1), None, start.tight, meta)
    if args.c:
        bundle.c = parse_vector(args.c)
    if args.w:
        bundle.w = parse_vector(args.w)
    _emit(args, bundle.to_json(), args.output)
    _log(args, f"{args.kind} n={n}: {bundle.polytope.m} facets")
    return EXIT_OK


# -- transform ----------------------------------------------------------------


def cmd_transform(args) -> int:
    bundle = _load(args.input)
    P = bundle.polytope
    op = args.op
    step: dict = {"op": op}
    if op in ("vertex-cut", "thin-cone"):
        if not args.vertex:
            raise CliError(EXIT_PRECONDITION, f"{op} needs --vertex")
        v = _find_vertex(bundle, args.vertex, args.vertex_cap)
        step["vertex"] = list(v.tight)
        if op == "vertex-cut":
            if not args.w:
                raise CliError(EXIT_PRECONDITION, "vertex-cut needs --w")
            w = parse_vector(args.w)
            out = vertex_cut(P, v, w, eps=args.eps)
            step.update(w=[fmt(x) for x in w], eps=args.eps)
            new = bundle.derive(out, step)
        else:
            C = normal_cone(P, v)
            center = parse_vector(args.center) if args.center else sum(C.rays[1:], C.rays[0])
            radius = Q(args.radius) if args.radius else inradius_linf(C, center) / 2
            out, vnew = thin_cone(P, v, Ball(center, radius))
            step.update(center=[fmt(x) for x in center], radius=fmt(radius), new_vertex=list(vnew.tight))
            new = bundle.derive(out, step)
    elif op in ("many-from-one", "fixed-c"):
        spec = _spec(bundle)
        start = bundle.start_vertex()
        if op == "many-from-one":
            out, a, b, cert = many_from_one(P, spec, start)
        else:
            out, a, cert = fixed_c_variant(P, spec, start)
        cert_path = args.cert or str(Path(args.output or "out.json").with_suffix(".cert.json"))
        _write(cert_path, certificate_to_json(cert))
        step.update(alpha=cert.alpha, epsilon=fmt(cert.epsilon), certificate=Path(cert_path).name)
        new = bundle.derive(out, step, start=a.tight)
        _log(args, f"alpha={cert.alpha} epsilon={fmt(cert.epsilon)} certificate -> {cert_path}")
    elif op == "compress":
        if args.k is None:
            raise CliError(EXIT_PRECONDITION, "compress needs --k")
        spec = _spec(bundle)
        cs = CompressSpec(spec.w, args.k)
        out, c2 = compress(P, bundle.c, cs)
        step.update(k=fmt(cs.k), w=[fmt(x) for x in spec.w])
        new = bundle.derive(out, step, c=c2, w=cs.apply_inverse(spec.w))
    elif op == "canonicalize":
        spec = _spec(bundle)
        out, spec2, T = canonicalize_w_to_e1(P, spec)
        step["T"] = [[fmt(x) for x in row] for row in T]
        new = bundle.derive(out, step, c=spec2.c, w=spec2.w)
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(EXIT_PRECONDITION, f"unknown op {op}")
    if new.start is not None:
        new.start_vertex()  # must still resolve
    _emit(args, new.to_json(), args.output)
    _log(args, f"{op}: {new.polytope.m} facets")
    return EXIT_OK


# -- run ----------------------------------------------------------------------


def cmd_run(args) -> int:
    bundle = _load(args.input)
    P = bundle.polytope
    rule = parse_rule(args.rule, bundle.w, bundle.c, P.n, args.tie_policy)
    try:
        path = run_simplex(P, bundle.c, bundle.start_vertex(), rule, args.step_cap)
    except Tie as exc:
        raise CliError(EXIT_TIE, str(exc)) from exc
    except StepCapExceeded as exc:
        raise CliError(EXIT_STEPCAP, str(exc)) from exc
    if args.output:
        _write(args.output, path_to_json(path))
    print(f"length {path.length}")
    return EXIT_OK


# -- verify -------------------------------------------------------------------

DEFAULT_STEEPEST = ("l1", "l2", "linf", "lp:3/2", "lp:3")


def _verify_certificate(args, bundle: InstanceBundle, fixed: bool) -> VerificationReport:
    if not args.cert:
        raise CliError(EXIT_PRECONDITION, "this mode needs --cert")
    try:
        cert = certificate_from_json(read_json(args.cert))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise CliError(EXIT_IO, f"cannot read certificate {args.cert}: {exc}") from exc
    Q_ = bundle.polytope
    if fixed and cert.D_c is not None:
        raise CliError(EXIT_PRECONDITION, "thm-1-1 expects a fixed-c certificate")
    b = None
    try:
        a = bundle.start_vertex()
        if cert.cut_facets[1]:
            b = vertex_from_basis(Q_, cert.cut_facets[1])
    except (ShadowBoundError, IndexError, ValueError) as exc:
        report = VerificationReport(args.samples, None, None, args.seed, target=cert.alpha,
                                    n=Q_.n, m=Q_.m, certificate_ok=False)
        report.failures.append(f"endpoint does not resolve on Q: {exc}")
        return report
    chk = check_certificate(Q_, a, b, cert)
    if not chk.ok:
        report = VerificationReport(args.samples, None, None, args.seed, target=cert.alpha,
                                    n=Q_.n, m=Q_.m, certificate_ok=False)
        report.failures.extend(f"certificate: {r}" for r in chk.reasons)
        return report
    report = sample_shadow_paths(Q_, a, b, cert.alpha, args.samples, args.seed, cert)
    if fixed:
        n = Q_.n
        if Q_.m != 3 * n:
            report.failures.append(f"expected {3 * n} facets, found {Q_.m}")
    return report


def _full_length(bundle: InstanceBundle, cap: int) -> int:
    return len(enumerate_vertices(bundle.polytope, bundle.start_vertex(), cap)) - 1


def cmd_verify(args) -> int:
    bundle = _load(args.input)
    P = bundle.polytope
    mode = args.mode
    if mode in ("thm-3-3", "thm-1-1"):
        report = _verify_certificate(args, bundle, mode == "thm-1-1")
    elif mode == "thm-1-3":
        spec, start = _spec(bundle), bundle.start_vertex()
        target = _full_length(bundle, args.vertex_cap)
        norms = [parse_norm(t, P.n) for t in (args.norms.split(";") if args.norms else DEFAULT_STEEPEST)]
        report = VerificationReport(len(norms), None, None, args.seed, target=target, n=P.n, m=P.m)
        lengths = []
        for eta in norms:
            try:
                k, run = find_k_for_norm(P, spec, start, eta)
            except ShadowBoundError as exc:
                report.failures.append(f"{eta.name}: {exc}")
                continue
            report.details[eta.name] = {"k": fmt(k), "length": run.length}
            lengths.append(run.length)
            if run.length != target:
                report.failures.append(f"{eta.name}: length {run.length} != {target}")
        if lengths:
            report.min_length, report.max_length = min(lengths), max(lengths)
    elif mode == "thm-1-4":
        spec, start = _spec(bundle), bundle.start_vertex()
        target = _full_length(bundle, args.vertex_cap)
        Pc, spec_c, _ = canonicalize_w_to_e1(P, spec)
        start_c = vertex_from_basis(Pc, start.tight)
        norms = regular_battery(P.n, args.samples_norms, args.seed)
        k = find_uniform_k(Pc, spec_c, start_c, norms)
        P2, c2 = compress(Pc, spec_c.c, CompressSpec(spec_c.w, k))
        report = all_norms_battery(P2, c2, vertex_from_basis(P2, start.tight), norms, target, args.seed)
        report.details["k"] = fmt(k)
    else:  # agreement
        spec, start = _spec(bundle), bundle.start_vertex()
        ok = local_path_agreement(P, spec, start)
        length = parametric_path(P, spec, start).length
        report = VerificationReport(1, length, length, args.seed, n=P.n, m=P.m)
        if not ok:
            report.failures.append("local shadow rule and parametric path differ")
    report.instance_id = Path(args.input).stem
    _emit(args, report.to_json(), args.output)
    if args.csv:
        try:
            with open(args.csv, "a", encoding="utf-8") as fh:
                if fh.tell() == 0:
                    fh.write(",".join(VerificationReport.CSV_HEADER) + "\n")
                fh.write(report.csv_row() + "\n")
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot write {args.csv}: {exc}") from exc
    status = "pass" if report.passed else "FAIL"
    print(f"{mode}: {status} min_length={report.min_length} target={report.target}")
    for f in report.failures[:20]:
        print("  " + f, file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY


# -- plot / info ----------------------------------------------------------------


def cmd_plot(args) -> int:
    from .plot import fan_2d_svg, shadow_polygon_svg

    bundle = _load(args.input)
    P = bundle.polytope
    verts = enumerate_vertices(P, bundle.start_vertex(), args.vertex_cap)
    if args.kind == "shadow-polygon":
        if bundle.w is None:
            raise CliError(EXIT_PRECONDITION, "shadow-polygon needs w in the bundle")
        try:
            poly = shadow_polygon(P, (bundle.w, bundle.c), vertices=verts)
        except DegenerateProjection as exc:
            raise CliError(EXIT_DEGENERATE, str(exc)) from exc
        path = None
        try:
            path = run_simplex(P, bundle.c, bundle.start_vertex(),
                               PivotRuleSpec.shadow_rule(_spec(bundle)), args.step_cap)
        except ShadowBoundError:
            pass  # the hull is still drawn
        svg = shadow_polygon_svg(poly, path, __version__)
        _log(args, f"hull_size {poly.hull_size}")
    else:
        if P.n != 2:
            raise CliError(EXIT_PRECONDITION, "fan-2d needs a planar polytope")
        w = -bundle.w if bundle.w is not None else bundle.c
        svg = fan_2d_svg(NormalFan.of(P, verts), w, bundle.c, __version__)
        _log(args, f"{len(verts)} cones")
    _write_text(args.output, svg)
    return EXIT_OK


def cmd_info(args) -> int:
    raw = None
    try:
        raw = read_json(args.input)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_IO, f"cannot read {args.input}: {exc}") from exc
    if "alpha" in raw and "segment_points" in raw:
        cert = certificate_from_json(raw)
        info = {"kind": "certificate", "alpha": cert.alpha, "epsilon": fmt(cert.epsilon),
                "fixed_c": cert.D_c is None, "cut_facets": cert.cut_facets}
    else:
        bundle = InstanceBundle.from_json(raw)
        P = bundle.polytope
        info = {"kind": "bundle", "n": P.n, "m": P.m,
                "max_bit_size": max(bit_size(x) for row in P.A for x in row),
                "generator": bundle.metadata.get("generator"),
                "chain": [s.get("op") for s in bundle.metadata.get("chain", [])]}
        if bundle.start is not None:
            verts = enumerate_vertices(P, bundle.start_vertex(), args.vertex_cap)
            info.update(vertices=len(verts), simple=is_simple(P, bundle.start_vertex()),
                        bounded=is_bounded(P, bundle.start_vertex(), args.vertex_cap))
    sys.stdout.write(dumps(info))
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def d(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--seed", type=int, default=d(0), help="random seed (default 0)")
    parser.add_argument("--step-cap", type=int, default=d(10**6), help="pivot step cap")
    parser.add_argument("--vertex-cap", type=int, default=d(DEFAULT_VERTEX_CAP), help="vertex enumeration cap")
    parser.add_argument("--quiet", action="store_true", default=d(False), help="suppress informational output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shadowbound", description="Exact shadow-path experiments")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write an instance bundle")
    g.add_argument("kind", choices=["goldfarb", "cube", "klee-minty-style"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--c", help="override the objective, e.g. 1,2,3")
    g.add_argument("--w", help="set the shadow direction (projection convention)")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("transform", parents=[common], help="apply a construction to a bundle")
    t.add_argument("op", choices=["vertex-cut", "thin-cone", "many-from-one", "fixed-c", "compress", "canonicalize"])
    t.add_argument("-i", "--input", required=True)
    t.add_argument("-o", "--output")
    t.add_argument("--cert", help="certificate output (many-from-one, fixed-c)")
    t.add_argument("--vertex", help="vertex coordinates 1,0,1 or tight set t:0,3,4")
    t.add_argument("--w", help="cut normal for vertex-cut")
    t.add_argument("--eps", help="cut depth for vertex-cut")
    t.add_argument("--center", help="ball center for thin-cone")
    t.add_argument("--radius", help="ball radius for thin-cone")
    t.add_argument("--k", help="compression factor")
    t.set_defaults(func=cmd_transform)

    r = sub.add_parser("run", parents=[common], help="run a pivot rule from the bundle start")
    r.add_argument("--rule", required=True, help="dantzig | greatest | shadow[:w] | steepest:<norm>")
    r.add_argument("--tie-policy", choices=["error", "lowest_index"], default="error")
    r.add_argument("-i", "--input", required=True)
    r.add_argument("-o", "--output", help="PathRecord JSON")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", parents=[common], help="check a long-path claim")
    v.add_argument("mode", choices=["thm-3-3", "thm-1-1", "thm-1-3", "thm-1-4", "agreement"])
    v.add_argument("-i", "--input", required=True)
    v.add_argument("--cert")
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--samples-norms", type=int, default=25)
    v.add_argument("--norms", help="semicolon-separated norm list for thm-1-3")
    v.add_argument("-o", "--output", help="VerificationReport JSON")
    v.add_argument("--csv", help="append a CSV row to this file")
    v.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", parents=[common], help="write an SVG")
    p.add_argument("kind", choices=["shadow-polygon", "fan-2d"])
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_plot)

    n = sub.add_parser("info", parents=[common], help="summarize a bundle or certificate")
    n.add_argument("-i", "--input", required=True)
    n.set_defaults(func=cmd_info)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except GenerationFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERATE
    except Tie as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TIE
    except StepCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STEPCAP
    except DegenerateProjection as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ShadowBoundError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
