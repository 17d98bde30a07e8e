"""Edge normalizations for generalized steepest-edge rules.

Rational kinds (L1, Linf, weighted L1, polyhedral) evaluate exactly. L2 is
compared through squares. Lp for other p and plugin callbacks are compared
with outward-rounded interval arithmetic, refining precision until the
compared quantities separate.
"""
from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import gmpy2
from mpmath import iv

from .errors import NotRegular, UncertifiableComparison
from .exact import ONE, ZERO, Q, QMatrix, QVector, Scalar, dot, fmt, rank

START_BITS = 64
MAX_BITS = 4096

_iv_lock = threading.RLock()

RATIONAL_KINDS = ("l1", "linf", "wl1", "poly")


@dataclass(frozen=True)
class CertifiedInterval:
    """Closed rational interval known to contain the true value."""

    lo: Scalar
    hi: Scalar
    bits: int

    def contains(self, q) -> bool:
        return self.lo <= Q(q) <= self.hi


@dataclass(frozen=True, eq=False)
class NormSpec:
    """A normalization function for steepest-edge pivoting.

    Build with the classmethod constructors rather than directly.
    """

    kind: str
    p: Optional[Scalar] = None
    weights: Optional[QVector] = None
    generators: Optional[QMatrix] = None
    plugin: Optional[Callable] = field(default=None, repr=False)
    regular_required: bool = False
    name: str = ""

    @classmethod
    def l1(cls, regular_required=False):
        return cls("l1", regular_required=regular_required, name="l1")

    @classmethod
    def l2(cls, regular_required=False):
        return cls("l2", regular_required=regular_required, name="l2")

    @classmethod
    def linf(cls, regular_required=False):
        return cls("linf", regular_required=regular_required, name="linf")

    @classmethod
    def lp(cls, p, regular_required=False):
        p = Q(p)
        if p <= 1:
            raise ValueError(f"Lp needs p > 1, got {p}")
        if p == 2:
            return cls.l2(regular_required)
        return cls("lp", p=p, regular_required=regular_required, name=f"lp:{fmt(p)}")

    @classmethod
    def weighted_l1(cls, weights, regular_required=False):
        weights = QVector(weights)
        if any(wt <= 0 for wt in weights):
            raise ValueError("weighted L1 needs strictly positive weights")
        return cls("wl1", weights=weights, regular_required=regular_required,
                   name="wl1:" + ",".join(fmt(x) for x in weights))

    @classmethod
    def polyhedral(cls, rows, regular_required=False, name="poly"):
        """``eta(x) = max_i |g_i . x|``; the rows must span R^n."""
        G = QMatrix(rows)
        if rank(G) != G.shape[1]:
            raise ValueError("polyhedral norm generators must span the space")
        return cls("poly", generators=G, regular_required=regular_required, name=name)

    @classmethod
    def from_plugin(cls, fn, *, positive: bool, homogeneous: bool, dim: int,
                    name="plugin", regular_required=False, seed=0):
        """Wrap ``fn(entries) -> iv interval``, called with mpmath interval entries.

        The caller must declare positivity and positive homogeneity; the
        latter is spot-checked on 100 random (lambda, x) pairs.
        """
        if not (positive and homogeneous):
            raise ValueError("plugin normalizations must be positive and positively homogeneous")
        spec = cls("plugin", plugin=fn, regular_required=regular_required, name=name)
        rng = random.Random(seed)
        for _ in range(100):
            x = QVector(gmpy2.mpq(rng.randint(-50, 50), rng.randint(1, 20)) for _ in range(dim))
            if x.is_zero():
                continue
            lam = gmpy2.mpq(rng.randint(-40, 40) or 1, rng.randint(1, 9))
            a = interval_eval(spec, x * lam, 128)
            b = interval_eval(spec, x, 128)
            lam_abs = abs(lam)
            if a.hi < b.lo * lam_abs or a.lo > b.hi * lam_abs:
                raise ValueError(f"plugin {name!r} failed homogeneity spot check at {x!r}, {lam}")
            if b.hi <= 0:
                raise ValueError(f"plugin {name!r} is not positive at {x!r}")
        return spec

    @property
    def is_rational(self) -> bool:
        return self.kind in RATIONAL_KINDS

    def syntax(self) -> str:
        return self.name


def rational_eval(norm: NormSpec, x: Sequence[Scalar]) -> Scalar:
    k = norm.kind
    if k == "l1":
        return sum((abs(a) for a in x), ZERO)
    if k == "linf":
        return max((abs(a) for a in x), default=ZERO)
    if k == "wl1":
        return sum((wt * abs(a) for wt, a in zip(norm.weights, x)), ZERO)
    if k == "poly":
        return max(abs(dot(g, x)) for g in norm.generators)
    raise TypeError(f"{k} is not a rational-valued norm")


def _to_iv(q: Scalar):
    return iv.mpf(int(q.numerator)) / iv.mpf(int(q.denominator))


def _raw_to_mpq(t) -> Scalar:
    sign, man, exp, _ = t
    if not man and exp:
        raise UncertifiableComparison("interval endpoint is not finite")
    v = gmpy2.mpq(int(man)) * (gmpy2.mpq(2) ** int(exp) if exp >= 0 else gmpy2.mpq(1, 2 ** int(-exp)))
    return -v if sign else v


def interval_eval(norm: NormSpec, x: Sequence[Scalar], bits: int) -> CertifiedInterval:
    """Certified enclosure of ``eta(x)`` at ``bits`` of working precision."""
    if norm.is_rational:
        v = rational_eval(norm, x)
        return CertifiedInterval(v, v, bits)
    with _iv_lock:
        saved = iv.prec
        iv.prec = bits
        try:
            if norm.kind == "l2":
                val = iv.sqrt(_to_iv(sum((a * a for a in x), ZERO)))
            elif norm.kind == "lp":
                p = _to_iv(norm.p)
                acc = iv.mpf(0)
                for a in x:
                    if a:
                        acc += _to_iv(abs(a)) ** p
                val = acc ** (iv.mpf(1) / p) if acc.b > 0 else iv.mpf(0)
            elif norm.kind == "plugin":
                val = norm.plugin([_to_iv(a) for a in x])
                if not hasattr(val, "a"):
                    val = iv.mpf(val)
            else:
                raise TypeError(norm.kind)
            a, b = val._mpi_
            lo, hi = _raw_to_mpq(a), _raw_to_mpq(b)
        finally:
            iv.prec = saved
    return CertifiedInterval(lo, hi, bits)


def norm_eval(norm: NormSpec, x: Sequence[Scalar], bits: int = START_BITS):
    """Evaluate ``eta(x)``.

    Returns an exact rational for the rational kinds and for L2 when the
    squared norm is a perfect rational square; otherwise a CertifiedInterval.
    """
    x = QVector(x)
    if norm.regular_required:
        check_regular(norm, len(x))
    if norm.is_rational:
        return rational_eval(norm, x)
    if norm.kind == "l2":
        sq = x.norm2_sq()
        if gmpy2.is_square(sq.numerator) and gmpy2.is_square(sq.denominator):
            return gmpy2.mpq(gmpy2.isqrt(sq.numerator), gmpy2.isqrt(sq.denominator))
    return interval_eval(norm, x, bits)


def check_regular(norm: NormSpec, n: int) -> None:
    """Raise NotRegular unless ``eta(e_i) = 1`` for every coordinate."""
    for i in range(n):
        e = QVector.unit(n, i)
        if norm.kind in ("l1", "l2", "linf", "lp"):
            continue
        if norm.is_rational:
            val = rational_eval(norm, e)
            if val != 1:
                raise NotRegular(f"{norm.name}: eta(e_{i}) = {fmt(val)}")
        else:
            enc = interval_eval(norm, e, 256)
            if not enc.contains(ONE):
                raise NotRegular(f"{norm.name}: eta(e_{i}) in [{float(enc.lo)}, {float(enc.hi)}]")


def is_regular(norm: NormSpec, n: int) -> bool:
    try:
        check_regular(norm, n)
    except NotRegular:
        return False
    return True


def compare_ratios(norm: NormSpec, num1: Scalar, s1: Sequence[Scalar],
                   num2: Scalar, s2: Sequence[Scalar]) -> int:
    """Sign of ``num1/eta(s1) - num2/eta(s2)`` for positive numerators.

    Exact for rational kinds and L2; interval-certified otherwise.
    """
    if norm.is_rational:
        lhs = num1 * rational_eval(norm, s2)
        rhs = num2 * rational_eval(norm, s1)
        return (lhs > rhs) - (lhs < rhs)
    if norm.kind == "l2":
        lhs = num1 * num1 * QVector._raw(s2).norm2_sq()
        rhs = num2 * num2 * QVector._raw(s1).norm2_sq()
        return (lhs > rhs) - (lhs < rhs)
    if norm.kind == "lp" and sorted(map(abs, s1)) == sorted(map(abs, s2)):
        # permutation-and-sign invariant norm: equal denominators, compare exactly
        return (num1 > num2) - (num1 < num2)
    bits = START_BITS
    while bits <= MAX_BITS:
        e1 = interval_eval(norm, s1, bits)
        e2 = interval_eval(norm, s2, bits)
        # num1*eta2 - num2*eta1 with positive numerators
        lo = num1 * e2.lo - num2 * e1.hi
        hi = num1 * e2.hi - num2 * e1.lo
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2
    raise UncertifiableComparison(f"{norm.name}: ratios not separated within {MAX_BITS} bits")


def parse_norm(text: str, n: Optional[int] = None) -> NormSpec:
    """Parse ``l1 | l2 | linf | lp:<p> | wl1:<w,...> | poly:<file>``."""
    text = text.strip()
    low = text.lower()
    if low == "l1":
        return NormSpec.l1()
    if low == "l2":
        return NormSpec.l2()
    if low in ("linf", "inf"):
        return NormSpec.linf()
    if low.startswith("lp:"):
        return NormSpec.lp(text[3:])
    if low.startswith("wl1:"):
        return NormSpec.weighted_l1(t for t in text[4:].split(",") if t.strip())
    if low.startswith("poly:"):
        import json
        from pathlib import Path

        rows = json.loads(Path(text[5:]).read_text(encoding="utf-8"))
        if isinstance(rows, dict):
            rows = rows["generators"]
        return NormSpec.polyhedral(rows, name=text)
    raise ValueError(f"unknown norm syntax {text!r}")


def random_regular_polyhedral(n: int, rng: random.Random, rows: Optional[int] = None) -> NormSpec:
    """Random ``max_i |g_i . x|`` norm, columns rescaled so ``eta(e_j) = 1``."""
    k = rows or n + rng.randint(1, n + 2)
    while True:
        G = [[gmpy2.mpq(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)] for _ in range(k)]
        if rank(G) == n and all(any(G[i][j] for i in range(k)) for j in range(n)):
            break
    for j in range(n):
        scale = max(abs(G[i][j]) for i in range(k))
        for i in range(k):
            G[i][j] /= scale
    return NormSpec.polyhedral(G, regular_required=True, name=f"poly-random-{k}x{n}")


def regular_battery(n: int, count: int = 25, seed: int = 0) -> list[NormSpec]:
    """Built-in regular norms followed by seeded random regular polyhedral norms."""
    norms = [
        NormSpec.l1(True),
        NormSpec.l2(True),
        NormSpec.linf(True),
        NormSpec.lp("5/4", True),
        NormSpec.lp("3/2", True),
        NormSpec.lp(3, True),
        NormSpec.lp(10, True),
        NormSpec.weighted_l1([1] * n, True),
    ]
    rng = random.Random(seed)
    while len(norms) < count:
        eta = random_regular_polyhedral(n, rng)
        # numbered so report entries stay distinct
        norms.append(replace(eta, name=f"{eta.name}#{len(norms)}"))
    return norms
