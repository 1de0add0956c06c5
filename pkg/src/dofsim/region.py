"""Exact DoF region polygons.

Regions are intersections of half-planes ``a d1 + b d2 <= c`` with
rational coefficients. Vertices are found exactly with
:class:`fractions.Fraction`; floats only enter at :func:`contains`, which
tests simulated (normalized) rate points.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

__all__ = [
    "HalfPlane",
    "RegionPolygon",
    "as_fraction",
    "theorem1_region",
    "theorem2_region",
    "reference_regions",
    "contains",
    "vertices_from_halfplanes",
]


def as_fraction(x):
    """Exact rational from an int, Fraction, decimal string or ``"p/q"``.

    Floats are converted through their shortest decimal repr, so 0.5 -> 1/2
    and 0.1 -> 1/10.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class HalfPlane:
    """``a*d1 + b*d2 <= c``."""

    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        for k in ("a", "b", "c"):
            object.__setattr__(self, k, as_fraction(getattr(self, k)))
        if self.a == 0 and self.b == 0:
            raise ValueError("half-plane needs a nonzero normal")

    def slack(self, pt):
        return self.c - (self.a * pt[0] + self.b * pt[1])


def _cross(o, p, q):
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])


def _hull(points):
    """Convex hull, counter-clockwise, collinear points dropped (exact)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def vertices_from_halfplanes(halfplanes):
    """Extreme points of a bounded intersection of half-planes.

    Every pair of boundary lines is intersected, infeasible points are
    dropped, and the hull removes points that are not extreme.
    """
    cands = []
    for h, g in combinations(halfplanes, 2):
        det = h.a * g.b - h.b * g.a
        if det == 0:
            continue
        x = (h.c * g.b - h.b * g.c) / det
        y = (h.a * g.c - h.c * g.a) / det
        if all(k.slack((x, y)) >= 0 for k in halfplanes):
            cands.append((x, y))
    return tuple(_hull(cands))


@dataclass(frozen=True)
class RegionPolygon:
    label: str
    halfplanes: tuple
    vertices: tuple

    @classmethod
    def from_halfplanes(cls, label, halfplanes):
        hp = tuple(halfplanes)
        return cls(label=label, halfplanes=hp, vertices=vertices_from_halfplanes(hp))

    def scaled(self, factor, label=None):
        f = as_fraction(factor)
        if f <= 0:
            raise ValueError("scale factor must be positive")
        hp = tuple(HalfPlane(h.a, h.b, h.c * f) for h in self.halfplanes)
        return RegionPolygon.from_halfplanes(label or self.label, hp)

    def contains_exact(self, pt):
        pt = (as_fraction(pt[0]), as_fraction(pt[1]))
        return all(h.slack(pt) >= 0 for h in self.halfplanes)

    def nonzero_vertices(self):
        return frozenset(v for v in self.vertices if v != (0, 0))

    def to_dict(self):
        def fr(x):
            return [x.numerator, x.denominator]

        return {
            "label": self.label,
            "vertices": [[fr(x), fr(y)] for x, y in self.vertices],
            "halfplanes": [[fr(h.a), fr(h.b), fr(h.c)] for h in self.halfplanes],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        def fr(p):
            return Fraction(int(p[0]), int(p[1]))

        return cls(
            label=d["label"],
            halfplanes=tuple(HalfPlane(*(fr(c) for c in h)) for h in d["halfplanes"]),
            vertices=tuple((fr(x), fr(y)) for x, y in d["vertices"]),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _check_alpha(alpha):
    a = as_fraction(alpha)
    if not 0 <= a <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return a


def theorem1_region(alpha):
    """DoF region of the two-user MISO IC with delayed and imperfect current CSIT.

    ``d_i <= 1``, ``2 d1 + d2 <= 2 + alpha``, ``d1 + 2 d2 <= 2 + alpha``,
    ``d_i >= 0``, with ``alpha`` an exact rational in [0, 1].
    """
    a = _check_alpha(alpha)
    hp = (
        HalfPlane(1, 0, 1),
        HalfPlane(0, 1, 1),
        HalfPlane(2, 1, 2 + a),
        HalfPlane(1, 2, 2 + a),
        HalfPlane(-1, 0, 0),
        HalfPlane(0, -1, 0),
    )
    return RegionPolygon.from_halfplanes(f"miso alpha={a}", hp)


def theorem2_region(alpha, N):
    """The MISO region scaled by the receive-antenna count ``N``."""
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    a = _check_alpha(alpha)
    return theorem1_region(a).scaled(int(N), label=f"mimo N={int(N)} alpha={a}")


def reference_regions():
    """Labeled reference polygons: no CSIT, delayed CSIT only, perfect CSIT.

    The no-CSIT region ``d1 + d2 <= 1`` is a reference value, not derived
    here.
    """
    none = RegionPolygon.from_halfplanes(
        "no CSIT", (HalfPlane(1, 1, 1), HalfPlane(-1, 0, 0), HalfPlane(0, -1, 0))
    )
    delayed = theorem1_region(0)
    perfect = theorem1_region(1)
    return {
        "none": none,
        "delayed": RegionPolygon(label="delayed CSIT", halfplanes=delayed.halfplanes,
                                 vertices=delayed.vertices),
        "perfect": RegionPolygon(label="perfect CSIT", halfplanes=perfect.halfplanes,
                                 vertices=perfect.vertices),
    }


def contains(region, point, eps=0.0, metric="additive"):
    """Float containment of ``point`` in ``region`` up to ``eps``.

    ``metric="additive"`` allows every half-plane a slack of ``eps``.
    ``metric="chebyshev"`` inflates the polygon by ``eps`` in the max-norm,
    i.e. a half-plane with normal (a, b) gets slack ``eps * (|a| + |b|)``.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if metric not in ("additive", "chebyshev"):
        raise ValueError("metric must be 'additive' or 'chebyshev'")
    x, y = float(point[0]), float(point[1])
    for h in region.halfplanes:
        a, b, c = float(h.a), float(h.b), float(h.c)
        tol = eps * (abs(a) + abs(b)) if metric == "chebyshev" else eps
        if a * x + b * y > c + tol:
            return False
    return True
