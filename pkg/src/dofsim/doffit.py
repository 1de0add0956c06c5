"""Power sweeps and DoF slope estimation.

The DoF of a user is the pre-log of its rate. At finite power it is
estimated as the least-squares slope of rate against ``log2 P`` over the
highest few grid points, where the constant terms matter least.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .schemes import SCHEMES

__all__ = [
    "DEFAULT_GRID",
    "DEFAULT_WINDOW",
    "RateCurve",
    "DofFit",
    "db_to_linear",
    "linear_to_db",
    "power_grid_db",
    "fit_dof",
    "fit_slope",
    "sweep",
]

DEFAULT_GRID = (1e4, 1e5, 1e6, 1e7, 1e8)
DEFAULT_WINDOW = 4


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(p):
    return 10.0 * np.log10(np.asarray(p, dtype=float))


def power_grid_db(pmin_db=40.0, pmax_db=80.0, points=5):
    """Linear powers evenly spaced in dB, endpoints included."""
    if points < 3:
        raise ValueError("a power grid needs at least 3 points")
    if not pmax_db > pmin_db:
        raise ValueError("pmax_db must exceed pmin_db")
    return tuple(float(p) for p in db_to_linear(np.linspace(pmin_db, pmax_db, points)))


@dataclass(frozen=True)
class RateCurve:
    """Rate pairs of one scheme at one alpha over a strictly increasing P grid."""

    scheme: str
    alpha: float
    points: tuple  # of RatePair

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 3:
            raise ValueError("a rate curve needs at least 3 points")
        p = np.array([r.P for r in pts])
        if np.any(np.diff(p) <= 0):
            raise ValueError("power grid must be strictly increasing")

    @property
    def powers(self):
        return np.array([r.P for r in self.points])

    def rates(self, user):
        return np.array([getattr(r, f"r{user}") for r in self.points])

    def stderrs(self, user):
        return np.array([getattr(r, f"se{user}") for r in self.points])


@dataclass(frozen=True)
class DofFit:
    """Fitted per-user slopes of rate versus log2 P.

    ``window`` holds the grid indices used. ``last_pair1/2`` are the
    difference quotients between the two highest grid points.
    """

    slope1: float
    slope2: float
    stderr1: float
    stderr2: float
    window: tuple
    last_pair1: float
    last_pair2: float

    def __post_init__(self):
        vals = (self.slope1, self.slope2, self.stderr1, self.stderr2)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("fit produced non-finite values")

    def to_dict(self):
        return {
            "slope1": self.slope1, "slope2": self.slope2,
            "stderr1": self.stderr1, "stderr2": self.stderr2,
            "window": list(self.window),
            "last_pair1": self.last_pair1, "last_pair2": self.last_pair2,
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["window"] = tuple(d["window"])
        return cls(**d)


def fit_slope(x, y):
    """OLS slope of ``y`` on ``x`` and its standard error from the residuals.

    With exactly two points the standard error is reported as 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points")
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx <= 0:
        raise ValueError("degenerate grid: all x values equal")
    slope = float(xc @ (y - y.mean())) / sxx
    if x.size == 2:
        return slope, 0.0
    resid = y - y.mean() - slope * xc
    s2 = float(resid @ resid) / (x.size - 2)
    return slope, float(np.sqrt(s2 / sxx))


def fit_dof(curve, window=DEFAULT_WINDOW):
    """Fit both users' slopes over the top ``window`` points of ``curve``."""
    n = len(curve.points)
    if window < 3:
        raise ValueError("window must be at least 3")
    if window > n:
        raise ValueError(f"window {window} exceeds the {n}-point grid")
    idx = tuple(range(n - window, n))
    x = np.log2(curve.powers)
    if np.any(np.diff(x) <= 0):
        raise ValueError("degenerate grid: powers are not distinct")
    fits, last = [], []
    for user in (1, 2):
        y = curve.rates(user)
        fits.append(fit_slope(x[list(idx)], y[list(idx)]))
        last.append(float((y[-1] - y[-2]) / (x[-1] - x[-2])))
    return DofFit(
        slope1=fits[0][0], slope2=fits[1][0],
        stderr1=fits[0][1], stderr2=fits[1][1],
        window=idx, last_pair1=last[0], last_pair2=last[1],
    )


def sweep(scheme, template, grid=DEFAULT_GRID, threads=1, **scheme_kwargs):
    """Run ``scheme`` at every power in ``grid``.

    Parameters
    ----------
    scheme : str or callable
        A key of :data:`dofsim.schemes.SCHEMES` or a function
        ``cfg -> RatePair``.
    template : SchemeConfig
        Supplies alpha, trials, seed, mode and dims; its ``P`` is replaced.
    grid : sequence of float
        Linear powers, strictly increasing, at least 3.
    threads : int
        Grid points run concurrently on up to this many threads. Results do
        not depend on it.
    """
    if callable(scheme):
        fn, name = scheme, getattr(scheme, "__name__", "custom")
    else:
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}; choose from {sorted(SCHEMES)}")
        fn, name = SCHEMES[scheme], scheme
    grid = [float(p) for p in grid]
    if len(grid) < 3:
        raise ValueError("a sweep needs at least 3 grid points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("power grid must be strictly increasing")
    cfgs = [replace(template, P=p) for p in grid]

    def one(cfg):
        return fn(cfg, **scheme_kwargs)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            points = list(pool.map(one, cfgs))
    else:
        points = [one(c) for c in cfgs]
    return RateCurve(scheme=name, alpha=float(template.alpha), points=tuple(points))
