"""Expectation bounds on log det(I + H K H^H) under imperfect CSIT.

``H = H_hat + H_err`` with ``H_err`` i.i.d. CN(0, sigma2). The lower bound
uses the log-det offset of a complex Gaussian matrix (through the digamma
function), the upper bound the Frobenius norm of the estimate. Their gap
grows like ``-ln sigma2`` up to a constant, which is what the numerical
checks here verify. All values are in nats.
"""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .matkit import complex_normal, eig_hermitian, hermitian, logdet_posdef

__all__ = [
    "EULER_GAMMA",
    "DEFAULT_SLACK",
    "BoundInstance",
    "BoundReport",
    "digamma_int",
    "zeta_const",
    "lemma1_bounds",
    "lemma4_bounds",
    "mc_logdet",
    "check_sandwich",
    "random_instance",
    "reports_to_json",
]

EULER_GAMMA = 0.5772156649015329
DEFAULT_SLACK = 3.0


def digamma_int(x):
    """Digamma at a positive integer: ``-gamma + sum_{p < x} 1/p``."""
    if int(x) != x or x < 1:
        raise ValueError(f"digamma_int needs an integer >= 1, got {x}")
    return -EULER_GAMMA + math.fsum(1.0 / p for p in range(1, int(x)))


def zeta_const(N):
    """Mean of digamma(1), ..., digamma(N)."""
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    return math.fsum(digamma_int(k) for k in range(1, int(N) + 1)) / N


@dataclass(frozen=True)
class BoundInstance:
    """CSIT estimate ``hat`` (N x M), error variance and input covariance ``K``."""

    hat: np.ndarray
    sigma2: float
    K: np.ndarray

    def __post_init__(self):
        hat = np.atleast_2d(np.asarray(self.hat, dtype=complex))
        K = np.asarray(self.K, dtype=complex)
        object.__setattr__(self, "hat", hat)
        object.__setattr__(self, "K", K)
        if not 0 < self.sigma2 <= 1:
            raise ValueError("sigma2 must lie in (0, 1]")
        M = hat.shape[1]
        if K.shape != (M, M):
            raise ValueError(f"K must be {M} x {M}")
        if np.linalg.norm(K - hermitian(K)) > 1e-9 * max(1.0, np.abs(K).max()):
            raise ValueError("K must be Hermitian")
        w = eig_hermitian(K)
        if w[-1] < -1e-9 * max(1.0, w[0]):
            raise ValueError("K must be positive semidefinite")

    @property
    def N(self):
        return self.hat.shape[0]

    @property
    def M(self):
        return self.hat.shape[1]

    @property
    def eigenvalues(self):
        """Eigenvalues of K, descending, clipped at 0."""
        return np.maximum(eig_hermitian(self.K), 0.0)

    @property
    def hat_norm2(self):
        return float(np.sum(np.abs(self.hat) ** 2))


@dataclass(frozen=True)
class BoundReport:
    """Monte Carlo estimate, both bounds and the verdicts for one instance.

    ``gap`` is the largest per-eigenvalue difference between the upper and
    lower bound terms; ``gap_bound = -ln sigma2 + slack``.
    """

    N: int
    M: int
    sigma2: float
    mc_mean: float
    mc_stderr: float
    lower: float
    upper: float
    gap: float
    gap_bound: float
    slack: float
    in_sandwich: bool
    gap_ok: bool

    @property
    def verdict(self):
        return self.in_sandwich and self.gap_ok

    def to_dict(self):
        d = asdict(self)
        d["verdict"] = self.verdict
        return d

    @classmethod
    def from_dict(cls, d):
        d = {k: v for k, v in d.items() if k != "verdict"}
        return cls(**d)


def _terms(inst, fn):
    lam = inst.eigenvalues[: inst.N]
    return np.array([fn(x) for x in lam])


def lemma1_bounds(inst):
    """Vector-case bounds ``(ln(1 + e^-gamma sigma2 l1), ln(1 + |h_hat|^2 l1))``.

    Needs ``N = 1``; constants are omitted from both.
    """
    if inst.N != 1:
        raise ValueError("the vector-case bounds need N = 1")
    l1 = inst.eigenvalues[0]
    lower = math.log1p(math.exp(-EULER_GAMMA) * inst.sigma2 * l1)
    upper = math.log1p(inst.hat_norm2 * l1)
    return lower, upper


def _lemma4_terms(inst):
    if inst.M < inst.N:
        raise ValueError("the matrix-case bounds need M >= N")
    ez = math.exp(zeta_const(inst.N))
    lo = _terms(inst, lambda x: math.log1p(x * inst.sigma2 * ez))
    hi = _terms(inst, lambda x: math.log1p(inst.hat_norm2 * x))
    return lo, hi


def lemma4_bounds(inst):
    """Matrix-case bounds, summed over the N largest eigenvalues of K.

    ``lower = sum ln(1 + l_i sigma2 e^zeta)``,
    ``upper = sum ln(1 + ||H_hat||_F^2 l_i)``.
    """
    lo, hi = _lemma4_terms(inst)
    return float(lo.sum()), float(hi.sum())


def mc_logdet(rng, inst, n_trials):
    """``(mean, stderr)`` of ln det(I + H K H^H) over draws of the error.

    ``rng`` is a numpy Generator. ``K = 0`` gives exactly 0.
    """
    n_trials = int(n_trials)
    if n_trials < 2:
        raise ValueError("n_trials must be >= 2")
    err = complex_normal(rng, (n_trials, inst.N, inst.M), inst.sigma2)
    H = inst.hat + err
    A = np.eye(inst.N) + H @ inst.K @ hermitian(H)
    A = 0.5 * (A + hermitian(A))
    v = logdet_posdef(A)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(n_trials))


def check_sandwich(rng, inst, n_trials=10_000, slack_const=DEFAULT_SLACK):
    """Check ``lower - slack <= MC <= upper + slack`` and the gap bound.

    The vector-case bounds are used when N = 1, the matrix-case bounds
    otherwise (they coincide for N = M = 1).
    """
    mean, se = mc_logdet(rng, inst, n_trials)
    if inst.N == 1:
        lower, upper = lemma1_bounds(inst)
        gap = upper - lower
    else:
        lo, hi = _lemma4_terms(inst)
        lower, upper = float(lo.sum()), float(hi.sum())
        gap = float(np.max(hi - lo))
    gap_bound = -math.log(inst.sigma2) + slack_const
    return BoundReport(
        N=inst.N, M=inst.M, sigma2=float(inst.sigma2),
        mc_mean=mean, mc_stderr=se, lower=lower, upper=upper,
        gap=gap, gap_bound=gap_bound, slack=float(slack_const),
        in_sandwich=bool(lower - slack_const <= mean <= upper + slack_const),
        gap_ok=bool(gap <= gap_bound),
    )


def _haar_unitary(rng, M):
    z = complex_normal(rng, (M, M))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_instance(rng, N, M, sigma2, lam_range=(1e-1, 1e6)):
    """Random instance with an isotropic estimate of Frobenius norm^2 = N*M.

    K has Haar eigenvectors and eigenvalues log-uniform on ``lam_range``.
    """
    if M < N:
        raise ValueError("need M >= N")
    hat = complex_normal(rng, (N, M))
    hat *= math.sqrt(N * M) / np.linalg.norm(hat)
    lo, hi = (math.log(x) for x in lam_range)
    lam = np.sort(np.exp(rng.uniform(lo, hi, M)))[::-1]
    V = _haar_unitary(rng, M)
    K = (V * lam) @ hermitian(V)
    return BoundInstance(hat=hat, sigma2=sigma2, K=0.5 * (K + hermitian(K)))


def reports_to_json(reports, **kw):
    """JSON document with one row per report and pass/fail counts."""
    rows = [r.to_dict() for r in reports]
    passed = sum(r["verdict"] for r in rows)
    return json.dumps({"rows": rows, "passed": passed, "failed": len(rows) - passed}, **kw)
