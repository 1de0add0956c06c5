"""Channel and CSIT model for the two-user interference channel.

Links are indexed ``(j, i)`` for Tx-i -> Rx-j. Each link is stored as an
N x M matrix ``H`` with ``y = H x``; in the MISO case (N = 1) this is the
row ``h^H``, so ``H[..., 0, 0]`` is the conjugated first entry of ``h``.

The transmitter sees an estimate ``H_hat`` and the error ``H_err`` with
``H = H_hat + H_err`` where the entries are CN(0, 1 - sigma2) and
CN(0, sigma2), independent of each other.
"""

from dataclasses import dataclass, field

import numpy as np

from .matkit import complex_normal, orth_complement

__all__ = [
    "LINKS",
    "TRIAL_BLOCK",
    "CsitQuality",
    "RngStream",
    "ChannelSample",
    "sigma2_of",
    "draw_sample",
    "draw_trials",
    "precoding_reference",
    "leakage_power_mc",
]

LINKS = ((1, 1), (1, 2), (2, 1), (2, 2))

# Trials are drawn in fixed-size blocks, one generator per block, so a
# trial's values depend only on (seed, stream, trial index).
TRIAL_BLOCK = 512


def sigma2_of(alpha, P):
    """Current-CSIT error variance ``min(1, P**-alpha)``.

    ``alpha > 1`` is accepted; it only makes sigma2 smaller than 1/P.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if P < 1:
        raise ValueError(f"P must be >= 1, got {P}")
    return min(1.0, float(P) ** (-float(alpha)))


@dataclass(frozen=True)
class CsitQuality:
    alpha: float
    power: float

    def __post_init__(self):
        sigma2_of(self.alpha, self.power)

    @property
    def sigma2(self):
        return sigma2_of(self.alpha, self.power)


@dataclass(frozen=True)
class RngStream:
    """Counter-addressed random stream.

    ``stream`` is a tuple of nonnegative integers (for example trial block,
    slot, link). Equal ``(seed, stream)`` pairs always produce identical
    draws, whatever order they are requested in.
    """

    seed: int
    stream: tuple = ()

    def child(self, *ids):
        return RngStream(self.seed, self.stream + tuple(int(i) for i in ids))

    def generator(self):
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.stream)
        return np.random.Generator(np.random.PCG64(ss))


def _blocked(rng, n_trials, draw):
    """Concatenate ``draw(generator, block_size)`` over trial blocks."""
    n_blocks = -(-n_trials // TRIAL_BLOCK)
    parts = [draw(rng.child(b).generator(), TRIAL_BLOCK) for b in range(n_blocks)]
    return np.concatenate(parts, axis=0)[:n_trials]


def draw_trials(rng, n_trials, shape, var=1.0):
    """CN(0, var) array of shape ``(n_trials, *shape)`` drawn block-wise."""
    return _blocked(rng, n_trials, lambda g, b: complex_normal(g, (b,) + tuple(shape), var))


def _link_id(j, i):
    return 2 * (j - 1) + (i - 1)


@dataclass(frozen=True)
class ChannelSample:
    """One time instant's four links, optionally with a leading trial axis."""

    true: dict = field(repr=False)
    estimate: dict = field(repr=False)
    error: dict = field(repr=False)
    sigma2: float = 1.0

    def H(self, j, i):
        return self.true[(j, i)]

    def H_hat(self, j, i):
        return self.estimate[(j, i)]

    def H_err(self, j, i):
        return self.error[(j, i)]


def draw_sample(rng, dims, q, trials=None):
    """Draw the four links and their CSIT split.

    Parameters
    ----------
    rng : RngStream
    dims : (M, N)
        Transmit and receive antennas per node.
    q : CsitQuality
    trials : int, optional
        If given, every array gets a leading axis of this length.
    """
    M, N = dims
    if M < 1 or N < 1:
        raise ValueError("dims must be positive")
    s2 = q.sigma2
    n = 1 if trials is None else int(trials)
    true, est, err = {}, {}, {}
    for j, i in LINKS:
        link = rng.child(_link_id(j, i))
        z_hat = draw_trials(link.child(0), n, (N, M))
        z_err = draw_trials(link.child(1), n, (N, M))
        hat = np.sqrt(1.0 - s2) * z_hat
        tilde = np.sqrt(s2) * z_err
        if trials is None:
            hat, tilde = hat[0], tilde[0]
        est[(j, i)] = hat
        err[(j, i)] = tilde
        true[(j, i)] = hat + tilde
    return ChannelSample(true=true, estimate=est, error=err, sigma2=s2)


def precoding_reference(estimate, rng):
    """The matrix a transmitter designs its precoder from.

    Normally that is the CSIT estimate itself. When the estimate carries no
    information (sigma2 = 1, so it is identically zero) the direction is
    arbitrary; an isotropic draw independent of the channel stands in for
    it so range/null-space bases stay well defined.
    """
    estimate = np.asarray(estimate)
    zero = ~np.any(estimate != 0, axis=(-2, -1))
    if not np.any(zero):
        return estimate
    n = estimate.shape[0] if estimate.ndim == 3 else None
    fill = draw_trials(rng, n or 1, estimate.shape[-2:])
    if n is None:
        fill = fill[0]
    return np.where(zero[..., None, None], fill, estimate)


def leakage_power_mc(rng, alpha, P, n_trials):
    """Monte Carlo estimate of ``E |h^H h_hat_perp|^2`` for a 2-antenna link.

    Returns ``(mean, stderr)``; the exact value is ``sigma2_of(alpha, P)``.
    """
    if n_trials < 100:
        raise ValueError("n_trials must be >= 100")
    q = CsitQuality(alpha, P)
    ch = draw_sample(rng.child(0), (2, 1), q, trials=n_trials)
    ref = precoding_reference(ch.H_hat(2, 1), rng.child(1))
    w = orth_complement(np.conj(ref[:, 0, :]))
    leak = np.abs(np.sum(ch.H(2, 1)[:, 0, :] * w, axis=-1)) ** 2
    return float(leak.mean()), float(leak.std(ddof=1) / np.sqrt(n_trials))
