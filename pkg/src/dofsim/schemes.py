"""Transmission schemes and their achievable rate pairs.

Every scheme draws its per-slot channels for all trials at once, builds
the received-signal decomposition each receiver sees, and evaluates the
conditional mutual information (bits per channel use) for each trial.
Rates are the trial means; standard errors are the trial standard
deviation over sqrt(trials).

Conventions
-----------
* Link ``(j, i)`` carries Tx-i to Rx-j and is an N x M matrix (a row for
  MISO); see :mod:`dofsim.channel`.
* Tx-1 zero-forces towards Rx-2 using the estimate of link (2, 1); Tx-2
  towards Rx-1 using link (1, 2).
* Three-slot schemes use slot 1 for fresh symbols, slot 2 for Tx-1 to
  forward what Rx-2 overheard, slot 3 for Tx-2 to forward what Rx-1
  overheard.
* Random streams are addressed by purpose (slot channels, precoder fill,
  data symbols) so the MISO and the (2, 1) MIMO code paths consume
  exactly the same numbers.
"""

from dataclasses import dataclass, field

import numpy as np

from .channel import CsitQuality, RngStream, draw_sample, draw_trials, precoding_reference
from .matkit import (
    LinAlgError,
    hermitian,
    logdet_posdef,
    null_space_basis,
    orth_complement,
    range_basis,
)
from .quantizer import QuantSpec, quantize

__all__ = [
    "NOISE_MODES",
    "MAX_SKIP_FRACTION",
    "SchemeError",
    "SchemeConfig",
    "RatePair",
    "SlotPowers",
    "run_enhanced_miso",
    "run_hk_corner",
    "run_mat_ic",
    "run_zf_only",
    "run_mimo_enhanced",
    "SCHEMES",
    "run_scheme",
]

NOISE_MODES = ("analytic", "empirical")
MAX_SKIP_FRACTION = 1e-3
MIN_TRIALS = 100

# stream ids under the config seed
_CHANNEL_STREAM = 0
_FILL_STREAM = 1
_SYMBOL_STREAM = 2


class SchemeError(RuntimeError):
    """A run could not produce a trustworthy estimate."""


@dataclass(frozen=True)
class SchemeConfig:
    """Parameters shared by every scheme.

    Parameters
    ----------
    alpha : float
        Current-CSIT quality exponent in [0, 1].
    P : float
        Transmit power per node per channel use (noise power is 1). P >= 1.
    trials : int
        Monte Carlo trials, at least 100.
    noise_mode : {"analytic", "empirical"}
        ``analytic`` uses the Gaussian rate-distortion model for the
        quantization error; ``empirical`` runs the concrete quantizer on
        drawn interference samples and uses the realized error.
    dims : (M, N)
        Antennas per transmitter and receiver. MISO schemes need (2, 1).
    seed : int
    common_precoder : {"range", "antenna"}
        MIMO only: which M x N basis carries the forwarded quantized
        interference. ``range`` uses the range basis of the slot's CSIT,
        ``antenna`` the first N antennas (this is exactly the MISO layout
        when N = 1).
    """

    alpha: float
    P: float
    trials: int = 3000
    noise_mode: str = "analytic"
    dims: tuple = (2, 1)
    seed: int = 0
    common_precoder: str = "range"

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not np.isfinite(self.P) or self.P < 1:
            raise ValueError(f"P must be finite and >= 1, got {self.P}")
        if int(self.trials) != self.trials or self.trials < MIN_TRIALS:
            raise ValueError(f"trials must be an integer >= {MIN_TRIALS}")
        if self.noise_mode not in NOISE_MODES:
            raise ValueError(f"noise_mode must be one of {NOISE_MODES}")
        if len(self.dims) != 2 or min(self.dims) < 1:
            raise ValueError("dims must be a pair (M, N) of positive integers")
        if self.common_precoder not in ("range", "antenna"):
            raise ValueError("common_precoder must be 'range' or 'antenna'")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "trials", int(self.trials))

    @property
    def csit(self):
        return CsitQuality(self.alpha, self.P)

    @property
    def streams(self):
        return RngStream(int(self.seed))


@dataclass(frozen=True)
class RatePair:
    """Per-user achievable rate estimate in bits per channel use."""

    r1: float
    r2: float
    se1: float
    se2: float
    P: float
    alpha: float
    trials: int = 0
    skipped: int = 0
    peak_power_ratio: float = 0.0
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("r1", "r2", "se1", "se2"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class SlotPowers:
    """Power budget of the three-slot enhanced schemes.

    Block powers are totals over the N streams of a block (N = 1 for MISO).
    """

    fresh_aligned: float
    fresh_free: float
    private: float
    common: float
    P: float

    @classmethod
    def for_config(cls, alpha, P):
        # The aligned slot-1 block gets P^(1-alpha), capped at P/2 so the free
        # block keeps a full-power share at alpha = 0.
        aligned = min(P ** (1.0 - alpha), P / 2.0)
        private = P ** alpha
        return cls(
            fresh_aligned=aligned,
            fresh_free=P - aligned,
            private=private,
            common=max(P - private, 0.0),
            P=P,
        )

    @property
    def quant_bits(self):
        """Bits per quantized interference sample, (1 - alpha) log2 P."""
        return max(np.log2(self.P) - np.log2(self.private), 0.0)

    def check(self, tol=1e-9):
        top = self.P * (1 + tol)
        if self.fresh_aligned + self.fresh_free > top or self.private + self.common > top:
            raise SchemeError("slot power budget exceeded")


# ---------------------------------------------------------------- helpers


def _stats(per_trial):
    """Mean and standard error over finite trials, plus the skip count."""
    ok = np.isfinite(per_trial)
    n = int(ok.sum())
    skipped = per_trial.size - n
    if skipped > MAX_SKIP_FRACTION * per_trial.size:
        raise SchemeError(
            f"{skipped} of {per_trial.size} trials hit singular matrices"
        )
    v = per_trial[ok]
    se = float(v.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return max(float(v.mean()), 0.0), se, skipped


def _logdet2(a):
    """log2 det per matrix in a stack; NaN where not positive definite."""
    try:
        return logdet_posdef(a, bits=True)
    except LinAlgError:
        out = np.full(a.shape[0], np.nan)
        for t in range(a.shape[0]):
            try:
                out[t] = logdet_posdef(a[t], bits=True)
            except LinAlgError:
                pass
        return out


def _pair(cfg, u1, u2, peak, diagnostics=None):
    r1, se1, k1 = _stats(u1)
    r2, se2, k2 = _stats(u2)
    return RatePair(
        r1=r1, r2=r2, se1=se1, se2=se2, P=float(cfg.P), alpha=float(cfg.alpha),
        trials=cfg.trials, skipped=max(k1, k2), peak_power_ratio=float(peak),
        diagnostics={k: float(v) for k, v in (diagnostics or {}).items()},
    )


def _draw_slots(cfg, n_slots):
    rng = cfg.streams.child(_CHANNEL_STREAM)
    return [draw_sample(rng.child(t), cfg.dims, cfg.csit, trials=cfg.trials)
            for t in range(n_slots)]


def _reference(cfg, slot, ch, tx):
    """Precoding reference of Tx-``tx`` in ``slot`` (its cross link estimate)."""
    link = (2, 1) if tx == 1 else (1, 2)
    fill = cfg.streams.child(_FILL_STREAM, slot, tx)
    return precoding_reference(ch.H_hat(*link), fill)


def _miso_dirs(cfg, slot, ch, tx):
    """Unit ZF-target direction and its orthogonal complement, shape (T, 2)."""
    ref = _reference(cfg, slot, ch, tx)
    d = np.conj(ref[:, 0, :])
    d = d / np.linalg.norm(d, axis=-1, keepdims=True)
    return d, orth_complement(d)


def _row(ch, j, i):
    return ch.H(j, i)[:, 0, :]


def _gain2(row, vec):
    return np.abs(np.sum(row * vec, axis=-1)) ** 2


def _require_miso(cfg):
    if cfg.dims != (2, 1):
        raise ValueError(f"MISO scheme needs dims (2, 1), got {cfg.dims}")


def _symbols(cfg, slot, tx, n_streams, powers):
    """CN(0, diag(powers)) data symbols, shape (T, n_streams)."""
    z = draw_trials(cfg.streams.child(_SYMBOL_STREAM, slot, tx), cfg.trials, (n_streams,))
    return z * np.sqrt(np.asarray(powers, dtype=float))


def _inv_common(eta_hat_power, common_power):
    """1 / a^2 for a forwarded codeword scaled by a to power ``common_power``.

    Zero when there is nothing to forward (the receiver knows the symbol).
    """
    eta_hat_power = np.asarray(eta_hat_power, dtype=float)
    if common_power <= 0:
        if np.any(eta_hat_power > 0):
            raise SchemeError("no power left for a nonzero common codeword")
        return np.zeros_like(eta_hat_power)
    return eta_hat_power / common_power


def _quantized_stats(cfg, eta_power, eta, bits):
    """Per-trial (distortion, power of eta_hat) of the forwarded sample(s).

    ``analytic`` uses the test channel eta = eta_hat + Delta with
    E|Delta|^2 = s 2^-bits; ``empirical`` quantizes the drawn ``eta``.
    """
    if cfg.noise_mode == "analytic":
        dist = eta_power * 2.0 ** (-bits)
        return dist, eta_power - dist
    res = quantize(eta, QuantSpec(bits, eta_power))
    return np.abs(res.error) ** 2, np.abs(res.quantized) ** 2


def _observation_factor(cfg, bits):
    """Noise inflation when eta_hat is used as an observation of eta.

    Under the test channel eta = eta_hat + Delta the error is independent of
    eta_hat, not of eta; seen from eta, eta_hat / beta = eta + noise with
    variance D / (1 - 2^-bits). Returns None when nothing is forwarded.
    """
    if cfg.noise_mode == "empirical" and QuantSpec(bits, 1.0).bits_per_dim == 0:
        return None
    if bits <= 0:
        return None
    return 1.0 / (1.0 - 2.0 ** (-bits))


# ------------------------------------------------------------ MISO schemes


def run_enhanced_miso(cfg):
    """Three-slot scheme with ZF precoding and quantized overheard interference.

    Slot 1 sends two fresh symbols per transmitter, one along the ZF
    target direction (power ``P^(1-alpha)``) and one along its complement.
    Slots 2 and 3 forward a quantized version of what the unintended
    receiver overheard, at power ``P - P^alpha`` on antenna 1, on top of a
    fresh private symbol of power ``P^alpha`` zero-forced with the slot's
    imperfect CSIT. The forwarded codeword carries ``(1 - alpha) log2 P``
    bits per sample.

    Each receiver stacks its slot-1 observation (minus its own quantized
    interference, known after decoding the common codeword) with the
    overheard copy of the other user's quantized sample, giving a 2 x 2
    equivalent channel, plus the two private symbols seen as parallel
    single-antenna channels.

    Returns
    -------
    RatePair
        ``diagnostics["common_margin"]`` (present when alpha < 1) is the
        smallest mean slack, in bits per use, between the forwarded
        codeword's rate and what either receiver can decode of it while
        treating everything else as noise.
    """
    _require_miso(cfg)
    P, a = float(cfg.P), float(cfg.alpha)
    pw = SlotPowers.for_config(a, P)
    pw.check()
    ch = _draw_slots(cfg, 3)
    q1, p1 = zip(*(_miso_dirs(cfg, t, ch[t], 1) for t in range(3)))
    q2, p2 = zip(*(_miso_dirs(cfg, t, ch[t], 2) for t in range(3)))
    c1, c2, c3 = ch
    bits = pw.quant_bits
    K1 = np.array([pw.fresh_aligned, pw.fresh_free])

    # slot 1: overheard interference at each receiver
    b1 = np.stack([q1[0], p1[0]], axis=-1)  # Tx-1 basis, (T, 2, 2)
    b2 = np.stack([q2[0], p2[0]], axis=-1)
    g21 = np.einsum("tm,tmk->tk", _row(c1, 2, 1), b1)  # Rx-2 sees Tx-1
    g12 = np.einsum("tm,tmk->tk", _row(c1, 1, 2), b2)
    s2 = np.abs(g21) ** 2 @ K1
    s1 = np.abs(g12) ** 2 @ K1
    u1 = _symbols(cfg, 0, 1, 2, K1)
    v1 = _symbols(cfg, 0, 2, 2, K1)
    d2, e2 = _quantized_stats(cfg, s2, np.sum(g21 * u1, axis=-1), bits)
    d1, e1 = _quantized_stats(cfg, s1, np.sum(g12 * v1, axis=-1), bits)
    inv2 = _inv_common(e2, pw.common)  # forwarded by Tx-1 in slot 2
    inv1 = _inv_common(e1, pw.common)  # forwarded by Tx-2 in slot 3
    obs = _observation_factor(cfg, bits)

    # private symbols of slots 2 and 3, as seen by each receiver
    pa = pw.private
    t12 = pa * _gain2(_row(c2, 1, 1), p1[1])
    t13 = pa * _gain2(_row(c2, 1, 2), p2[1])
    s12 = pa * _gain2(_row(c3, 1, 1), p1[2])
    s13 = pa * _gain2(_row(c3, 1, 2), p2[2])
    z22 = pa * _gain2(_row(c2, 2, 2), p2[1])
    z21 = pa * _gain2(_row(c2, 2, 1), p1[1])
    w22 = pa * _gain2(_row(c3, 2, 2), p2[2])
    w21 = pa * _gain2(_row(c3, 2, 1), p1[2])

    # common-codeword gains (antenna 1 of the forwarding transmitter)
    f1_r1 = np.abs(c3.H(1, 2)[:, 0, 0]) ** 2
    f2_r1 = np.abs(c2.H(1, 1)[:, 0, 0]) ** 2
    f2_r2 = np.abs(c2.H(2, 1)[:, 0, 0]) ** 2
    f1_r2 = np.abs(c3.H(2, 2)[:, 0, 0]) ** 2

    def user_rate(h_des, h_oth, b, d_own, d_oth, inv_own, inv_oth, f_own, f_oth,
                  acc_own, acc_oth):
        # acc_*: (desired, interfering) private powers in the slot that carries
        # the own / the other user's forwarded codeword
        heff = np.stack([np.einsum("tm,tmk->tk", h_des, b),
                         np.einsum("tm,tmk->tk", h_oth, b)], axis=1)
        heff = heff * np.sqrt(K1)
        w_a = d_own + 1.0 + (acc_own[0] + acc_own[1] + 1.0) * inv_own / f_own
        if obs is None:
            # the other user's sample was not forwarded: one row only
            mimo = np.log2(1 + np.sum(np.abs(heff[:, 0]) ** 2, axis=-1) / w_a)
        else:
            w_b = d_oth * obs + (acc_oth[0] + acc_oth[1] + 1.0) * inv_oth / f_oth
            w = np.zeros(heff.shape, dtype=complex)
            w[:, 0, 0], w[:, 1, 1] = w_a, w_b
            mimo = _logdet2(w + heff @ hermitian(heff)) - np.log2(w_a) - np.log2(w_b)
        par = sum(np.log2(1 + x / (y + 1)) for x, y in (acc_own, acc_oth))
        return (mimo + par) / 3.0

    # Rx-1: its own codeword comes in slot 3, the other in slot 2
    r1 = user_rate(_row(c1, 1, 1), _row(c1, 2, 1), b1, d1, d2, inv1, inv2,
                   f1_r1, f2_r1, (s12, s13), (t12, t13))
    # Rx-2: its own codeword comes in slot 2, the other in slot 3
    r2 = user_rate(_row(c1, 2, 2), _row(c1, 1, 2), b2, d2, d1, inv2, inv1,
                   f2_r2, f1_r2, (z22, z21), (w22, w21))

    diag = {"quant_bits": bits}
    if bits > 0:
        # each forwarded codeword decoded at both receivers, rest as noise
        pc = pw.common
        dec = [np.log2(1 + f2_r1 * pc / (t12 + t13 + 1)),
               np.log2(1 + f2_r2 * pc / (z22 + z21 + 1)),
               np.log2(1 + f1_r1 * pc / (s12 + s13 + 1)),
               np.log2(1 + f1_r2 * pc / (w22 + w21 + 1))]
        diag["common_margin"] = min(float(np.mean(x)) for x in dec) - bits
    peak = max(pw.fresh_aligned + pw.fresh_free,
               float(np.max(e2 / np.where(inv2 > 0, inv2, np.inf), initial=0.0)) + pa,
               float(np.max(e1 / np.where(inv1 > 0, inv1, np.inf), initial=0.0)) + pa) / P
    return _pair(cfg, r1, r2, peak, diag)


def _swap_users(ch):
    """Relabel the users of a channel sample (Tx/Rx 1 <-> 2)."""
    perm = {(1, 1): (2, 2), (2, 2): (1, 1), (1, 2): (2, 1), (2, 1): (1, 2)}
    return type(ch)(
        true={perm[k]: v for k, v in ch.true.items()},
        estimate={perm[k]: v for k, v in ch.estimate.items()},
        error={perm[k]: v for k, v in ch.error.items()},
        sigma2=ch.sigma2,
    )


def run_hk_corner(cfg, corner=1):
    """Single-slot scheme with a common message, for the corner (1, alpha).

    Tx-1 sends a common symbol on antenna 1 at power ``P - P^alpha`` and a
    private symbol zero-forced towards Rx-2 at power ``P^alpha``; Tx-2 sends
    only a zero-forced private symbol at power ``P^alpha``. Rx-1 decodes
    common then private; Rx-2 treats the leaked private of Tx-1 as noise
    and removes the common symbol first.

    ``corner=2`` swaps the roles of the users, giving the corner
    (alpha, 1).

    ``diagnostics["common_rate_rx2"]`` is the mean rate at which Rx-2 can
    decode the common symbol.
    """
    _require_miso(cfg)
    if corner not in (1, 2):
        raise ValueError("corner must be 1 or 2")
    P, a = float(cfg.P), float(cfg.alpha)
    pa = P ** a
    pc = max(P - pa, 0.0)
    (ch,) = _draw_slots(cfg, 1)
    if corner == 2:
        ch = _swap_users(ch)
    _, p1 = _miso_dirs(cfg, 0, ch, 1)
    _, p2 = _miso_dirs(cfg, 0, ch, 2)
    e11 = pa * _gain2(_row(ch, 1, 1), p1)
    e12 = pa * _gain2(_row(ch, 1, 2), p2)
    e22 = pa * _gain2(_row(ch, 2, 2), p2)
    e21 = pa * _gain2(_row(ch, 2, 1), p1)
    g11 = np.abs(ch.H(1, 1)[:, 0, 0]) ** 2
    g21 = np.abs(ch.H(2, 1)[:, 0, 0]) ** 2
    r1 = np.log2(1 + g11 * pc / (e11 + e12 + 1)) + np.log2(1 + e11 / (e12 + 1))
    r2 = np.log2(1 + e22 / (e21 + 1))
    common_rx2 = float(np.mean(np.log2(1 + g21 * pc / (e22 + e21 + 1))))
    if corner == 2:
        r1, r2 = r2, r1
    return _pair(cfg, r1, r2, (pc + pa) / P, {"common_rate_rx2": common_rx2})


def run_mat_ic(cfg):
    """Three-slot analog alignment with delayed CSIT only (alpha is ignored).

    Slot 1: each transmitter sends two fresh symbols, one per antenna, at
    power P/2 each. Slot 2: Tx-1 repeats on antenna 1 what Rx-2 overheard,
    scaled to power P. Slot 3: Tx-2 does the same for Rx-1. Each receiver
    ends with two noisy observations of its two symbols.
    """
    _require_miso(cfg)
    P = float(cfg.P)
    c1, c2, c3 = _draw_slots(cfg, 3)
    half = P / 2.0
    s2 = half * np.sum(np.abs(_row(c1, 2, 1)) ** 2, axis=-1)
    s1 = half * np.sum(np.abs(_row(c1, 1, 2)) ** 2, axis=-1)
    beta2, beta1 = P / s2, P / s1  # squared forwarding gains

    def user_rate(g_des, g_oth, f_own, f_oth):
        G = np.stack([g_des, g_oth], axis=1) * np.sqrt(half)
        w_a = 1.0 + 1.0 / (f_own * beta_own)
        w_b = 1.0 / (f_oth * beta_oth)
        w = np.zeros(G.shape, dtype=complex)
        w[:, 0, 0], w[:, 1, 1] = w_a, w_b
        return (_logdet2(w + G @ hermitian(G)) - np.log2(w_a) - np.log2(w_b)) / 3.0

    beta_own, beta_oth = beta1, beta2
    r1 = user_rate(_row(c1, 1, 1), _row(c1, 2, 1),
                   np.abs(c3.H(1, 2)[:, 0, 0]) ** 2, np.abs(c2.H(1, 1)[:, 0, 0]) ** 2)
    beta_own, beta_oth = beta2, beta1
    r2 = user_rate(_row(c1, 2, 2), _row(c1, 1, 2),
                   np.abs(c2.H(2, 1)[:, 0, 0]) ** 2, np.abs(c3.H(2, 2)[:, 0, 0]) ** 2)
    return _pair(cfg, r1, r2, 1.0)


def run_zf_only(cfg):
    """One symbol per transmitter on the ZF direction, at full power P.

    Residual leakage through the imperfect null is treated as noise.
    """
    _require_miso(cfg)
    P = float(cfg.P)
    (ch,) = _draw_slots(cfg, 1)
    _, p1 = _miso_dirs(cfg, 0, ch, 1)
    _, p2 = _miso_dirs(cfg, 0, ch, 2)
    r1 = np.log2(1 + P * _gain2(_row(ch, 1, 1), p1) / (P * _gain2(_row(ch, 1, 2), p2) + 1))
    r2 = np.log2(1 + P * _gain2(_row(ch, 2, 2), p2) / (P * _gain2(_row(ch, 2, 1), p1) + 1))
    return _pair(cfg, r1, r2, 1.0)


# ------------------------------------------------------------------- MIMO


def _sandwich_inv(b, c):
    """b^-1 c b^-H for a stack of square b and Hermitian c."""
    left = np.linalg.solve(b, c)
    return hermitian(np.linalg.solve(b, hermitian(left)))


def _cov(h, q, power_per_stream):
    """Covariance of h q s with s ~ CN(0, power I)."""
    hq = h @ q
    return power_per_stream * (hq @ hermitian(hq))


def run_mimo_enhanced(cfg):
    """Three-slot enhanced scheme for M transmit and N receive antennas.

    The MIMO version of :func:`run_enhanced_miso`: the ZF target direction
    becomes the range basis of the slot's CSIT (M x N), its complement the
    null-space basis, each block carries N streams with the block power
    split evenly, and the overheard N-vectors are quantized element-wise.
    The forwarded codeword occupies N streams (see
    ``SchemeConfig.common_precoder``).

    Requires ``M >= 2N``.
    """
    M, N = cfg.dims
    if M < 2 * N:
        raise ValueError(f"MIMO scheme needs M >= 2N, got dims {cfg.dims}")
    P, a = float(cfg.P), float(cfg.alpha)
    pw = SlotPowers.for_config(a, P)
    pw.check()
    ch = _draw_slots(cfg, 3)
    T = cfg.trials
    bits = pw.quant_bits
    eye = np.eye(N)

    def bases(t, tx):
        ref = _reference(cfg, t, ch[t], tx)
        q = range_basis(ref)
        qp = null_space_basis(ref, N)
        if cfg.common_precoder == "antenna":
            e = np.broadcast_to(np.eye(M)[:, :N], (T, M, N))
        else:
            e = q
        return q, qp, e

    tx1 = [bases(t, 1) for t in range(3)]
    tx2 = [bases(t, 2) for t in range(3)]
    c1, c2, c3 = ch
    K = np.concatenate([np.full(N, pw.fresh_aligned / N), np.full(N, pw.fresh_free / N)])
    B1 = np.concatenate(tx1[0][:2], axis=-1)  # (T, M, 2N)
    B2 = np.concatenate(tx2[0][:2], axis=-1)

    # slot 1 overheard interference: eta2 at Rx-2 from Tx-1, eta1 at Rx-1 from Tx-2
    G21 = c1.H(2, 1) @ B1
    G12 = c1.H(1, 2) @ B2
    S2 = np.real(np.einsum("tnk,k,tnk->tn", G21, K, np.conj(G21)))
    S1 = np.real(np.einsum("tnk,k,tnk->tn", G12, K, np.conj(G12)))
    u1 = _symbols(cfg, 0, 1, 2 * N, K)
    v1 = _symbols(cfg, 0, 2, 2 * N, K)
    D2, E2 = _quantized_stats(cfg, S2, np.einsum("tnk,tk->tn", G21, u1), bits)
    D1, E1 = _quantized_stats(cfg, S1, np.einsum("tnk,tk->tn", G12, v1), bits)
    inv2 = _inv_common(E2.sum(axis=-1), pw.common)
    inv1 = _inv_common(E1.sum(axis=-1), pw.common)
    obs = _observation_factor(cfg, bits)

    pp = pw.private / N
    # private-block covariances: C[rx][tx] in slot 2 and slot 3
    C2 = {(j, i): _cov(c2.H(j, i), (tx1 if i == 1 else tx2)[1][1], pp)
          for j in (1, 2) for i in (1, 2)}
    C3 = {(j, i): _cov(c3.H(j, i), (tx1 if i == 1 else tx2)[2][1], pp)
          for j in (1, 2) for i in (1, 2)}

    def parallel(c_des, c_int):
        return _logdet2(eye + c_int + c_des) - _logdet2(eye + c_int)

    def user_rate(h_des, h_oth, B, d_own, d_oth, inv_own, inv_oth,
                  f_own, c_own, f_oth, c_oth, c_own_des, c_oth_des):
        heff = np.concatenate([h_des @ B, h_oth @ B], axis=1) * np.sqrt(K)
        w = np.zeros((T, 2 * N, 2 * N), dtype=complex)
        w[:, :N, :N] = (np.einsum("tn,nm->tnm", d_own + 1.0, eye)
                        + inv_own[:, None, None] * _sandwich_inv(f_own, c_own + eye))
        if obs is None:
            w, heff = w[:, :N, :N], heff[:, :N]
        else:
            w[:, N:, N:] = (np.einsum("tn,nm->tnm", d_oth * obs, eye)
                            + inv_oth[:, None, None] * _sandwich_inv(f_oth, c_oth + eye))
        w = 0.5 * (w + hermitian(w))
        mimo = _logdet2(w + heff @ hermitian(heff)) - _logdet2(w)
        par = parallel(*c_own_des) + parallel(*c_oth_des)
        return (mimo + par) / 3.0

    # common codeword gains: eta_hat_2 sent by Tx-1 in slot 2, eta_hat_1 by Tx-2 in slot 3
    e1_s2 = tx1[1][2]
    e2_s3 = tx2[2][2]
    r1 = user_rate(
        c1.H(1, 1), c1.H(2, 1), B1, D1, D2, inv1, inv2,
        c3.H(1, 2) @ e2_s3, C3[(1, 1)] + C3[(1, 2)],
        c2.H(1, 1) @ e1_s2, C2[(1, 1)] + C2[(1, 2)],
        (C2[(1, 1)], C2[(1, 2)]), (C3[(1, 1)], C3[(1, 2)]),
    )
    r2 = user_rate(
        c1.H(2, 2), c1.H(1, 2), B2, D2, D1, inv2, inv1,
        c2.H(2, 1) @ e1_s2, C2[(2, 2)] + C2[(2, 1)],
        c3.H(2, 2) @ e2_s3, C3[(2, 2)] + C3[(2, 1)],
        (C2[(2, 2)], C2[(2, 1)]), (C3[(2, 2)], C3[(2, 1)]),
    )
    fwd = [E / np.where(inv > 0, inv, np.inf)[:, None] for E, inv in ((E2, inv2), (E1, inv1))]
    peak = max(pw.fresh_aligned + pw.fresh_free,
               *(float(np.max(f.sum(axis=-1), initial=0.0)) + pw.private for f in fwd)) / P
    return _pair(cfg, r1, r2, peak, {"quant_bits": bits})


SCHEMES = {
    "enhanced": run_enhanced_miso,
    "hk": run_hk_corner,
    "mat": run_mat_ic,
    "zf": run_zf_only,
    "mimo": run_mimo_enhanced,
}


def run_scheme(name, cfg):
    """Run a scheme by id (one of :data:`SCHEMES`)."""
    try:
        fn = SCHEMES[name]
    except KeyError:
        raise ValueError(f"unknown scheme {name!r}; choose from {sorted(SCHEMES)}") from None
    return fn(cfg)
