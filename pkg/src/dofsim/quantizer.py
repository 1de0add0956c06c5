"""Quantization of the overheard residual interference.

Two views of the same step are provided. :func:`model_distortion` is the
Gaussian rate-distortion shape ``E|Delta|^2 = power * 2**-rate`` used by the
analytic rate computations; :func:`quantize` is a concrete clipped uniform
scalar quantizer (separately on the real and imaginary parts) whose
distortion has the same exponent in the rate.
"""

import math
from dataclasses import dataclass

import numpy as np

from .matkit import complex_normal

__all__ = [
    "CLIP_SIGMAS",
    "QuantSpec",
    "QuantResult",
    "model_distortion",
    "quantize",
    "empirical_distortion",
]

CLIP_SIGMAS = 4.0


@dataclass(frozen=True)
class QuantSpec:
    """Bit budget per complex sample and the source power E|eta|^2.

    ``source_power`` may be an array broadcasting against the samples, for
    sources whose variance changes from sample to sample.
    """

    rate_bits: float
    source_power: float

    def __post_init__(self):
        if self.rate_bits < 0:
            raise ValueError("rate_bits must be >= 0")
        if np.any(np.asarray(self.source_power) < 0):
            raise ValueError("source_power must be >= 0")

    @property
    def bits_per_dim(self):
        return int(math.floor(self.rate_bits / 2.0))

    @property
    def step(self):
        """Spacing of the reconstruction levels (per real dimension)."""
        clip = CLIP_SIGMAS * np.sqrt(np.asarray(self.source_power) / 2.0)
        return 2.0 * clip / 2 ** self.bits_per_dim


@dataclass(frozen=True)
class QuantResult:
    quantized: np.ndarray
    error: np.ndarray


def model_distortion(spec):
    """Distortion of an ideal Gaussian source code at ``spec.rate_bits``."""
    return spec.source_power * 2.0 ** (-spec.rate_bits)


def _uniform(x, clip, bits):
    """Mid-tread uniform quantizer with 2**bits levels k*step, step = 2 clip / 2**bits.

    Zero is a level, so inputs smaller than half a step map to 0 and the
    error equals the input exactly.
    """
    if bits == 0:
        return np.zeros_like(x)
    half = 2 ** (bits - 1)
    step = np.asarray(clip / half)
    safe = np.where(step > 0, step, 1.0)
    k = np.clip(np.rint(x / safe), -half, half - 1)
    return np.where(step > 0, k * step, 0.0)


def quantize(x, spec):
    """Quantize complex sample(s) ``x`` at ``spec.rate_bits`` bits each.

    ``floor(rate/2)`` bits go to each of the real and imaginary parts, over
    the range ``+-4 sqrt(power/2)``; samples outside are clipped to the
    outermost level. With fewer than two bits the reconstruction is 0.

    ``quantized + error`` reproduces ``x`` bit for bit.
    """
    x = np.asarray(x, dtype=complex)
    clip = CLIP_SIGMAS * np.sqrt(np.asarray(spec.source_power, dtype=float) / 2.0)
    b = spec.bits_per_dim
    xq = _uniform(x.real, clip, b) + 1j * _uniform(x.imag, clip, b)
    err = x - xq
    # Inside the grid the subtraction is exact (x and xq within a factor of
    # two, or xq = 0). Far-clipped samples need the level nudged by < 1 ulp.
    bad = xq + err != x
    if np.any(bad):
        xq = np.where(bad, x - err, xq)
    return QuantResult(quantized=xq, error=err)


def empirical_distortion(rng, spec, n_trials):
    """Mean |Delta|^2 of :func:`quantize` over CN(0, power) inputs.

    ``rng`` is a numpy Generator. Returns ``(mean, stderr)``.
    """
    x = complex_normal(rng, (int(n_trials),), float(spec.source_power))
    d = np.abs(quantize(x, spec).error) ** 2
    return float(d.mean()), float(d.std(ddof=1) / math.sqrt(len(d)))
