"""Multi-tone sinusoidal FM phase model.

The instantaneous phase is a truncated Fourier series over the pulse,

    phi(t) = a0/2 + sum_k alpha_k sin(2 pi k t / T) + beta_k cos(2 pi k t / T),

so the phase is infinitely differentiable. Fitting this series to a
phase-coded pulse smooths the inter-chip jumps; the coefficients then double
as the free variables of the sidelobe optimizer.
"""

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._validation import (as_float_vector, check_in_pulse, check_int_at_least,
                          check_positive)
from .codes import PhaseCode
from .waveform import SampledWaveform

__all__ = [
    "MtsfmParams",
    "min_harmonics",
    "fit_fourier",
    "mtsfm_phase",
    "mtsfm_modulation",
    "min_samples",
    "synthesize_mtsfm",
    "closed_form_rms_bandwidth",
    "closed_form_rms_bandwidth_gradient",
]


@dataclass(frozen=True)
class MtsfmParams:
    """Fourier phase coefficients of one waveform.

    ``alpha`` holds the K sine coefficients, ``beta`` the K cosine
    coefficients, ``a0`` the constant term (the constant phase is a0/2).
    """

    a0: float
    alpha: np.ndarray
    beta: np.ndarray
    T: float

    def __post_init__(self):
        alpha = as_float_vector(self.alpha, "alpha")
        beta = as_float_vector(self.beta, "beta")
        if alpha.size != beta.size:
            raise ValueError(f"alpha and beta must have equal length, "
                             f"got {alpha.size} and {beta.size}")
        if not np.isfinite(self.a0):
            raise ValueError("a0 must be finite")
        check_positive("T", self.T)
        alpha.flags.writeable = False
        beta.flags.writeable = False
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def K(self):
        return self.alpha.size

    def coefficient_vector(self):
        """All 2K free coefficients as one vector: alpha then beta."""
        return np.concatenate([self.alpha, self.beta])

    def with_coefficients(self, vector):
        """Copy of these params with the 2K coefficients replaced."""
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (2 * self.K,):
            raise ValueError(f"expected {2 * self.K} coefficients, got shape {vector.shape}")
        return MtsfmParams(self.a0, vector[: self.K], vector[self.K:], self.T)

    def to_json(self, extra=None):
        """Serialize as {"T", "a0", "alpha", "beta"}; round-trips bit-exactly."""
        obj = {"T": self.T, "a0": self.a0,
               "alpha": self.alpha.tolist(), "beta": self.beta.tolist()}
        if extra:
            obj.update(extra)
        return json.dumps(obj, indent=2)

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(a0=obj["a0"], alpha=np.array(obj["alpha"], dtype=float),
                   beta=np.array(obj["beta"], dtype=float), T=obj["T"])


def min_harmonics(n_chips):
    """Smallest harmonic count that can still track inter-chip transitions.

    The fastest phase transition between chips of duration t_b needs a
    harmonic of frequency at least 1/(2 t_b) = N/(2T), hence ceil(N/2).
    """
    n_chips = check_int_at_least("n_chips", n_chips, 1)
    return max(1, (n_chips + 1) // 2)


def fit_fourier(code, T, K):
    """Fit the truncated Fourier series to a piecewise-constant phase.

    Because the input phase is constant on each chip, every coefficient
    integral has an exact per-chip antiderivative; no quadrature is involved.

    Parameters
    ----------
    code : PhaseCode or array_like
        Chip phases in radians; a plain array is treated as one phase value
        per equal-length chip.
    T : float
        Pulse length in seconds.
    K : int
        Harmonic count, K >= 1.

    Returns
    -------
    MtsfmParams
    """
    phases = code.phases if isinstance(code, PhaseCode) else as_float_vector(code, "code")
    check_positive("T", T)
    K = check_int_at_least("K", K, 1)
    n = phases.size
    # chip edges scaled to angle: 2 pi k edge / T with edge = -T/2 + i*T/n
    k = np.arange(1, K + 1, dtype=float)
    edge_frac = -0.5 + np.arange(n + 1) / n
    ang = 2 * np.pi * np.outer(k, edge_frac)
    cos_e = np.cos(ang)
    sin_e = np.sin(ang)
    inv_pik = 1.0 / (np.pi * k)
    alpha = inv_pik * ((cos_e[:, :-1] - cos_e[:, 1:]) @ phases)
    beta = inv_pik * ((sin_e[:, 1:] - sin_e[:, :-1]) @ phases)
    a0 = 2.0 * float(np.mean(phases))
    return MtsfmParams(a0, alpha, beta, T)


@lru_cache(maxsize=8)
def _harmonic_basis(K, n_samples):
    """Sine/cosine basis matrices on the midpoint grid, cached per (K, L).

    The basis depends only on t/T, so one cache entry serves every T.
    """
    frac = -0.5 + (np.arange(n_samples) + 0.5) / n_samples
    ang = 2 * np.pi * np.outer(frac, np.arange(1, K + 1, dtype=float))
    sin_b = np.sin(ang)
    cos_b = np.cos(ang)
    sin_b.flags.writeable = False
    cos_b.flags.writeable = False
    return sin_b, cos_b


def mtsfm_phase(params, t):
    """Evaluate the Fourier-series phase at time(s) t within the pulse."""
    t_arr = check_in_pulse(t, params.T)
    ang = 2 * np.pi * np.outer(np.atleast_1d(t_arr), np.arange(1, params.K + 1)) / params.T
    out = params.a0 / 2 + np.sin(ang) @ params.alpha + np.cos(ang) @ params.beta
    return out if np.ndim(t) else float(out[0])


def mtsfm_modulation(params, t):
    """Instantaneous frequency (Hz) at time(s) t: the exact phase derivative / 2 pi."""
    t_arr = check_in_pulse(t, params.T)
    k = np.arange(1, params.K + 1, dtype=float)
    ang = 2 * np.pi * np.outer(np.atleast_1d(t_arr), k) / params.T
    out = (np.cos(ang) @ (k * params.alpha) - np.sin(ang) @ (k * params.beta)) / params.T
    return out if np.ndim(t) else float(out[0])


def min_samples(K):
    """Synthesis sample-count floor: 2x oversampling of the highest phase harmonic."""
    return 4 * K


def synthesize_mtsfm(params, n_samples):
    """Synthesize the unit-energy constant-modulus waveform at the given density.

    Rejects sample counts below 4K, which would undersample the highest
    phase harmonic.
    """
    n_samples = check_int_at_least("n_samples", n_samples, 2)
    floor = min_samples(params.K)
    if n_samples < floor:
        raise ValueError(
            f"n_samples={n_samples} too small for K={params.K} harmonics; need >= {floor}")
    sin_b, cos_b = _harmonic_basis(params.K, n_samples)
    phi = params.a0 / 2 + sin_b @ params.alpha + cos_b @ params.beta
    samples = np.exp(1j * phi) / math.sqrt(params.T)
    return SampledWaveform(samples, params.T, n_samples / params.T)


def closed_form_rms_bandwidth(params):
    """Squared RMS bandwidth in (rad/s)^2, exactly from the coefficients:

        (2 pi / T)^2 * sum_k k^2 (alpha_k^2 + beta_k^2) / 2.

    No sampling is involved; a0 does not enter.
    """
    k = np.arange(1, params.K + 1, dtype=float)
    return float((2 * np.pi / params.T) ** 2
                 * np.sum(k ** 2 * (params.alpha ** 2 + params.beta ** 2)) / 2)


def closed_form_rms_bandwidth_gradient(params):
    """Exact gradient of the squared RMS bandwidth over the 2K coefficients."""
    k = np.arange(1, params.K + 1, dtype=float)
    scale = (2 * np.pi / params.T) ** 2
    return scale * np.concatenate([k ** 2 * params.alpha, k ** 2 * params.beta])
