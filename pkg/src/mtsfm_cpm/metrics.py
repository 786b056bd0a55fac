"""Waveform quality metrics: spectrum, band energy fraction, autocorrelation,
ambiguity surface, mainlobe geometry, RMS bandwidth, and the sidelobe ratios
(PSL, ISR, and the p-norm generalization of ISR).

Conventions: PSL is 20*log10 of a magnitude ratio; ISR and its p-norm
generalization are 10*log10 of energy ratios.
"""

import json
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._validation import check_int_at_least, check_positive
from .waveform import time_grid

__all__ = [
    "DegenerateMainlobe",
    "Spectrum",
    "AcfResult",
    "FirstNull",
    "MetricsReport",
    "spectrum",
    "spectral_compactness",
    "acf",
    "ambiguity",
    "first_null",
    "mainlobe_area",
    "rms_bandwidth_spectral",
    "psl",
    "isr",
    "gisr",
    "compute_metrics",
    "spectrum_csv",
    "acf_csv",
]


class DegenerateMainlobe(ValueError):
    """Raised when a metric needs an ACF null but the ACF has none."""


def _next_pow2(n):
    return 1 << (int(n) - 1).bit_length()


def _band_integral(x, y, lo, hi):
    """Trapezoidal integral of y(x) over [lo, hi], interpolating at the edges.

    x must be increasing and uniform enough for np.interp; the band is
    clamped to the span of x.
    """
    lo = max(lo, float(x[0]))
    hi = min(hi, float(x[-1]))
    if hi <= lo:
        return 0.0
    inside = (x > lo) & (x < hi)
    xx = np.concatenate([[lo], x[inside], [hi]])
    yy = np.concatenate([[np.interp(lo, x, y)], y[inside], [np.interp(hi, x, y)]])
    return float(np.trapezoid(yy, xx))


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    """DC-centered energy spectral density with unit total energy."""

    freqs: np.ndarray
    psd: np.ndarray
    centroid: float

    def __post_init__(self):
        for name in ("freqs", "psd"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def df(self):
        return float(self.freqs[1] - self.freqs[0])


def spectrum(w, zero_pad_factor=4):
    """Discrete spectrum of the zero-padded samples, scaled so sum(psd)*df = 1.

    The frequency axis has length n_samples * zero_pad_factor. With
    zero_pad_factor=1 the grid coincides with the waveform's harmonic lines
    k/T, which suppresses pulse-edge leakage in moment computations; larger
    factors resolve the continuous spectral envelope between lines.
    """
    zero_pad_factor = check_int_at_least("zero_pad_factor", zero_pad_factor, 1)
    n_fft = w.n_samples * zero_pad_factor
    x = np.fft.fft(w.samples, n_fft) / w.sample_rate
    psd = np.fft.fftshift(np.abs(x) ** 2)
    freqs = np.fft.fftshift(np.fft.fftfreq(n_fft, d=1.0 / w.sample_rate))
    centroid = float(np.sum(freqs * psd) / np.sum(psd))
    return Spectrum(freqs, psd, centroid)


def spectral_compactness(sp, delta_f):
    """Fraction of waveform energy inside the centered band of width delta_f.

    Trapezoidal sum with linear interpolation at the band edges. A band wider
    than the analysis span is clamped to it with a warning.
    """
    check_positive("delta_f", delta_f)
    span = 2 * float(sp.freqs[-1])
    if delta_f > span:
        warnings.warn(
            f"delta_f={delta_f} exceeds the analysis span {span}; clamping",
            RuntimeWarning, stacklevel=2)
        delta_f = span
    frac = _band_integral(sp.freqs, sp.psd, -delta_f / 2, delta_f / 2)
    return min(max(frac, 0.0), 1.0)


def rms_bandwidth_spectral(sp):
    """RMS bandwidth in rad/s: second spectral moment about the centroid.

    For waveforms with discontinuities (pulse edges, phase-coded chips) this
    value grows with the analysis span; it is reported at the spectrum's own
    span. For coefficient-level agreement with the closed form of
    the Fourier-phase model, compute the spectrum with zero_pad_factor=1 so
    the grid sits on the harmonic lines.
    """
    df = sp.df
    second = float(np.sum((sp.freqs - sp.centroid) ** 2 * sp.psd) * df)
    return 2 * np.pi * math.sqrt(max(second, 0.0))


# ---------------------------------------------------------------------------
# autocorrelation and ambiguity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AcfResult:
    """Aperiodic autocorrelation over lags [-T, T], normalized so R(0) = 1."""

    lags: np.ndarray
    values: np.ndarray
    first_null: float
    degenerate: bool

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        lags.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "values", values)

    @property
    def magnitudes(self):
        return np.abs(self.values)


class FirstNull(NamedTuple):
    tau: float
    degenerate: bool


def _cross_correlation(u, v, sample_rate, n_fft):
    """Lag-domain cross correlation sum_n u[n+m] conj(v[n]) / f_s, lags -(L-1)..(L-1),
    with exact zeros appended at lags -L and +L."""
    L = u.size
    fu = np.fft.fft(u, n_fft)
    fv = np.fft.fft(v, n_fft)
    cc = np.fft.ifft(fu * np.conj(fv)) / sample_rate
    return np.concatenate([[0.0], cc[-(L - 1):], cc[:L], [0.0]])


def acf(w, zero_pad_factor=4):
    """Autocorrelation of a sampled waveform at its native lag spacing 1/f_s.

    Computed by frequency-domain correlation with power-of-two padding of at
    least max(2L, zero_pad_factor*L) samples, which makes the circular
    correlation exactly aperiodic. Unit input energy makes R(0) = 1. For a
    time-limited pulse the symmetric-lag form R(tau) = integral of
    s(t - tau/2) s*(t + tau/2) equals the one-sided-lag correlation computed
    here up to conjugation, so all magnitude-based metrics agree.
    """
    zero_pad_factor = check_int_at_least("zero_pad_factor", zero_pad_factor, 1)
    L = w.n_samples
    n_fft = _next_pow2(max(2 * L, zero_pad_factor * L))
    values = _cross_correlation(w.samples, w.samples, w.sample_rate, n_fft)
    lags = np.concatenate([[-w.T], np.arange(-(L - 1), L) / w.sample_rate, [w.T]])
    tau, degen = _scan_first_null(lags, np.abs(values))
    return AcfResult(lags, values, tau, degen)


def ambiguity(w, doppler_grid):
    """Matched-filter response over (lag, Doppler): one row per Doppler shift.

    Row nu is the cross correlation of s(t) e^{+j pi nu t} with
    s(t) e^{-j pi nu t}, which reduces to the plain autocorrelation at nu = 0
    (same code path, so the nu = 0 row matches acf() bit for bit).
    """
    doppler_grid = np.atleast_1d(np.asarray(doppler_grid, dtype=float))
    if doppler_grid.size and not np.all(np.isfinite(doppler_grid)):
        raise ValueError("doppler_grid must be finite")
    L = w.n_samples
    n_fft = _next_pow2(max(2 * L, 4 * L))
    t = time_grid(L, w.T)
    rows = np.empty((doppler_grid.size, 2 * L + 1), dtype=complex)
    for i, nu in enumerate(doppler_grid):
        kernel = np.exp(1j * np.pi * nu * t)
        rows[i] = _cross_correlation(w.samples * kernel, w.samples / kernel,
                                     w.sample_rate, n_fft)
    return rows


# ---------------------------------------------------------------------------
# mainlobe geometry
# ---------------------------------------------------------------------------

def _scan_first_null(lags, magnitudes):
    """First strict local minimum of |R| for tau > 0, refined parabolically.

    Returns (T, True) when no interior minimum exists, e.g. the pure
    triangle of an unmodulated pulse.
    """
    center = lags.size // 2
    for i in range(center + 1, lags.size - 1):
        y0, y1, y2 = magnitudes[i - 1], magnitudes[i], magnitudes[i + 1]
        if y1 < y0 and y1 < y2:
            denom = y0 - 2 * y1 + y2
            offset = 0.5 * (y0 - y2) / denom if denom > 0 else 0.0
            offset = float(np.clip(offset, -1.0, 1.0))
            return float(lags[i] + offset * (lags[i] - lags[i - 1])), False
    return float(lags[-1]), True


def first_null(a):
    """Locate the first ACF null for tau > 0; degenerate when none exists."""
    tau, degen = _scan_first_null(a.lags, a.magnitudes)
    return FirstNull(tau, degen)


def _require_null(a):
    if a.degenerate:
        raise DegenerateMainlobe(
            "ACF has no interior null; mainlobe/sidelobe metrics are undefined")
    return a.first_null


def mainlobe_area(a):
    """Integral of |R|^2 over the mainlobe [-first_null, +first_null]."""
    dtau = _require_null(a)
    return _band_integral(a.lags, a.magnitudes ** 2, -dtau, dtau)


def psl(a):
    """Peak sidelobe level in dB: largest |R| at lags beyond the first null."""
    dtau = _require_null(a)
    side = a.magnitudes[a.lags >= dtau]
    return 20 * math.log10(float(side.max()))


def gisr(a, p):
    """Sidelobe-to-mainlobe ratio of the p-norm of |R|, in dB.

    10*log10( [int_null^T |R|^p / int_0^null |R|^p]^(2/p) ); p = 2 is the
    standard integrated sidelobe ratio, large p approaches the PSL.
    """
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    dtau = _require_null(a)
    magp = a.magnitudes ** p
    num = _band_integral(a.lags, magp, dtau, float(a.lags[-1]))
    den = _band_integral(a.lags, magp, 0.0, dtau)
    return 10 * math.log10((num / den) ** (2.0 / p))


def isr(a):
    """Integrated sidelobe ratio in dB (the p = 2 case of gisr)."""
    return gisr(a, 2)


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricsReport:
    """Full metric suite for one waveform at a stated band and p."""

    sc: float
    delta_f: float
    beta_rms: float
    degenerate: bool
    delta_tau: float | None
    mainlobe_area: float | None
    psl_db: float | None
    isr_db: float | None
    gisr_db: float | None
    p: int
    sc_clamped: bool = False

    def to_json(self, extra=None):
        obj = {
            "sc_fraction": self.sc,
            "delta_f_hz": self.delta_f,
            "beta_rms_rad_s": self.beta_rms,
            "degenerate": self.degenerate,
            "delta_tau_s": self.delta_tau,
            "mainlobe_area": self.mainlobe_area,
            "psl_db": self.psl_db,
            "isr_db": self.isr_db,
            "gisr_db": self.gisr_db,
            "p": self.p,
            "sc_clamped": self.sc_clamped,
        }
        if extra:
            obj.update(extra)
        return json.dumps(obj, indent=2)


def compute_metrics(w, delta_f, p=10, zero_pad_factor=4):
    """Evaluate the whole metric suite for one waveform.

    A degenerate mainlobe (no ACF null) is reported, not raised: the
    sidelobe fields come back as None with the degenerate flag set.
    """
    sp = spectrum(w, zero_pad_factor)
    span = 2 * float(sp.freqs[-1])
    clamped = delta_f > span
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        sc = spectral_compactness(sp, delta_f)
    beta = rms_bandwidth_spectral(sp)
    a = acf(w, zero_pad_factor)
    if a.degenerate:
        return MetricsReport(sc=sc, delta_f=min(delta_f, span), beta_rms=beta,
                             degenerate=True, delta_tau=None, mainlobe_area=None,
                             psl_db=None, isr_db=None, gisr_db=None, p=p,
                             sc_clamped=clamped)
    return MetricsReport(sc=sc, delta_f=min(delta_f, span), beta_rms=beta,
                         degenerate=False, delta_tau=a.first_null,
                         mainlobe_area=mainlobe_area(a), psl_db=psl(a),
                         isr_db=isr(a), gisr_db=gisr(a, p), p=p,
                         sc_clamped=clamped)


def spectrum_csv(sp):
    """CSV text with header ``f_hz,psd``."""
    lines = ["f_hz,psd"]
    for f, v in zip(sp.freqs.tolist(), sp.psd.tolist()):
        lines.append(f"{f!r},{v!r}")
    return "\n".join(lines) + "\n"


def acf_csv(a):
    """CSV text with header ``tau_s,abs_r,arg_r``."""
    lines = ["tau_s,abs_r,arg_r"]
    for tau, v in zip(a.lags.tolist(), a.values.tolist()):
        lines.append(f"{tau!r},{abs(v)!r},{math.atan2(v.imag, v.real)!r}")
    return "\n".join(lines) + "\n"
