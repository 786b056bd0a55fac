import dataclasses
import math

import numpy as np
import pytest

from mtsfm_cpm import (DegenerateMainlobe, MtsfmParams, PhaseCode,
                       SampledWaveform, SamplingConfig, acf, ambiguity,
                       barker_code, closed_form_rms_bandwidth, compute_metrics,
                       first_null, gisr, isr, mainlobe_area, psl,
                       rms_bandwidth_spectral, spectral_compactness, spectrum,
                       synthesize_mtsfm, synthesize_pc)
from conftest import MSEQ63_BAND, MSEQ63_T


def rect_pulse(L=1024, T=1.0):
    return SampledWaveform(np.ones(L, dtype=complex) / np.sqrt(T), T, L / T)


# --------------------------------------------------------------------------
# spectrum
# --------------------------------------------------------------------------

def test_spectrum_parseval_and_centroid_for_rect():
    w = rect_pulse()
    sp = spectrum(w, zero_pad_factor=4)
    assert np.sum(sp.psd) * sp.df == pytest.approx(1.0, abs=1e-9)
    assert abs(sp.centroid) < 1e-9
    assert sp.freqs[np.argmax(sp.psd)] == pytest.approx(0.0, abs=sp.df)


@pytest.mark.parametrize("pad", [1, 2, 4, 8])
def test_spectrum_parseval_various(mseq63_pc, pad):
    sp = spectrum(mseq63_pc, zero_pad_factor=pad)
    assert np.sum(sp.psd) * sp.df == pytest.approx(1.0, abs=1e-9)
    assert sp.freqs.size == mseq63_pc.n_samples * pad


def test_spectrum_dc_bin_matches_direct_integral(barker13_wave):
    w = barker13_wave
    sp = spectrum(w, zero_pad_factor=4)
    # direct evaluation of the Fourier integral at f = 0
    oracle = abs(np.sum(w.samples) / w.sample_rate) ** 2
    dc = sp.psd[np.argmin(np.abs(sp.freqs))]
    assert dc == pytest.approx(oracle, rel=1e-12)
    # closed form: chips sum coherently at DC
    signs_sum = np.sum(np.exp(1j * barker_code(13).phases))
    tb = w.T / 13
    assert dc == pytest.approx(abs(signs_sum) ** 2 * tb ** 2 / w.T, rel=1e-12)


def test_spectrum_rect_is_sinc_squared():
    w = rect_pulse(L=512, T=2.0)
    sp = spectrum(w, zero_pad_factor=8)
    inner = np.abs(sp.freqs) < 20 / w.T
    expected = w.T * np.sinc(sp.freqs[inner] * w.T) ** 2
    assert np.max(np.abs(sp.psd[inner] - expected)) < 1e-3 * w.T


# --------------------------------------------------------------------------
# spectral compactness
# --------------------------------------------------------------------------

def test_sc_full_span_captures_everything(mseq63_pc):
    sp = spectrum(mseq63_pc)
    full = spectral_compactness(sp, 2 * sp.freqs[-1])
    assert full > 0.999


def test_sc_monotone_in_band(mseq63_pc):
    sp = spectrum(mseq63_pc)
    widths = np.linspace(0.2, 30.0, 25)
    values = [spectral_compactness(sp, w) for w in widths]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_sc_clamps_with_warning(mseq63_pc):
    sp = spectrum(mseq63_pc)
    with pytest.warns(RuntimeWarning, match="clamp"):
        val = spectral_compactness(sp, 1e9)
    assert 0.999 < val <= 1.0


def test_sc_rejects_nonpositive_band(mseq63_pc):
    with pytest.raises(ValueError):
        spectral_compactness(spectrum(mseq63_pc), 0.0)


# --------------------------------------------------------------------------
# acf
# --------------------------------------------------------------------------

def test_acf_triangle_for_rect():
    w = rect_pulse(L=1024, T=1.0)
    a = acf(w)
    triangle = 1 - np.abs(a.lags) / w.T
    assert np.max(np.abs(a.magnitudes - triangle)) < 1e-6
    assert a.degenerate


def test_acf_peak_and_symmetry(mseq63_pc, barker13_wave):
    for w in (mseq63_pc, barker13_wave):
        a = acf(w)
        center = a.lags.size // 2
        assert a.lags[center] == 0.0
        assert abs(a.magnitudes[center] - 1.0) < 1e-9
        assert np.max(np.abs(a.magnitudes - a.magnitudes[::-1])) < 1e-9
        assert a.lags[0] == -w.T and a.lags[-1] == w.T


def direct_acf(w):
    """O(L^2) time-domain correlation oracle: r[m] = sum_n s[n+m] conj(s[n]) / f_s."""
    s = w.samples
    L = s.size
    out = np.zeros(2 * L + 1, dtype=complex)
    for m in range(-(L - 1), L):
        if m >= 0:
            out[m + L] = np.sum(s[m:] * np.conj(s[: L - m]))
        else:
            out[m + L] = np.sum(s[: L + m] * np.conj(s[-m:]))
    return out / w.sample_rate


@pytest.mark.parametrize("build", [
    lambda: synthesize_pc(barker_code(13), SamplingConfig(13.0)),
    lambda: synthesize_pc(
        PhaseCode(np.random.default_rng(42).uniform(-np.pi, np.pi, 32)),
        SamplingConfig(32.0, samples_per_chip=16)),
])
def test_acf_matches_direct_correlation(build):
    w = build()
    assert w.n_samples <= 4096
    a = acf(w)
    assert np.max(np.abs(a.values - direct_acf(w))) < 1e-9


def test_acf_mseq_matches_direct(mseq63_pc):
    a = acf(mseq63_pc)
    assert np.max(np.abs(a.values - direct_acf(mseq63_pc))) < 1e-9


# --------------------------------------------------------------------------
# ambiguity
# --------------------------------------------------------------------------

def test_ambiguity_zero_doppler_row_is_acf(barker13_wave):
    rows = ambiguity(barker13_wave, [0.0])
    a = acf(barker13_wave)
    assert np.array_equal(rows[0], a.values)
    center = rows.shape[1] // 2
    assert abs(rows[0][center] - 1.0) < 1e-9


def test_ambiguity_volume_is_unity():
    w = rect_pulse(L=256, T=1.0)
    nus = np.linspace(-16.0, 16.0, 257)
    rows = ambiguity(w, nus)
    dtau = 1.0 / w.sample_rate
    dnu = nus[1] - nus[0]
    volume = np.sum(np.abs(rows) ** 2) * dtau * dnu
    assert volume == pytest.approx(1.0, abs=0.02)


def test_ambiguity_rejects_nonfinite_grid(barker13_wave):
    with pytest.raises(ValueError):
        ambiguity(barker13_wave, [0.0, np.inf])


# --------------------------------------------------------------------------
# first null and mainlobe
# --------------------------------------------------------------------------

def test_first_null_degenerate_for_rect():
    a = acf(rect_pulse())
    res = first_null(a)
    assert res.degenerate and res.tau == a.lags[-1]


def test_first_null_near_chip_for_pc(mseq63_pc, barker13_wave):
    tb = MSEQ63_T / 63
    assert acf(mseq63_pc).first_null == pytest.approx(tb, rel=0.15)
    assert acf(barker13_wave).first_null == pytest.approx(1.0, rel=0.15)


def test_mainlobe_area_triangle_with_forced_null():
    w = rect_pulse(L=2048, T=1.0)
    a = dataclasses.replace(acf(w), first_null=w.T, degenerate=False)
    assert mainlobe_area(a) == pytest.approx(2 * w.T / 3, abs=1e-6)


def test_mainlobe_area_matches_quadrature_oracle(barker13_wave):
    a = acf(barker13_wave)
    area = mainlobe_area(a)
    # independent trapezoid: every native node inside the band plus the edges
    dtau = a.first_null
    inner = a.lags[(a.lags > -dtau) & (a.lags < dtau)]
    grid = np.concatenate([[-dtau], inner, [dtau]])
    oracle = np.trapezoid(np.interp(grid, a.lags, a.magnitudes ** 2), grid)
    assert area == pytest.approx(oracle, abs=1e-9)


def test_mainlobe_area_tracks_rms_bandwidth(mseq63_fit32):
    w = synthesize_mtsfm(mseq63_fit32, 2016)
    a = acf(w)
    beta_rms = math.sqrt(closed_form_rms_bandwidth(mseq63_fit32))
    assert mainlobe_area(a) == pytest.approx(np.pi / (2 * beta_rms), rel=0.30)


def test_degenerate_errors():
    a = acf(rect_pulse())
    for fn in (mainlobe_area, psl, isr):
        with pytest.raises(DegenerateMainlobe):
            fn(a)


# --------------------------------------------------------------------------
# rms bandwidth (spectral path)
# --------------------------------------------------------------------------

def test_rms_bandwidth_single_tone_matches_closed_form():
    params = MtsfmParams(0.0, np.array([1.0]), np.array([0.0]), 1.0)
    w = synthesize_mtsfm(params, 512)
    got = rms_bandwidth_spectral(spectrum(w, zero_pad_factor=1))
    want = math.sqrt(closed_form_rms_bandwidth(params))
    assert got == pytest.approx(want, rel=0.02)


def test_rms_bandwidth_is_centroid_relative():
    params = MtsfmParams(0.0, np.array([1.0]), np.array([0.0]), 1.0)
    w = synthesize_mtsfm(params, 512)
    sp = spectrum(w, zero_pad_factor=1)
    # shift by an exact number of bins: same spread about a moved centroid
    shift = 5.0 / w.T
    shifted = SampledWaveform(w.samples * np.exp(2j * np.pi * shift * w.times),
                              w.T, w.sample_rate)
    sp2 = spectrum(shifted, zero_pad_factor=1)
    assert sp2.centroid == pytest.approx(sp.centroid + shift, abs=1e-9)
    assert rms_bandwidth_spectral(sp2) == pytest.approx(
        rms_bandwidth_spectral(sp), rel=1e-9)


# --------------------------------------------------------------------------
# sidelobe ratios
# --------------------------------------------------------------------------

def test_barker13_psl(barker13_wave):
    assert psl(acf(barker13_wave)) == pytest.approx(20 * math.log10(1 / 13), abs=0.1)


def test_isr_triangle_with_forced_null():
    w = rect_pulse(L=4096, T=1.0)
    a = dataclasses.replace(acf(w), first_null=0.5, degenerate=False)
    assert isr(a) == pytest.approx(10 * math.log10(1 / 7), abs=1e-3)


def test_gisr_p2_is_isr(mseq63_pc, barker13_wave):
    for w in (mseq63_pc, barker13_wave):
        a = acf(w)
        assert gisr(a, 2) == isr(a)


def test_gisr_approaches_psl(barker13_wave):
    a = acf(barker13_wave)
    assert gisr(a, 64) == pytest.approx(psl(a), abs=1.5)


def test_gisr_nonincreasing_in_p(mseq63_pc, barker13_wave):
    for w in (mseq63_pc, barker13_wave):
        a = acf(w)
        values = [gisr(a, p) for p in (2, 4, 10, 64)]
        assert all(b <= a_ + 1e-12 for a_, b in zip(values, values[1:]))


def test_gisr_scale_invariant(barker13_wave):
    a = acf(barker13_wave)
    scaled = dataclasses.replace(a, values=0.5 * a.values)
    assert gisr(scaled, 10) == pytest.approx(gisr(a, 10), abs=1e-12)


def test_gisr_rejects_small_p(barker13_wave):
    with pytest.raises(ValueError):
        gisr(acf(barker13_wave), 1)


# --------------------------------------------------------------------------
# report
# --------------------------------------------------------------------------

def test_compute_metrics_regular(mseq63_pc):
    rep = compute_metrics(mseq63_pc, MSEQ63_BAND)
    assert not rep.degenerate
    assert 0 <= rep.sc <= 1
    assert rep.psl_db < 0
    assert rep.gisr_db is not None and rep.p == 10
    assert '"psl_db"' in rep.to_json() and '"sc_fraction"' in rep.to_json()


def test_compute_metrics_degenerate():
    rep = compute_metrics(rect_pulse(), 8.0)
    assert rep.degenerate
    assert rep.psl_db is None and rep.isr_db is None and rep.gisr_db is None
    assert rep.sc > 0.9


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_random_code_invariants(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 40))
    code = PhaseCode(rng.uniform(-np.pi, np.pi, n))
    w = synthesize_pc(code, SamplingConfig(float(n), samples_per_chip=16))
    assert abs(w.energy - 1.0) <= 1e-12
    sp = spectrum(w)
    assert np.sum(sp.psd) * sp.df == pytest.approx(1.0, abs=1e-9)
    a = acf(w)
    assert np.max(np.abs(a.magnitudes - a.magnitudes[::-1])) <= 1e-9
    assert abs(a.magnitudes[a.lags.size // 2] - 1.0) <= 1e-9
    assert 0.0 <= spectral_compactness(sp, 2.0) <= 1.0
    if not a.degenerate:
        assert gisr(a, 2) == isr(a)
        assert psl(a) <= 1e-9


def test_metrics_invariant_under_time_reversal(mseq63_pc):
    rep = compute_metrics(mseq63_pc, MSEQ63_BAND)
    reversed_w = SampledWaveform(mseq63_pc.samples[::-1], mseq63_pc.T,
                                 mseq63_pc.sample_rate)
    rep_r = compute_metrics(reversed_w, MSEQ63_BAND)
    assert rep_r.sc == pytest.approx(rep.sc, abs=1e-9)
    assert rep_r.psl_db == pytest.approx(rep.psl_db, abs=1e-9)
    assert rep_r.isr_db == pytest.approx(rep.isr_db, abs=1e-9)
    assert rep_r.beta_rms == pytest.approx(rep.beta_rms, rel=1e-9)
