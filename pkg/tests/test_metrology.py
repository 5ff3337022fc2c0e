"""Allan deviation, linewidth, fringe inversion, spectra, excursions, images."""
import math

import numpy as np
import pytest

from cryoion.errors import ClippingError, DomainError, InsufficientDataError
from cryoion.fitting import lorentzian_model
from cryoion.metrology import (
    AXIS_COLUMN,
    AXIS_ROW,
    FrequencyRecord,
    ImageProfile,
    InterferometerCal,
    KIND_FRACTIONAL,
    KIND_PHASE,
    WINDOW_RECT,
    allan_deviation,
    excursion_stats,
    fringe_to_displacement,
    gaussian_profile_fit,
    lorentzian_linewidth_fit,
    peak_find,
    power_spectrum,
)
from cryoion.series import TimeSeries, seeded_rng


# ---------------------------------------------------------------------------
# Allan deviation
# ---------------------------------------------------------------------------


def test_allan_alternating_frequency_is_sqrt2():
    # y = +a, -a, +a, ... has sigma_y(tau0) = sqrt(2)*a exactly
    a = 3e-13
    y = a * (-1.0) ** np.arange(2000)
    rec = FrequencyRecord(KIND_FRACTIONAL, TimeSeries(0.0, 0.5, y))
    _, sigma = allan_deviation(rec, [0.5])
    assert sigma[0] == pytest.approx(math.sqrt(2.0) * a, rel=1e-12)


def test_allan_constant_frequency_is_zero():
    rec = FrequencyRecord(KIND_FRACTIONAL, TimeSeries(0.0, 1.0, np.full(1000, 4e-14)))
    _, sigma = allan_deviation(rec, [1.0, 2.0, 5.0])
    assert np.all(sigma < 1e-25)


def test_allan_white_fm_level_and_slope():
    dt, sig0 = 0.01, 2e-15
    y = sig0 * seeded_rng(99).standard_normal(40000)
    rec = FrequencyRecord(KIND_FRACTIONAL, TimeSeries(0.0, dt, y))
    taus = dt * np.array([1.0, 2.0, 4.0, 8.0, 16.0, 32.0])
    _, sigma = allan_deviation(rec, taus)
    # sigma_y(tau) = sig0*sqrt(dt/tau): -1/2 log-log slope at the sample level
    slope = np.polyfit(np.log10(taus), np.log10(sigma), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.05)
    assert sigma[0] == pytest.approx(sig0, rel=0.05)


def test_allan_accepts_equivalent_phase_record():
    dt = 0.01
    y = 1e-15 * seeded_rng(5).standard_normal(5000)
    from_freq = FrequencyRecord(KIND_FRACTIONAL, TimeSeries(0.0, dt, y))
    x = np.concatenate(([0.0], np.cumsum(y) * dt))
    from_phase = FrequencyRecord(KIND_PHASE, TimeSeries(0.0, dt, x))
    taus = dt * np.array([1.0, 4.0, 16.0])
    _, s1 = allan_deviation(from_freq, taus)
    _, s2 = allan_deviation(from_phase, taus)
    assert np.array_equal(s1, s2)


def test_allan_tau_validation():
    rec = FrequencyRecord(KIND_FRACTIONAL, TimeSeries(0.0, 0.01, np.zeros(100) + 1e-15))
    with pytest.raises(DomainError):
        allan_deviation(rec, [0.015])  # not a multiple of dt
    with pytest.raises(DomainError):
        allan_deviation(rec, [0.0])
    with pytest.raises(InsufficientDataError):
        allan_deviation(rec, [0.6])  # needs 2m+1 = 121 phase samples, have 101


def test_frequency_record_validation():
    ts = TimeSeries(0.0, 1.0, np.zeros(10) + 1e-15)
    with pytest.raises(DomainError):
        FrequencyRecord("wavelength", ts)
    with pytest.raises(DomainError):
        FrequencyRecord(KIND_FRACTIONAL, ts, nominal_frequency_hz=0.0)


# ---------------------------------------------------------------------------
# beat-note linewidth
# ---------------------------------------------------------------------------


def test_linewidth_noise_free_round_trip():
    f = np.linspace(100.0, 200.0, 60)
    power = lorentzian_model(f, [2.0, 180.0, 1.58, 0.01])
    fit = lorentzian_linewidth_fit(f, power)
    assert not fit.unconstrained
    assert fit.center_hz == pytest.approx(180.0, rel=1e-9)
    assert fit.fwhm_hz == pytest.approx(1.58, rel=1e-6)


def test_linewidth_flat_spectrum_flagged():
    f = np.linspace(100.0, 200.0, 60)
    fit = lorentzian_linewidth_fit(f, np.full(f.size, 0.5))
    assert fit.unconstrained


def test_linewidth_needs_five_points():
    with pytest.raises(InsufficientDataError):
        lorentzian_linewidth_fit([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 2.0, 1.0])


# ---------------------------------------------------------------------------
# fringe inversion
# ---------------------------------------------------------------------------


def test_fringe_round_trip_within_a_fringe():
    lam = 633e-9
    cal = InterferometerCal(wavelength=lam, volts_per_fringe=2.0, quadrature_offset=0.3)
    t = np.arange(4000) / 2000.0
    x_true = 40e-9 * np.sin(2.0 * np.pi * 37.0 * t)  # well inside lambda/8
    v = 2.0 * np.sin(4.0 * np.pi * x_true / lam) + 0.3
    inv = fringe_to_displacement(TimeSeries(0.0, 1 / 2000.0, v), cal)
    assert inv.clipped_fraction == 0.0
    assert not inv.clipped.any()
    assert np.allclose(inv.displacement.samples, x_true, atol=1e-15)


def test_fringe_small_signal_is_linear():
    lam = 633e-9
    cal = InterferometerCal(wavelength=lam, volts_per_fringe=1.5)
    x_true = np.linspace(-2e-9, 2e-9, 101)  # lambda/300 regime
    v = 1.5 * np.sin(4.0 * np.pi * x_true / lam)
    inv = fringe_to_displacement(TimeSeries(0.0, 1.0, v), cal)
    assert np.allclose(inv.displacement.samples, x_true, atol=1e-12 * 2e-9 + 1e-18)


def test_fringe_clipping_flagged_then_fatal():
    cal = InterferometerCal(wavelength=633e-9, volts_per_fringe=1.0)
    v = np.zeros(1000)
    v[:5] = 1.2  # 0.5 % of samples beyond the fringe
    inv = fringe_to_displacement(TimeSeries(0.0, 1.0, v), cal)
    assert inv.clipped_fraction == pytest.approx(0.005)
    assert inv.clipped.sum() == 5
    # clamped to the quarter-wavelength inversion bound
    assert inv.displacement.samples[0] == pytest.approx(633e-9 / 8.0, rel=1e-12)
    v[:50] = 1.2  # 5 % clipped: beyond the default 1 % tolerance
    with pytest.raises(ClippingError):
        fringe_to_displacement(TimeSeries(0.0, 1.0, v), cal)


def test_interferometer_cal_validation():
    with pytest.raises(DomainError):
        InterferometerCal(wavelength=0.0, volts_per_fringe=1.0)
    with pytest.raises(DomainError):
        InterferometerCal(wavelength=633e-9, volts_per_fringe=-1.0)


# ---------------------------------------------------------------------------
# power spectrum and peaks
# ---------------------------------------------------------------------------


def test_power_spectrum_parseval_rect():
    x = seeded_rng(3).standard_normal(1024)
    ts = TimeSeries(0.0, 1 / 500.0, x)
    freqs, psd = power_spectrum(ts, window=WINDOW_RECT)
    df = freqs[1] - freqs[0]
    assert psd.sum() * df == pytest.approx(x.var(), rel=1e-12)
    assert freqs[0] == 0.0
    assert freqs[-1] == pytest.approx(250.0)


def test_power_spectrum_hann_preserves_variance_approximately():
    x = seeded_rng(17).standard_normal(4096)
    ts = TimeSeries(0.0, 1 / 500.0, x)
    freqs, psd = power_spectrum(ts)
    df = freqs[1] - freqs[0]
    # windowing scatters power between bins but the normalization keeps the
    # total close for broadband input
    assert psd.sum() * df == pytest.approx(x.var(), rel=0.1)


def test_power_spectrum_sine_lands_in_its_bin():
    n, fs, k = 2048, 2000.0, 120
    f0 = k * fs / n
    t = np.arange(n) / fs
    ts = TimeSeries(0.0, 1 / fs, 5e-9 * np.sin(2 * np.pi * f0 * t + 0.7))
    freqs, psd = power_spectrum(ts, window=WINDOW_RECT)
    assert psd[k] / psd.sum() > 0.99
    assert freqs[np.argmax(psd)] == pytest.approx(f0, rel=1e-12)


def test_power_spectrum_guards():
    with pytest.raises(InsufficientDataError):
        power_spectrum(TimeSeries(0.0, 1.0, np.zeros(8)))
    with pytest.raises(DomainError):
        power_spectrum(TimeSeries(0.0, 1.0, np.zeros(32)), window="kaiser")


def test_peak_find_three_tones():
    fs = 2000.0
    t = np.arange(4000) / fs
    x = (8e-9 * np.sin(2 * np.pi * 30.0 * t) + 7e-9 * np.sin(2 * np.pi * 45.0 * t)
         + 3e-9 * np.sin(2 * np.pi * 95.0 * t))
    freqs, psd = power_spectrum(TimeSeries(0.0, 1 / fs, x))
    peaks = peak_find(freqs, psd, count=3, min_separation=5.0)
    assert sorted(peaks) == pytest.approx([30.0, 45.0, 95.0], abs=0.5)
    # descending power order
    assert peaks[0] == pytest.approx(30.0, abs=0.5)
    assert peaks[2] == pytest.approx(95.0, abs=0.5)


def test_peak_find_respects_separation_and_endpoints():
    f = np.arange(10.0)
    p = np.array([5.0, 1.0, 4.0, 1.0, 3.5, 1.0, 0.5, 0.2, 0.1, 9.0])
    # endpoints (5.0 and 9.0) are not strict interior maxima
    peaks = peak_find(f, p, count=5, min_separation=0.0)
    assert list(peaks) == [2.0, 4.0]
    # min_separation suppresses the nearby weaker peak
    peaks = peak_find(f, p, count=5, min_separation=3.0)
    assert list(peaks) == [2.0]


# ---------------------------------------------------------------------------
# excursion statistics
# ---------------------------------------------------------------------------


def test_excursions_constant_record():
    ts = TimeSeries(0.0, 0.001, np.full(3000, 2.2e-9))
    ex = excursion_stats(ts, 0.05)
    assert ex.max_abs == 0.0
    assert ex.peak_to_peak == 0.0
    assert ex.drift == 0.0


def test_excursions_linear_ramp():
    n, dt, slope = 2001, 0.001, 100e-9
    ts = TimeSeries(0.0, dt, slope * dt * np.arange(n))
    ex = excursion_stats(ts, 0.05)
    m = round(0.05 / dt)
    assert ex.max_abs == pytest.approx(slope * (m - 1) * dt / 2.0, rel=1e-9)
    assert ex.peak_to_peak == pytest.approx(slope * (n - 1) * dt, rel=1e-12)
    assert ex.drift == pytest.approx(slope * (n - 1) * dt, rel=1e-12)


def test_excursions_sine_band():
    fs, amp = 2000.0, 20e-9
    t = np.arange(8001) / fs  # ends on an exact 30 Hz period boundary
    ts = TimeSeries(0.0, 1 / fs, amp * np.sin(2 * np.pi * 30.0 * t))
    ex = excursion_stats(ts, 1.0)  # windows cover many periods
    assert ex.max_abs == pytest.approx(amp, rel=1e-3)
    assert ex.peak_to_peak == pytest.approx(2 * amp, rel=1e-3)
    assert abs(ex.drift) < 1e-18


def test_excursions_window_guards():
    ts = TimeSeries(0.0, 0.001, np.zeros(100))
    with pytest.raises(DomainError):
        excursion_stats(ts, 0.0)
    with pytest.raises(DomainError):
        excursion_stats(ts, -1.0)
    with pytest.raises(DomainError):
        excursion_stats(ts, 0.2)  # longer than the record
    # exactly the record length is allowed
    ex = excursion_stats(ts, 0.099)
    assert ex.window_s == 0.099


# ---------------------------------------------------------------------------
# ion images
# ---------------------------------------------------------------------------


def make_profile(sigma_m, pitch=16e-6, mag=15.0, n=33, amp=1000.0, offset=50.0):
    scale = pitch / mag
    px = np.arange(n, dtype=float)
    counts = offset + amp * np.exp(-0.5 * ((px - n // 2) * scale / sigma_m) ** 2)
    return ImageProfile(counts, pixel_pitch=pitch, magnification=mag)


def test_image_fit_noise_free_round_trip():
    profile = make_profile(1.84e-6)
    fit = gaussian_profile_fit(profile)
    assert not fit.unconstrained
    assert fit.width_m == pytest.approx(1.84e-6, rel=1e-6)
    assert fit.center_m == pytest.approx(16 * 16e-6 / 15.0, rel=1e-6)
    assert fit.amplitude == pytest.approx(1000.0, rel=1e-6)
    assert fit.offset == pytest.approx(50.0, rel=1e-5)


def test_image_fit_magnification_rescales_width():
    counts = make_profile(1.84e-6).pixel_counts
    doubled = ImageProfile(counts, pixel_pitch=16e-6, magnification=30.0)
    fit = gaussian_profile_fit(doubled)
    assert fit.width_m == pytest.approx(0.92e-6, rel=1e-6)


def test_image_fit_poisson_noise_within_three_sigma():
    profile = make_profile(1.84e-6)
    noisy = seeded_rng(808).poisson(profile.pixel_counts).astype(float)
    fit = gaussian_profile_fit(ImageProfile(noisy))
    sigma_px_err = fit.fit.sigma("sigma")
    scale = 16e-6 / 15.0
    assert abs(fit.width_m - 1.84e-6) < 3.0 * sigma_px_err * scale


def test_image_fit_from_2d_frame():
    profile = make_profile(1.84e-6)
    row = profile.pixel_counts
    frame = np.outer(row, np.ones(7)) / 7.0
    img = ImageProfile(frame, pixel_pitch=16e-6, magnification=15.0)
    fit_row = gaussian_profile_fit(img, axis=AXIS_ROW)
    assert fit_row.width_m == pytest.approx(1.84e-6, rel=1e-6)
    # the column direction is flat: flagged unconstrained
    fit_col = gaussian_profile_fit(img, axis=AXIS_COLUMN)
    assert fit_col.unconstrained


def test_image_fit_guards():
    with pytest.raises(InsufficientDataError):
        gaussian_profile_fit(ImageProfile(np.array([1.0, 2.0, 3.0, 2.0])))
    with pytest.raises(DomainError):
        ImageProfile(np.zeros((3, 3, 3)))
    frame = ImageProfile(np.outer(make_profile(1.84e-6).pixel_counts, np.ones(5)))
    with pytest.raises(DomainError):
        gaussian_profile_fit(frame, axis="diagonal")
