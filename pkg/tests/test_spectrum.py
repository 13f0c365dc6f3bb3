import io
import math

import numpy as np
import pytest

import praglight as pl
from praglight.state import C_LIGHT

from conftest import FSR_RAD_S, reference_mixture

TWO_PI = 2 * math.pi


def sample_mixture(mixture, lo_thz=215.0, hi_thz=275.0, n=2400, unit_tag="arbitrary"):
    omega = np.linspace(pl.thz_to_rad_s(lo_thz), pl.thz_to_rad_s(hi_thz), n)
    return pl.OpticalSpectrum(omega, mixture(omega), unit_tag)


# ---------------------------------------------------------------- loading


def test_load_two_row_hz_csv():
    spec = pl.load_spectrum(io.StringIO("242e12,1.0\n243e12,2.0\n"), "hz")
    assert np.allclose(spec.omega, TWO_PI * np.array([242e12, 243e12]))
    assert np.allclose(spec.density, [1.0, 2.0])


def test_load_wavelength_axis_converts_to_central_frequency():
    text = "1237,1.0\n1236,1.0\n1235,1.0\n"
    spec = pl.load_spectrum(io.StringIO(text), "nm")
    center = TWO_PI * C_LIGHT / 1236e-9
    assert abs(spec.omega[1] - center) < 1e-9 * center
    assert spec.omega[1] == pytest.approx(pl.thz_to_rad_s(242.6), rel=3e-4)


def test_load_wavelength_jacobian_preserves_band_power():
    # equal-power band: integral over lambda must equal integral over omega
    lam = np.linspace(1100.0, 1400.0, 4001)
    dens_lam = 1.0 + 0.5 * np.sin(lam / 40.0)
    text = "\n".join(f"{l},{d}" for l, d in zip(lam, dens_lam))
    spec = pl.load_spectrum(io.StringIO(text), "nm")
    power_lambda = np.trapezoid(dens_lam, lam * 1e-9)
    assert spec.total == pytest.approx(power_lambda, rel=1e-6)


def test_load_skips_comments_and_header():
    text = "# comment line\nfreq_thz density\n242.0 1.0\n243.0, 2.0\n"
    spec = pl.load_spectrum(io.StringIO(text), "THz")
    assert spec.omega.size == 2


def test_load_rejects_negative_density():
    with pytest.raises(ValueError):
        pl.load_spectrum(io.StringIO("242e12,1.0\n243e12,-2.0\n"), "hz")


def test_load_rejects_malformed_row():
    with pytest.raises(ValueError, match="malformed"):
        pl.load_spectrum(io.StringIO("242e12,1.0\nnot,numbers\n"), "hz")


def test_load_rejects_duplicate_abscissae():
    with pytest.raises(ValueError, match="duplicate"):
        pl.load_spectrum(io.StringIO("242e12,1.0\n242e12,2.0\n243e12,1.0\n"), "hz")


def test_load_rejects_unknown_units():
    with pytest.raises(ValueError):
        pl.load_spectrum(io.StringIO("1,1\n2,2\n"), "furlongs")


# ---------------------------------------------------------------- fitting


def test_fit_recovers_reference_parameters_exactly():
    mixture = reference_mixture()
    spec = sample_mixture(mixture)
    result = pl.fit_gaussian_mixture(spec, 3)
    assert result.converged
    # components sorted by descending amplitude match the generator to 0.1%
    truth = sorted(mixture.components, key=lambda c: -c.amplitude)
    for got, want in zip(result.mixture.components, truth):
        assert got.amplitude == pytest.approx(want.amplitude, rel=1e-3)
        assert got.center == pytest.approx(want.center, rel=1e-3)
        assert got.sigma == pytest.approx(want.sigma, rel=1e-3)
    assert result.residual_rms < 1e-9 * max(c.amplitude for c in truth)


def test_fit_single_gaussian_exact():
    mixture = pl.GaussianMixture((pl.GaussianComponent(2.0, 5.0e14, 3.0e12),))
    omega = np.linspace(4.8e14, 5.2e14, 400)
    result = pl.fit_gaussian_mixture(pl.OpticalSpectrum(omega, mixture(omega)), 1)
    comp = result.mixture.components[0]
    assert comp.amplitude == pytest.approx(2.0, rel=1e-9)
    assert comp.center == pytest.approx(5.0e14, rel=1e-12)
    assert comp.sigma == pytest.approx(3.0e12, rel=1e-9)


def test_fit_with_noise_recovers_within_five_percent():
    mixture = reference_mixture()
    omega = np.linspace(pl.thz_to_rad_s(220), pl.thz_to_rad_s(268), 1600)
    clean = mixture(omega)
    rng = np.random.default_rng(17)
    noise_level = 0.01 * clean.max()
    noisy = np.clip(clean + rng.normal(0.0, noise_level, omega.size), 0.0, None)
    result = pl.fit_gaussian_mixture(pl.OpticalSpectrum(omega, noisy), 3)
    truth = sorted(mixture.components, key=lambda c: -c.amplitude)
    for got, want in zip(result.mixture.components, truth):
        assert got.amplitude == pytest.approx(want.amplitude, rel=0.05)
        assert got.center == pytest.approx(want.center, rel=0.05)
        assert got.sigma == pytest.approx(want.sigma, rel=0.05)
    assert result.residual_rms == pytest.approx(noise_level, rel=0.3)


def test_fit_refit_is_idempotent():
    spec = sample_mixture(reference_mixture())
    first = pl.fit_gaussian_mixture(spec, 3)
    resampled = pl.OpticalSpectrum(spec.omega, first.mixture(spec.omega))
    second = pl.fit_gaussian_mixture(resampled, 3, init=first.mixture)
    for a, b in zip(first.mixture.components, second.mixture.components):
        assert b.amplitude == pytest.approx(a.amplitude, rel=1e-6)
        assert b.center == pytest.approx(a.center, rel=1e-9)
        assert b.sigma == pytest.approx(a.sigma, rel=1e-6)


def test_fit_requires_enough_samples():
    omega = np.linspace(1.0, 2.0, 5)
    spec = pl.OpticalSpectrum(omega, np.ones(5))
    with pytest.raises(ValueError):
        pl.fit_gaussian_mixture(spec, 2)


# ---------------------------------------------------------------- widths


def test_reference_central_frequency():
    mixture = reference_mixture()
    center = pl.central_frequency(mixture)
    assert abs(center - pl.thz_to_rad_s(242.6)) <= 0.001 * pl.thz_to_rad_s(242.6)
    sampled = sample_mixture(mixture)
    assert pl.central_frequency(sampled) == pytest.approx(center, rel=1e-6)


def test_reference_two_sigma_width():
    width = pl.width_two_sigma(reference_mixture())
    assert abs(width - pl.thz_to_rad_s(7.5)) <= 0.01 * pl.thz_to_rad_s(7.5)


def test_reference_inverse_participation_width():
    width = pl.width_sussmann(reference_mixture())
    assert abs(width - pl.thz_to_rad_s(13.0)) <= 0.01 * pl.thz_to_rad_s(13.0)


def test_single_gaussian_width_identities():
    sigma = 4.0e12
    mixture = pl.GaussianMixture((pl.GaussianComponent(1.3, 3.0e14, sigma),))
    assert pl.central_frequency(mixture) == pytest.approx(3.0e14, rel=1e-12)
    assert pl.width_two_sigma(mixture) == pytest.approx(2 * sigma, rel=1e-12)
    assert pl.width_sussmann(mixture) == pytest.approx(2 * math.sqrt(math.pi) * sigma, rel=1e-12)
    ratio = pl.width_sussmann(mixture) / pl.width_two_sigma(mixture)
    assert abs(ratio - math.sqrt(math.pi)) < 1e-9


def test_two_equal_lines_centered_between():
    mixture = pl.GaussianMixture(
        (pl.GaussianComponent(1.0, 2.0e14, 1e12), pl.GaussianComponent(1.0, 2.4e14, 1e12))
    )
    assert pl.central_frequency(mixture) == pytest.approx(2.2e14, rel=1e-12)


def test_separated_lines_double_inverse_participation_width():
    sigma = 1.0e12
    single = pl.GaussianMixture((pl.GaussianComponent(1.0, 2.0e14, sigma),))
    double = pl.GaussianMixture(
        (pl.GaussianComponent(1.0, 2.0e14, sigma), pl.GaussianComponent(1.0, 2.6e14, sigma))
    )
    b1 = pl.width_sussmann(single)
    b2 = pl.width_sussmann(double)
    assert b2 == pytest.approx(2 * b1, rel=1e-6)
    # quadrature oracle for the same quantity
    omega = np.linspace(1.8e14, 2.8e14, 400001)
    dens = double(omega)
    s_norm = dens / np.trapezoid(dens, omega)
    assert b2 == pytest.approx(1.0 / np.trapezoid(s_norm**2, omega), rel=1e-6)


def test_widths_scale_invariant():
    mixture = reference_mixture()
    spec = sample_mixture(mixture)
    scaled = pl.OpticalSpectrum(spec.omega, 7.25 * spec.density)
    for fn in (pl.central_frequency, pl.width_two_sigma, pl.width_sussmann):
        assert fn(scaled) == pytest.approx(fn(spec), rel=1e-12)


def test_widths_reject_zero_power():
    spec = pl.OpticalSpectrum(np.array([1.0, 2.0]), np.array([0.0, 0.0]))
    for fn in (pl.central_frequency, pl.width_two_sigma, pl.width_sussmann):
        with pytest.raises(ValueError):
            fn(spec)


def test_narrow_line_width_goes_to_zero():
    widths = []
    for sigma in (1e12, 1e10, 1e8):
        mixture = pl.GaussianMixture((pl.GaussianComponent(1.0, 2.0e14, sigma),))
        widths.append(pl.width_two_sigma(mixture))
    assert widths[2] < widths[1] < widths[0]
    assert widths[2] == pytest.approx(2e8, rel=1e-9)


# ---------------------------------------------------------------- discretize


def test_discretize_flat_density_keeps_all_modes():
    omega = np.linspace(1.0e15, 1.1e15, 64)
    spec = pl.OpticalSpectrum(omega, np.full(64, 2.0))
    grid = pl.ModeGrid(1.02e15, 1e12, 50)
    state = pl.discretize(spec, grid, cutoff_db=math.inf, temperature=0.0)
    assert state.n_modes == 50
    assert np.allclose(state.p_s, 1e12 * 2.0)
    assert np.all(state.p_t == 0.0)


def test_discretize_drops_edge_mode_below_cutoff():
    # trailing grid point 14 dB below the peak must be dropped at 13 dB
    grid = pl.ModeGrid(1.0e15, 1e12, 3)
    omega = np.linspace(0.99e15, 1.01e15, 301)
    peak = np.ones_like(omega)
    dens = np.interp(omega, grid.omegas, [1.0, 1.0, 10 ** (-1.4)])
    spec = pl.OpticalSpectrum(omega, dens)
    state = pl.discretize(spec, grid, cutoff_db=13.0)
    assert state.n_modes == 2


def test_discretize_reference_comb(diode_state):
    # computable claim for a smooth few-ten-THz spectrum on this comb
    assert diode_state.n_modes > 1000
    assert diode_state.n_modes == 1253  # frozen regression value
    stats = pl.power_summary(diode_state)
    assert 0.3 < stats.relative_width < 0.6


def test_discretize_riemann_sum_matches_integral(diode_mixture):
    grid = pl.ModeGrid.from_span(pl.thz_to_rad_s(220.0), pl.thz_to_rad_s(268.0), FSR_RAD_S)
    state = pl.discretize(diode_mixture, grid, cutoff_db=math.inf)
    riemann = state.total_power
    integral = pl.integrate(diode_mixture, grid.omegas[0], grid.omegas[-1])
    # bound from the sum-integral correction series of the density itself
    em = pl.euler_maclaurin_sum(
        diode_mixture,
        grid.omegas[0],
        grid.omegas[-1],
        state.n_modes,
        order=2,
        derivatives=[diode_mixture.derivative],
    )
    bound = FSR_RAD_S * (abs(em.boundary_term) + abs(sum(em.correction_terms)) + em.residual_estimate)
    assert abs(riemann - integral) <= bound + 1e-9 * integral


def test_discretize_thermal_floor_negligible_at_room_temperature(diode_mixture):
    grid = pl.ModeGrid.from_span(pl.thz_to_rad_s(235.0), pl.thz_to_rad_s(250.0), FSR_RAD_S)
    state = pl.discretize(diode_mixture, grid, cutoff_db=math.inf, temperature=300.0)
    assert np.all(state.p_t > 0)
    assert state.p_t.max() < 1e-12 * state.p_s.max()


def test_discretize_empty_after_cutoff():
    omega = np.linspace(1.0e15, 1.1e15, 64)
    spec = pl.OpticalSpectrum(omega, np.zeros(64))
    with pytest.raises(ValueError):
        pl.discretize(spec, pl.ModeGrid(1.02e15, 1e12, 10))


def test_discretize_grid_must_lie_in_sampled_support():
    omega = np.linspace(1.0e15, 1.1e15, 64)
    spec = pl.OpticalSpectrum(omega, np.ones(64))
    with pytest.raises(ValueError):
        pl.discretize(spec, pl.ModeGrid(0.9e15, 1e12, 10))


# ---------------------------------------------------------------- mode counting


def _comb_spectrum(centers, amplitudes, width, lo, hi):
    omega = np.linspace(lo, hi, 30001)
    dens = np.zeros_like(omega)
    for c, a in zip(centers, amplitudes):
        dens += a * np.exp(-((omega - c) ** 2) / (2 * width**2))
    return pl.OpticalSpectrum(omega, dens)


def test_count_modes_five_equal_peaks():
    fsr = 2e12
    centers = 1e15 + fsr * np.arange(-2, 3)
    spec = _comb_spectrum(centers, np.ones(5), fsr / 12, 0.99e15, 1.01e15)
    assert pl.count_modes(spec, 13.0, fsr) == 5


def test_count_modes_gapped_comb_counts_surviving_peaks():
    fsr = 2e12  # two comb teeth suppressed, five remain
    centers = 1e15 + fsr * np.array([-3, -2, 0, 2, 3])
    spec = _comb_spectrum(centers, np.ones(5), fsr / 12, 0.985e15, 1.015e15)
    assert pl.count_modes(spec, 13.0, fsr) == 5


def test_count_modes_drops_peak_below_cutoff():
    fsr = 2e12
    centers = 1e15 + fsr * np.arange(-2, 3)
    amps = np.array([10 ** (-1.4), 1.0, 1.0, 1.0, 1.0])
    spec = _comb_spectrum(centers, amps, fsr / 12, 0.99e15, 1.01e15)
    assert pl.count_modes(spec, 13.0, fsr) == 4


def test_count_modes_smooth_broadband(diode_mixture):
    omega = np.linspace(pl.thz_to_rad_s(215.0), pl.thz_to_rad_s(275.0), 40001)
    spec = pl.OpticalSpectrum(omega, diode_mixture(omega))
    n = pl.count_modes(spec, 13.0, FSR_RAD_S)
    assert n > 1000
    assert n == pytest.approx(1253, abs=2)


def test_count_modes_rejects_bad_inputs():
    spec = pl.OpticalSpectrum(np.array([1.0, 2.0]), np.array([0.0, 0.0]))
    with pytest.raises(ValueError):
        pl.count_modes(spec, 13.0, 0.5)
    good = pl.OpticalSpectrum(np.array([1.0, 2.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        pl.count_modes(good, 13.0, -1.0)
