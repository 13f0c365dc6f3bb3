"""Shared fixtures: the reference diode model and cached Monte-Carlo runs."""

import time

import numpy as np
import pytest

import praglight as pl

# Three-Gaussian model of a broadband near-infrared diode spectrum
# (amplitudes arbitrary, centers/widths as ordinary frequencies in THz).
REFERENCE_AMPLITUDES = (1.904, 0.637, 0.532)
REFERENCE_CENTERS_THZ = (242.55, 246.05, 236.82)
REFERENCE_SIGMAS_THZ = (2.468, 2.875, 2.105)
FSR_RAD_S = 2 * np.pi * 1.465e10
LASER_WAVELENGTH_NM = 1300.0


def reference_mixture() -> pl.GaussianMixture:
    comps = tuple(
        pl.GaussianComponent(a, float(pl.thz_to_rad_s(c)), float(pl.thz_to_rad_s(s)))
        for a, c, s in zip(REFERENCE_AMPLITUDES, REFERENCE_CENTERS_THZ, REFERENCE_SIGMAS_THZ)
    )
    return pl.GaussianMixture(comps)


@pytest.fixture(scope="session")
def diode_mixture() -> pl.GaussianMixture:
    return reference_mixture()


@pytest.fixture(scope="session")
def diode_state(diode_mixture) -> pl.PragState:
    """Reference model discretized on its free-spectral-range comb at 13 dB."""
    return pl.mode_comb_state(diode_mixture, FSR_RAD_S, cutoff_db=13.0, temperature=0.0)


def _power_weighted_mean(omegas, powers) -> float:
    return float((omegas * powers).sum() / powers.sum())


@pytest.fixture(scope="session")
def diode_tpa(diode_state):
    """Synthesized and extracted TPA record for the pure broadband state."""
    dt = 0.5e-15
    tau = dt * np.arange(-680, 681)
    config = pl.OracleConfig(60000, 12, budget=2e14)
    start = time.perf_counter()
    igram = pl.synthesize_tpa(diode_state, tau, config)
    carrier = _power_weighted_mean(diode_state.omegas, diode_state.p_s)
    trace = pl.extract_g2(igram, carrier)
    elapsed = time.perf_counter() - start
    analytic = pl.g2_tau(diode_state, trace.tau)
    return {
        "state": diode_state,
        "igram": igram,
        "trace": trace,
        "analytic": analytic,
        "carrier": carrier,
        "elapsed": elapsed,
    }


@pytest.fixture(scope="session")
def mixed_tpa(diode_state):
    """TPA round trip for the 60/40 laser-diode mixture (zeta = 0.6)."""
    p_s = diode_state.total_power
    omega_k = float(pl.nm_to_rad_s(LASER_WAVELENGTH_NM))
    mixed = pl.MixedState(diode_state, omega_k, 1.5 * p_s)
    omega_bar = _power_weighted_mean(diode_state.omegas, diode_state.p_s)
    dt = 0.5e-15
    tau = dt * np.arange(-680, 681)
    config = pl.OracleConfig(60000, 12, budget=2e14)
    start = time.perf_counter()
    igram = pl.synthesize_tpa(mixed, tau, config)
    carrier = (omega_bar * p_s + omega_k * 1.5 * p_s) / (2.5 * p_s)
    trace = pl.extract_g2(igram, carrier)
    elapsed = time.perf_counter() - start
    analytic = pl.g2_tau_mixed(mixed, trace.tau)
    tau_beat = 2 * np.pi / abs(omega_bar - omega_k)
    return {
        "state": mixed,
        "trace": trace,
        "analytic": analytic,
        "tau_beat": tau_beat,
        "elapsed": elapsed,
    }


def random_state_suite(seed: int = 2024):
    """20 small random states cycling through pure, thermal and mixed kinds."""
    rng = np.random.default_rng(seed)
    states = []
    for i in range(20):
        n = int(rng.integers(1, 33))
        grid = pl.ModeGrid(rng.uniform(5.0, 20.0), rng.uniform(0.5, 2.0), n)
        kind = i % 5
        p_s = rng.uniform(0.1, 1.0, n)
        p_t = rng.uniform(0.05, 0.5, n)
        if kind == 0:
            base = pl.PragState(grid, p_s, np.zeros(n))
        elif kind == 1:
            base = pl.PragState(grid, p_s, p_t)
        elif kind == 2:
            base = pl.PragState(grid, np.zeros(n), p_t)
        else:
            base = pl.PragState(grid, p_s, p_t if kind == 4 else np.zeros(n))
        if kind >= 3:  # add a coherent line, on or off the comb
            omega_k = grid.omega_1 + rng.uniform(-1.0, n + 1.0) * grid.delta_omega
            states.append(pl.MixedState(base, abs(omega_k), rng.uniform(0.2, 2.0)))
        else:
            states.append(base)
    return states


def suite_tau_grid(state, points: int = 50) -> np.ndarray:
    base = state.base if isinstance(state, pl.MixedState) else state
    if isinstance(state, pl.MixedState):
        omegas = np.append(base.omegas, state.omega_k)
        powers = np.append(base.p_s + base.p_t, state.P_l)
    else:
        omegas = base.omegas
        powers = base.p_s + base.p_t
    mean = float((omegas * powers).sum() / powers.sum())
    var = float(((omegas - mean) ** 2 * powers).sum() / powers.sum())
    if var > 0:
        tau_max = 6.0 / np.sqrt(var)
    else:
        tau_max = 100.0 * 2 * np.pi / mean
    return np.linspace(0.0, tau_max, points)


@pytest.fixture(scope="session")
def oracle_suite():
    """Monte-Carlo versus analytic comparison over the 20-state suite."""
    start = time.perf_counter()
    results = []
    for idx, state in enumerate(random_state_suite()):
        tau = suite_tau_grid(state)
        config = pl.OracleConfig(100000, 1500 + idx, tau)
        trace = pl.estimate_g2(state, config)
        if isinstance(state, pl.MixedState):
            analytic = pl.g2_tau_mixed(state, tau)
        else:
            analytic = pl.g2_tau(state, tau)
        results.append((state, trace, np.asarray(analytic)))
    elapsed = time.perf_counter() - start
    return {"results": results, "elapsed": elapsed}
