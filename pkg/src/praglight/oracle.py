"""Brute-force stochastic-field validation of the analytic correlation formulas.

A PRAG comb has a positive classical phase-space ensemble, so every
normally-ordered correlation equals a plain average over classical field
draws: mode i gets the amplitude

    A_i = sqrt(p_i^s) exp(i phi_i) + c_i,   phi_i uniform on [0, 2 pi),

with c_i circular complex normal of mean square p_i^t (drawn by the polar
Box-Muller recipe), and an optional laser line enters as the constant
amplitude sqrt(P_l) at phase 0.  The intensity correlation estimator uses
the field at t = 0 and t = tau only; stationarity makes time averaging
unnecessary and keeps the cost at O(modes x delays x realizations).

Randomness is counter based (Philox) and split into fixed-size batches:
batch b of a run with seed s draws from the stream keyed (s, b), so any
scheduling of batches - serial or parallel - reproduces identical numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2

from .correlations import CorrelationTrace
from .mixing import MixedState
from .state import PragState, photon_number_pmf

__all__ = [
    "OracleConfig",
    "FieldRealization",
    "PhotonCountHistogram",
    "sample_realization",
    "estimate_g2",
    "sample_photon_counts",
]

BATCH_SIZE = 1000


@dataclass(frozen=True)
class OracleConfig:
    """Reproducible sampling plan: identical config and state give identical output."""

    n_realizations: int
    seed: int
    tau_grid: np.ndarray | None = None
    batch_size: int = BATCH_SIZE
    budget: float = 1e12

    def __post_init__(self):
        if self.n_realizations < 1:
            raise ValueError("need at least one realization")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.batch_size < 1:
            raise ValueError("batch size must be positive")
        if self.tau_grid is not None:
            grid = np.asarray(self.tau_grid, dtype=float)
            if grid.ndim != 1 or grid.size < 1:
                raise ValueError("tau grid must be a non-empty 1-d array")
            object.__setattr__(self, "tau_grid", grid)


@dataclass(frozen=True)
class FieldRealization:
    """One classical draw: complex amplitude per discrete line."""

    amplitudes: np.ndarray
    omegas: np.ndarray


def _line_arrays(state) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """(omegas, p_s, p_t, laser_power); the laser line, if any, comes last."""
    if isinstance(state, MixedState):
        base = state.base
        om = np.append(base.omegas, state.omega_k)
        p_s = np.append(base.p_s, 0.0)
        p_t = np.append(base.p_t, 0.0)
        return om, p_s, p_t, state.P_l
    if isinstance(state, PragState):
        return state.omegas, state.p_s, state.p_t, 0.0
    raise TypeError("expected PragState or MixedState")


def _draw_amplitudes(p_s: np.ndarray, p_t: np.ndarray, laser_power: float, rng, m: int) -> np.ndarray:
    """(m, n_lines) amplitude draws in a fixed order: phases, then Box-Muller pairs."""
    n = p_s.size
    phases = rng.random((m, n))
    u1 = rng.random((m, n))
    u2 = rng.random((m, n))
    amps = np.sqrt(p_s) * np.exp(2j * np.pi * phases)
    amps = amps + np.sqrt(-p_t * np.log1p(-u1)) * np.exp(2j * np.pi * u2)
    if laser_power > 0.0:
        amps[:, -1] += math.sqrt(laser_power)
    return amps


def sample_realization(state, rng) -> FieldRealization:
    """One draw from the classical ensemble of the state.

    ``rng`` is a numpy Generator (or an integer seed for a fresh Philox
    stream); repeated calls advance it.
    """
    if isinstance(rng, (int, np.integer)):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(rng))))
    om, p_s, p_t, laser = _line_arrays(state)
    amps = _draw_amplitudes(p_s, p_t, laser, rng, 1)[0]
    return FieldRealization(amps, om)


def _batch_rng(seed: int, batch_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, batch_index))))


def estimate_g2(state, config: OracleConfig) -> CorrelationTrace:
    """Monte-Carlo estimate of g2 on the config's delay grid, with stderr.

    The estimator is mean[I(0) I(tau)] / (mean[I(0)] mean[I(tau)]) over
    realizations; the standard error comes from the spread of per-batch
    ratios, so it needs at least two batches (NaN otherwise).
    """
    if config.tau_grid is None:
        raise ValueError("config needs a tau grid")
    om, p_s, p_t, laser = _line_arrays(state)
    tau = config.tau_grid
    n = config.n_realizations
    if om.size * n * tau.size > config.budget:
        raise ValueError("sampling budget exceeded")
    phase_matrix = np.exp(-1j * np.outer(om, tau))  # (n_lines, K)

    n_batches = (n + config.batch_size - 1) // config.batch_size
    sum_i0 = 0.0
    sum_it = np.zeros(tau.size)
    sum_x = np.zeros(tau.size)
    batch_ratios = np.empty((n_batches, tau.size))
    for b in range(n_batches):
        m = min(config.batch_size, n - b * config.batch_size)
        amps = _draw_amplitudes(p_s, p_t, laser, _batch_rng(config.seed, b), m)
        v0 = amps.sum(axis=1)
        vt = amps @ phase_matrix
        i0 = np.abs(v0) ** 2
        it = np.abs(vt) ** 2
        x = i0[:, None] * it
        sum_i0 += i0.sum()
        sum_it += it.sum(axis=0)
        sum_x += x.sum(axis=0)
        batch_ratios[b] = x.mean(axis=0) / (i0.mean() * it.mean(axis=0))
    value = (sum_x / n) / ((sum_i0 / n) * (sum_it / n))
    if n_batches >= 2:
        stderr = batch_ratios.std(axis=0, ddof=1) / math.sqrt(n_batches)
    else:
        stderr = np.full(tau.size, np.nan)
    return CorrelationTrace(tau, value, stderr)


@dataclass(frozen=True)
class PhotonCountHistogram:
    """Empirical photon-number histogram with its goodness-of-fit report."""

    counts: np.ndarray
    n_draws: int
    mean_photons: float
    chi_square: float
    p_value: float
    dof: int

    def to_json_dict(self) -> dict:
        return {str(n): int(c) for n, c in enumerate(self.counts)}


def sample_photon_counts(mean_photons: float, n_draws: int, rng) -> PhotonCountHistogram:
    """Draw photon numbers at the given mean and chi-square them against the pmf.

    Bins with expected occupancy below 5 are merged inward from both ends
    before forming the statistic; the degrees of freedom are bins - 1 (no
    parameter is estimated from the data).
    """
    if mean_photons < 0:
        raise ValueError("mean photon number must be non-negative")
    if n_draws < 1:
        raise ValueError("need at least one draw")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(rng))))
    draws = rng.poisson(mean_photons, n_draws)
    counts = np.bincount(draws)
    if mean_photons == 0:
        return PhotonCountHistogram(counts, n_draws, mean_photons, 0.0, 1.0, 0)

    kmax = int(max(counts.size - 1, mean_photons + 10 * math.sqrt(mean_photons) + 10))
    observed = np.zeros(kmax + 1)
    observed[: counts.size] = counts
    expected = n_draws * photon_number_pmf(mean_photons, np.arange(kmax + 1))
    expected[-1] += max(n_draws - expected.sum(), 0.0)  # lump the open tail

    obs_bins = list(observed)
    exp_bins = list(expected)
    while len(exp_bins) > 1 and exp_bins[-1] < 5.0:
        tail_e, tail_o = exp_bins.pop(), obs_bins.pop()
        exp_bins[-1] += tail_e
        obs_bins[-1] += tail_o
    while len(exp_bins) > 1 and exp_bins[0] < 5.0:
        head_e, head_o = exp_bins.pop(0), obs_bins.pop(0)
        exp_bins[0] += head_e
        obs_bins[0] += head_o
    obs_arr = np.array(obs_bins)
    exp_arr = np.array(exp_bins)
    stat = float(((obs_arr - exp_arr) ** 2 / exp_arr).sum())
    dof = max(len(exp_bins) - 1, 1)
    p_value = float(chi2.sf(stat, dof))
    return PhotonCountHistogram(counts, n_draws, mean_photons, stat, p_value, dof)
