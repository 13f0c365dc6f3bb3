"""Superposition of a single-mode coherent line with a PRAG mode comb.

The laser enters every formula as one extra discrete line of power P_l at
omega_k (which need not sit on the comb).  With zeta = P_l / (P_l + P_s)
and no thermal floor the zero-delay intensity correlation takes the
two-parameter form

    g2(0) = 2 - zeta^2 - (1/N) [1 + var/mean^2] (1 - zeta)^2,

interpolating between the broadband value and the Poissonian limit 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlations import _phasor_mean
from .spectrum import OpticalSpectrum
from .state import PragState, power_summary

__all__ = [
    "MixedState",
    "MixedSpectrum",
    "ScaledGaussianParams",
    "zeta",
    "g1_mixed",
    "g2_tau_mixed",
    "g2_zero_mixed",
    "g2_zero_mixed_moment_form",
    "g2_zeta_forms",
    "mixed_spectrum",
    "gaussian_case_g2",
    "gaussian_case_g2_zero",
]


@dataclass(frozen=True)
class MixedState:
    """PRAG comb plus one coherent line of power P_l at omega_k."""

    base: PragState
    omega_k: float
    P_l: float

    def __post_init__(self):
        if not self.omega_k > 0:
            raise ValueError("laser frequency must be positive")
        if self.P_l < 0:
            raise ValueError("laser power must be non-negative")

    @property
    def total_power(self) -> float:
        return self.base.total_power + self.P_l

    @property
    def zeta(self) -> float:
        return zeta(self.P_l, float(self.base.p_s.sum()))

    def line_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All discrete lines: (omegas, incoherent-or-laser powers, thermal powers).

        The laser line is appended after the comb with its power in the first
        vector; only |g1| uses the combined vector, so the distinction between
        coherent and incoherent power is kept by the callers that need it.
        """
        om = np.append(self.base.omegas, self.omega_k)
        p_main = np.append(self.base.p_s, self.P_l)
        p_t = np.append(self.base.p_t, 0.0)
        return om, p_main, p_t


def zeta(P_l: float, P_s: float) -> float:
    """Laser power fraction P_l / (P_l + P_s) in [0, 1]."""
    if P_l < 0 or P_s < 0:
        raise ValueError("powers must be non-negative")
    total = P_l + P_s
    if not total > 0:
        raise ValueError("both powers are zero")
    return P_l / total


def g1_mixed(state: MixedState, tau):
    """Normalized first-order correlation including the laser line."""
    om, p_main, p_t = state.line_arrays()
    return _phasor_mean(om, p_main + p_t, tau)


def g2_tau_mixed(state: MixedState, tau):
    """Intensity correlation of the mixture: 1 + |g1|^2 - (P_l^2 + sum p_s^2)/P^2."""
    total = state.total_power
    if not total > 0:
        raise ValueError("zero total power")
    modulus_sq = np.abs(g1_mixed(state, tau)) ** 2
    correction = (state.P_l**2 + float((state.base.p_s**2).sum())) / total**2
    return 1.0 + modulus_sq - correction


def g2_zero_mixed(state: MixedState) -> float:
    """Zero-delay intensity correlation 2 - (P_l^2 + sum p_s^2) / P^2."""
    total = state.total_power
    if not total > 0:
        raise ValueError("zero total power")
    return 2.0 - (state.P_l**2 + float((state.base.p_s**2).sum())) / total**2


def g2_zero_mixed_moment_form(state: MixedState) -> float:
    """Equivalent zero-delay form written with per-mode means and variance.

    Kept as a separate code path so the algebraic rewrite can be checked
    against :func:`g2_zero_mixed` directly.
    """
    stats = power_summary(state.base)
    if not stats.mean_ps > 0:
        raise ValueError("moment form needs incoherent power on the comb")
    n = state.base.n_modes
    numer = 1.0 + stats.relative_width + state.P_l**2 / (n * stats.mean_ps**2)
    denom = (1.0 + stats.mean_pt / stats.mean_ps + state.P_l / (n * stats.mean_ps)) ** 2
    return 2.0 - numer / (n * denom)


def g2_zeta_forms(zeta_value: float, n_modes: int, relative_width: float, g1_sq=None):
    """Intensity correlation in the (zeta, N, relative width) parametrization.

    Without ``g1_sq`` this is the zero-delay form; passing |g1(tau)|^2 gives
    the delay-dependent curve 1 + |g1|^2 - zeta^2 - (1/N)[1+rw](1-zeta)^2.
    Assumes a negligible thermal floor.
    """
    if not 0 <= zeta_value <= 1:
        raise ValueError("zeta must lie in [0, 1]")
    if n_modes < 1:
        raise ValueError("need at least one mode")
    if relative_width < 0:
        raise ValueError("relative width must be non-negative")
    correction = zeta_value**2 + (1.0 + relative_width) * (1.0 - zeta_value) ** 2 / n_modes
    if g1_sq is None:
        return 2.0 - correction
    return 1.0 + np.asarray(g1_sq) - correction


@dataclass(frozen=True)
class MixedSpectrum:
    """Continuum samples plus never-rasterized delta lines (omega, power)."""

    continuum: OpticalSpectrum | None
    lines: tuple


def mixed_spectrum(state: MixedState) -> MixedSpectrum:
    """Spectrum of the mixture: comb continuum (p_s + p_t)/delta_omega plus the laser line.

    The Riemann identity delta_omega * sum(density) + sum(line powers) equals
    the total power exactly.  A single-mode comb has no meaningful continuum
    and yields ``continuum=None``.
    """
    base = state.base
    density = (base.p_s + base.p_t) / base.grid.delta_omega
    continuum = None
    if base.n_modes >= 2:
        continuum = OpticalSpectrum(base.omegas, density)
    lines = ((state.omega_k, state.P_l),) if state.P_l > 0 else ()
    return MixedSpectrum(continuum, lines)


@dataclass(frozen=True)
class ScaledGaussianParams:
    """Dimensionless parameters of the single-Gaussian analytic case.

    Frequencies are scaled by the Gaussian width sigma: ``omega_bar_tilde``
    is the carrier, ``delta_omega_tilde`` the mode spacing and
    ``delta_k_tilde`` the laser detuning (carrier minus laser), with
    ``epsilon`` the laser-to-comb power ratio.  The constant
    eta = (delta_omega_tilde / 2 sqrt(pi)) (1 + 1/(2 omega_bar_tilde^2))
    is always derived from the other fields, never stored.
    """

    epsilon: float
    delta_omega_tilde: float
    omega_bar_tilde: float
    delta_k_tilde: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if not self.delta_omega_tilde > 0:
            raise ValueError("scaled mode spacing must be positive")
        if not self.omega_bar_tilde > 0:
            raise ValueError("scaled carrier must be positive")

    @property
    def eta(self) -> float:
        return (
            self.delta_omega_tilde
            / (2.0 * math.sqrt(math.pi))
            * (1.0 + 1.0 / (2.0 * self.omega_bar_tilde**2))
        )


def gaussian_case_g2(params: ScaledGaussianParams, tau_tilde):
    """Scaled intensity correlation of a Gaussian comb mixed with one laser line.

    g2(t) = 1 + (1+eps)^-2 { e^{-t^2}(1 + (t/wb)^2) - eta
            + 2 eps e^{-t^2/2} [cos(dk t) - (t/wb) sin(dk t)] },
    in units of the inverse Gaussian width (t = sigma * tau).
    """
    t = np.asarray(tau_tilde, dtype=float)
    eps = params.epsilon
    wb = params.omega_bar_tilde
    dk = params.delta_k_tilde
    envelope = np.exp(-(t**2)) * (1.0 + (t / wb) ** 2) - params.eta
    beat = 2.0 * eps * np.exp(-(t**2) / 2.0) * (np.cos(dk * t) - (t / wb) * np.sin(dk * t))
    out = 1.0 + (envelope + beat) / (1.0 + eps) ** 2
    return out if out.ndim else float(out)


def gaussian_case_g2_zero(params: ScaledGaussianParams) -> float:
    """Zero-delay closed form 2 - (eta + epsilon^2) / (1 + epsilon)^2."""
    eps = params.epsilon
    return 2.0 - (params.eta + eps**2) / (1.0 + eps) ** 2
