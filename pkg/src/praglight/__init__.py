"""Photon statistics of broadband multi-mode light.

Models spectrally broad, first-order-incoherent emission as a comb of
phase-randomized Gaussian modes, evaluates its first- and second-order
temporal coherence in closed form (also mixed with a single-mode laser),
and validates every formula against a classical stochastic-field
Monte-Carlo oracle, up to synthetic two-photon-absorption interferograms.
"""

__version__ = "0.1.0"

from .correlations import CorrelationTrace, g1, g2_mode_sweep, g2_tau, g2_zero
from .interferogram import Interferogram, extract_g2, synthesize_tpa
from .mixing import (
    MixedSpectrum,
    MixedState,
    ScaledGaussianParams,
    g1_mixed,
    g2_tau_mixed,
    g2_zero_mixed,
    g2_zero_mixed_moment_form,
    g2_zeta_forms,
    gaussian_case_g2,
    gaussian_case_g2_zero,
    mixed_spectrum,
    zeta,
)
from .numerics import (
    EulerMaclaurinResult,
    bernoulli,
    euler_maclaurin_sum,
    integrate,
    lowpass_zero_phase,
)
from .oracle import (
    FieldRealization,
    OracleConfig,
    PhotonCountHistogram,
    estimate_g2,
    sample_photon_counts,
    sample_realization,
)
from .spectrum import (
    FitResult,
    GaussianComponent,
    GaussianMixture,
    ModeGrid,
    OpticalSpectrum,
    central_frequency,
    count_modes,
    discretize,
    fit_gaussian_mixture,
    load_spectrum,
    mode_comb_state,
    nm_to_rad_s,
    rad_s_to_thz,
    thz_to_rad_s,
    width_sussmann,
    width_two_sigma,
)
from .state import (
    PowerSummary,
    PragState,
    photon_number_pmf,
    power_summary,
    state_with_relative_width,
    thermal_occupation,
)
