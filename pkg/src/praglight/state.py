"""Discrete-mode parametrization of phase-randomized Gaussian (PRAG) light.

A PRAG state is a comb of longitudinal modes, each carrying an incoherent
power p_i^s (a displaced amplitude whose phase is uniformly random) on top
of a thermal power p_i^t.  Phases never appear here: every observable in
this package depends only on the per-mode powers, so the state is fully
specified by the mode grid and the two power vectors.  Only the Monte-Carlo
oracle (:mod:`praglight.oracle`) ever draws explicit phases.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

# CODATA 2018 values.
HBAR = 1.054571817e-34  # J s
K_BOLTZMANN = 1.380649e-23  # J / K
C_LIGHT = 2.99792458e8  # m / s

__all__ = [
    "HBAR",
    "K_BOLTZMANN",
    "C_LIGHT",
    "ModeGrid",
    "PragState",
    "PowerSummary",
    "thermal_occupation",
    "power_summary",
    "photon_number_pmf",
    "state_with_relative_width",
]


@dataclass(frozen=True)
class ModeGrid:
    """Uniform comb of angular frequencies omega_i = omega_1 + (i-1)*delta_omega."""

    omega_1: float
    delta_omega: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("mode grid needs at least one mode")
        if not self.delta_omega > 0:
            raise ValueError("mode spacing must be positive")
        if not self.omega_1 > 0:
            raise ValueError("first mode frequency must be positive")

    @property
    def omegas(self) -> np.ndarray:
        return self.omega_1 + self.delta_omega * np.arange(self.count)

    @classmethod
    def from_span(cls, omega_lo: float, omega_hi: float, delta_omega: float) -> "ModeGrid":
        """Comb starting at omega_lo with as many modes as fit up to omega_hi."""
        if omega_hi < omega_lo:
            raise ValueError("empty span")
        n = int(math.floor((omega_hi - omega_lo) / delta_omega + 1e-9)) + 1
        return cls(omega_lo, delta_omega, n)


def thermal_occupation(omega, temperature: float):
    """Bose-Einstein occupation n(omega, T) = 1 / (exp(hbar*omega/kT) - 1).

    Returns exactly 0 at T = 0 and evaluates the deep Wien tail as exp(-x)
    so large hbar*omega/kT never overflows.
    """
    om = np.asarray(omega, dtype=float)
    if np.any(om <= 0):
        raise ValueError("omega must be positive")
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    if temperature == 0:
        out = np.zeros_like(om)
        return out if out.ndim else float(out)
    x = HBAR * om / (K_BOLTZMANN * temperature)
    out = np.empty_like(x)
    small = x < 700.0
    out[small] = 1.0 / np.expm1(x[small])
    # for x >= 700 the denominator of exp(-x)/(1-exp(-x)) is 1 to double precision
    out[~small] = np.exp(-x[~small])
    return out if out.ndim else float(out)


def _as_power_vector(values, n: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"{name} must have one entry per mode ({n}), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    if np.any(arr < 0):
        raise ValueError(f"{name} contains negative powers")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PragState:
    """Mode comb with per-mode incoherent powers p_s and thermal powers p_t.

    ``temperature`` is metadata (the effective photon temperature used to
    build ``p_t``; it is a free parameter, never inferred).  ``length`` is the
    optional quantization length L that bridges powers to mean photon numbers
    |gamma_i|^2 = p_i^s * L / (hbar * omega_i * c); when both ``length`` and
    ``gamma_sq`` are given they must be consistent.
    """

    grid: ModeGrid
    p_s: np.ndarray
    p_t: np.ndarray
    temperature: float = 0.0
    length: float | None = None
    gamma_sq: np.ndarray | None = field(default=None)

    def __post_init__(self):
        n = self.grid.count
        object.__setattr__(self, "p_s", _as_power_vector(self.p_s, n, "p_s"))
        object.__setattr__(self, "p_t", _as_power_vector(self.p_t, n, "p_t"))
        if self.gamma_sq is not None:
            if self.length is None:
                raise ValueError("gamma_sq requires the quantization length")
            gs = _as_power_vector(self.gamma_sq, n, "gamma_sq")
            object.__setattr__(self, "gamma_sq", gs)
            expected = HBAR * self.grid.omegas * C_LIGHT / self.length * gs
            scale = np.maximum(np.abs(self.p_s), np.abs(expected))
            bad = np.abs(expected - self.p_s) > 1e-12 * np.where(scale > 0, scale, 1.0)
            if np.any(bad):
                raise ValueError("gamma_sq inconsistent with p_s at the stated length")

    @property
    def omegas(self) -> np.ndarray:
        return self.grid.omegas

    @property
    def n_modes(self) -> int:
        return self.grid.count

    @property
    def total_power(self) -> float:
        return float(self.p_s.sum() + self.p_t.sum())

    def with_photon_numbers(self, length: float) -> "PragState":
        """Attach mean photon numbers |gamma_i|^2 for the given length L."""
        if not length > 0:
            raise ValueError("length must be positive")
        gs = self.p_s * length / (HBAR * self.omegas * C_LIGHT)
        return PragState(self.grid, self.p_s, self.p_t, self.temperature, length, gs)

    def scaled(self, factor: float) -> "PragState":
        """Uniformly rescale all powers (photon numbers are dropped)."""
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return PragState(self.grid, self.p_s * factor, self.p_t * factor, self.temperature)

    def to_dict(self) -> dict:
        return {
            "omega_1": self.grid.omega_1,
            "delta_omega": self.grid.delta_omega,
            "N": self.grid.count,
            "p_s": self.p_s.tolist(),
            "p_t": self.p_t.tolist(),
            "temperature": self.temperature,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PragState":
        grid = ModeGrid(float(data["omega_1"]), float(data["delta_omega"]), int(data["N"]))
        return cls(grid, data["p_s"], data["p_t"], float(data.get("temperature", 0.0)))

    @classmethod
    def from_json(cls, text: str) -> "PragState":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class PowerSummary:
    """Aggregate power statistics of a state (population moments, 1/N norm)."""

    P_s: float
    P_t: float
    P_total: float
    mean_ps: float
    var_ps: float
    mean_pt: float
    relative_width: float


def power_summary(state: PragState) -> PowerSummary:
    """Totals, per-mode means/variance and the relative width var/mean^2.

    The relative width is NaN for a state without incoherent power.
    """
    n = state.n_modes
    P_s = float(state.p_s.sum())
    P_t = float(state.p_t.sum())
    mean_ps = P_s / n
    mean_pt = P_t / n
    var_ps = float(np.mean((state.p_s - mean_ps) ** 2))
    rel = var_ps / mean_ps**2 if mean_ps > 0 else float("nan")
    return PowerSummary(P_s, P_t, P_s + P_t, mean_ps, var_ps, mean_pt, rel)


def photon_number_pmf(mean_photons: float, n) -> float | np.ndarray:
    """Poissonian probability of n photons at mean |gamma|^2, in log space."""
    if mean_photons < 0:
        raise ValueError("mean photon number must be non-negative")
    narr = np.asarray(n)
    if np.any(narr < 0) or not np.issubdtype(narr.dtype, np.integer):
        raise ValueError("n must be a non-negative integer")
    if mean_photons == 0:
        out = np.where(narr == 0, 1.0, 0.0)
        return out if out.ndim else float(out)
    from scipy.special import gammaln

    logp = -mean_photons + narr * math.log(mean_photons) - gammaln(narr + 1.0)
    out = np.exp(logp)
    return out if out.ndim else float(out)


def state_with_relative_width(
    n_modes: int,
    relative_width: float,
    omega_1: float = 1.0e15,
    delta_omega: float = 1.0e11,
    mean_power: float = 1.0,
) -> PragState:
    """Synthetic zero-temperature state whose power statistics hit an exact target.

    Uses a two-level power population (k weak modes, N-k strong ones); the
    weak level is solved in closed form so var/mean^2 equals
    ``relative_width`` to machine precision.  Requires
    relative_width <= (N-1), the maximum reachable with non-negative powers.
    """
    if n_modes < 1:
        raise ValueError("need at least one mode")
    if relative_width < 0:
        raise ValueError("relative width must be non-negative")
    grid = ModeGrid(omega_1, delta_omega, n_modes)
    if relative_width == 0 or n_modes == 1:
        if relative_width > 0:
            raise ValueError("a single mode cannot have nonzero relative width")
        p = np.full(n_modes, mean_power)
        return PragState(grid, p, np.zeros(n_modes))
    if relative_width > n_modes - 1:
        raise ValueError("relative width exceeds the (N-1) bound for non-negative powers")
    # smallest k with k/(N-k) >= relative_width keeps the weak level >= 0
    k = next(k for k in range(1, n_modes) if k / (n_modes - k) >= relative_width)
    root = math.sqrt(relative_width)
    d = root * n_modes / (math.sqrt(k * (n_modes - k)) + root * k)
    p = np.ones(n_modes)
    p[:k] = 1.0 - d
    p *= mean_power * n_modes / p.sum()
    return PragState(grid, p, np.zeros(n_modes))
