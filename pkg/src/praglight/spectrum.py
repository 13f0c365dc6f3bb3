"""Optical power spectra: ingestion, Gaussian-mixture modelling, widths, mode combs.

Spectra enter either as sampled data (CSV) or as a parametric sum of
Gaussian lines.  Everything downstream of a spectrum in arbitrary units is
scale invariant (normalized correlation functions, widths, power ratios);
absolute-watt samples additionally support the photon-number bridge.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .numerics import integrate
from .state import C_LIGHT, HBAR, ModeGrid, PragState, thermal_occupation

__all__ = [
    "OpticalSpectrum",
    "GaussianComponent",
    "GaussianMixture",
    "FitResult",
    "ModeGrid",
    "load_spectrum",
    "fit_gaussian_mixture",
    "central_frequency",
    "width_two_sigma",
    "width_sussmann",
    "discretize",
    "count_modes",
    "mode_comb_state",
    "thz_to_rad_s",
    "rad_s_to_thz",
    "nm_to_rad_s",
]

TWO_PI = 2.0 * math.pi


def thz_to_rad_s(f_thz):
    return TWO_PI * 1e12 * np.asarray(f_thz, dtype=float)


def rad_s_to_thz(omega):
    return np.asarray(omega, dtype=float) / (TWO_PI * 1e12)


def nm_to_rad_s(lambda_nm):
    return TWO_PI * C_LIGHT / (np.asarray(lambda_nm, dtype=float) * 1e-9)


@dataclass(frozen=True)
class OpticalSpectrum:
    """Sampled power spectral density versus angular frequency.

    ``unit_tag`` is either ``"absolute_watts"`` (density in W s/rad) or
    ``"arbitrary"``; with arbitrary units only scale-invariant quantities
    are meaningful downstream.
    """

    omega: np.ndarray
    density: np.ndarray
    unit_tag: str = "arbitrary"

    def __post_init__(self):
        om = np.asarray(self.omega, dtype=float)
        de = np.asarray(self.density, dtype=float)
        if om.ndim != 1 or om.shape != de.shape:
            raise ValueError("omega and density must be matching 1-d arrays")
        if om.size < 2:
            raise ValueError("spectrum needs at least 2 samples")
        if np.any(np.diff(om) <= 0):
            raise ValueError("omega axis must be strictly increasing")
        if np.any(de < 0):
            raise ValueError("negative spectral density")
        if self.unit_tag not in ("absolute_watts", "arbitrary"):
            raise ValueError("unit_tag must be 'absolute_watts' or 'arbitrary'")
        om = om.copy()
        de = de.copy()
        om.flags.writeable = False
        de.flags.writeable = False
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "density", de)

    @property
    def total(self) -> float:
        return float(np.trapezoid(self.density, self.omega))


@dataclass(frozen=True)
class GaussianComponent:
    amplitude: float
    center: float
    sigma: float

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("component amplitude must be non-negative")
        if not self.sigma > 0:
            raise ValueError("component sigma must be positive")


@dataclass(frozen=True)
class GaussianMixture:
    """Spectrum model S(w) = sum_i A_i exp(-(w - c_i)^2 / (2 s_i^2))."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        object.__setattr__(self, "components", comps)

    def __call__(self, omega):
        om = np.asarray(omega, dtype=float)
        out = np.zeros_like(om)
        for comp in self.components:
            out = out + comp.amplitude * np.exp(-((om - comp.center) ** 2) / (2 * comp.sigma**2))
        return out if out.ndim else float(out)

    def derivative(self, omega):
        om = np.asarray(omega, dtype=float)
        out = np.zeros_like(om)
        for comp in self.components:
            g = comp.amplitude * np.exp(-((om - comp.center) ** 2) / (2 * comp.sigma**2))
            out = out - g * (om - comp.center) / comp.sigma**2
        return out if out.ndim else float(out)

    @property
    def total(self) -> float:
        return math.sqrt(TWO_PI) * sum(c.amplitude * c.sigma for c in self.components)

    def support(self, n_sigma: float = 10.0) -> tuple[float, float]:
        lo = min(c.center - n_sigma * c.sigma for c in self.components)
        hi = max(c.center + n_sigma * c.sigma for c in self.components)
        return lo, hi

    def to_dict(self) -> dict:
        return {
            "components": [
                {"amplitude": c.amplitude, "center_rad_s": c.center, "sigma_rad_s": c.sigma}
                for c in self.components
            ]
        }


_UNIT_ALIASES = {
    "hz": "hz",
    "thz": "thz",
    "rad_s": "rad_s",
    "rad/s": "rad_s",
    "nm": "nm",
}


def _parse_rows(text: str):
    rows = []
    header_allowed = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) < 2:
            raise ValueError(f"line {lineno}: expected two numeric columns")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError:
            if header_allowed:
                header_allowed = False
                continue
            raise ValueError(f"line {lineno}: malformed numeric row: {raw!r}") from None
        header_allowed = False
    return rows


def load_spectrum(source, units: str, unit_tag: str = "arbitrary") -> OpticalSpectrum:
    """Read a two-column CSV spectrum and convert the axis to rad/s.

    ``units`` selects the frequency column interpretation: Hz, THz, rad_s or
    nm (wavelength).  Wavelength densities are converted to per-angular-
    frequency densities with the Jacobian |d lambda / d omega|.  Comments
    start with '#', the delimiter may be a comma or whitespace, and a single
    non-numeric header row is skipped.
    """
    key = _UNIT_ALIASES.get(str(units).lower())
    if key is None:
        raise ValueError(f"unknown units {units!r}; expected Hz, THz, rad_s or nm")
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    elif isinstance(source, bytes):
        text = source.decode()
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode()
    rows = _parse_rows(text)
    if len(rows) < 2:
        raise ValueError("spectrum needs at least 2 samples")
    axis = np.array([r[0] for r in rows])
    dens = np.array([r[1] for r in rows])
    if np.any(dens < 0):
        raise ValueError("negative spectral density")
    if key == "hz":
        omega = TWO_PI * axis
    elif key == "thz":
        omega = TWO_PI * 1e12 * axis
    elif key == "rad_s":
        omega = axis.copy()
    else:  # wavelength in nm
        if np.any(axis <= 0):
            raise ValueError("wavelength must be positive")
        lam = axis * 1e-9
        omega = TWO_PI * C_LIGHT / lam
        dens = dens * lam**2 / (TWO_PI * C_LIGHT)
    order = np.argsort(omega)
    omega = omega[order]
    dens = dens[order]
    if np.any(np.diff(omega) == 0):
        raise ValueError("duplicate frequency samples")
    return OpticalSpectrum(omega, dens, unit_tag)


@dataclass(frozen=True)
class FitResult:
    mixture: GaussianMixture
    residual_rms: float
    converged: bool
    n_iterations: int
    clamped: bool


def _moment_init(omega: np.ndarray, density: np.ndarray, n_components: int) -> np.ndarray:
    """Initial parameters from per-band moments of the cumulative power."""
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * np.diff(omega))])
    total = cum[-1]
    if total <= 0:
        raise ValueError("spectrum has zero integrated power")
    edges = np.interp(np.linspace(0, total, n_components + 1), cum, omega)
    params = []
    span = omega[-1] - omega[0]
    for i in range(n_components):
        lo, hi = edges[i], edges[i + 1]
        sel = (omega >= lo) & (omega <= hi)
        if sel.sum() < 3:
            sel = slice(None)
        om_b, de_b = omega[sel], density[sel]
        wsum = np.trapezoid(de_b, om_b)
        if wsum <= 0:
            center, sigma, amp = 0.5 * (lo + hi), max(hi - lo, 0.05 * span), density.max() * 0.1
        else:
            center = np.trapezoid(om_b * de_b, om_b) / wsum
            var = np.trapezoid((om_b - center) ** 2 * de_b, om_b) / wsum
            sigma = max(math.sqrt(max(var, 0.0)), 0.02 * span)
            amp = wsum / (math.sqrt(TWO_PI) * sigma)
        params.extend([amp, center, sigma])
    return np.array(params)


def _mixture_model(params: np.ndarray, omega: np.ndarray):
    n = len(params) // 3
    model = np.zeros_like(omega)
    jac = np.empty((omega.size, 3 * n))
    for i in range(n):
        amp, cen, sig = params[3 * i : 3 * i + 3]
        g = np.exp(-((omega - cen) ** 2) / (2 * sig**2))
        model += amp * g
        jac[:, 3 * i] = g
        jac[:, 3 * i + 1] = amp * g * (omega - cen) / sig**2
        jac[:, 3 * i + 2] = amp * g * (omega - cen) ** 2 / sig**3
    return model, jac


def fit_gaussian_mixture(
    spec: OpticalSpectrum,
    n_components: int,
    init: GaussianMixture | None = None,
    max_iterations: int = 200,
) -> FitResult:
    """Least-squares Gaussian-mixture fit by damped Gauss-Newton iteration.

    Components come back sorted by descending amplitude together with the
    residual RMS.  If the iteration budget runs out, the best parameters so
    far are returned with ``converged=False``; collapsing widths are clamped
    to a small floor and flagged.
    """
    if n_components < 1:
        raise ValueError("need at least one component")
    omega, density = spec.omega, spec.density
    if omega.size < 3 * n_components:
        raise ValueError("need at least 3 samples per component")
    if init is not None:
        params = np.array(
            [v for c in init.components for v in (c.amplitude, c.center, c.sigma)], dtype=float
        )
        if len(params) != 3 * n_components:
            raise ValueError("init mixture size does not match n_components")
    else:
        params = _moment_init(omega, density, n_components)

    span = omega[-1] - omega[0]
    sigma_floor = 1e-6 * span
    clamped = False
    lam = 1e-3
    model, jac = _mixture_model(params, omega)
    resid = model - density
    cost = float(resid @ resid)
    converged = False
    iteration = 0
    for iteration in range(1, max_iterations + 1):
        jtj = jac.T @ jac
        jtr = jac.T @ resid
        diag = np.maximum(np.diag(jtj), 1e-30)
        accepted = False
        for _ in range(40):
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), -jtr)
            except np.linalg.LinAlgError:
                lam *= 4.0
                continue
            trial = params + step
            # keep widths positive; flag if the floor is active
            for i in range(n_components):
                if trial[3 * i + 2] < sigma_floor:
                    trial[3 * i + 2] = sigma_floor
            t_model, t_jac = _mixture_model(trial, omega)
            t_resid = t_model - density
            t_cost = float(t_resid @ t_resid)
            if t_cost <= cost:
                accepted = True
                rel_step = np.max(np.abs(trial - params) / np.maximum(np.abs(params), 1e-300))
                improvement = (cost - t_cost) / max(cost, 1e-300)
                params, model, jac, resid, cost = trial, t_model, t_jac, t_resid, t_cost
                lam = max(lam / 3.0, 1e-12)
                if rel_step < 1e-11 or improvement < 1e-14:
                    converged = True
                break
            lam *= 4.0
        if not accepted or converged:
            converged = converged or accepted
            break

    comps = []
    for i in range(n_components):
        amp, cen, sig = params[3 * i : 3 * i + 3]
        if sig <= sigma_floor:
            clamped = True
            sig = sigma_floor
        comps.append(GaussianComponent(max(amp, 0.0), cen, sig))
    comps.sort(key=lambda c: -c.amplitude)
    rms = math.sqrt(cost / omega.size)
    return FitResult(GaussianMixture(tuple(comps)), rms, converged, iteration, clamped)


def _mixture_weights(model: GaussianMixture) -> np.ndarray:
    return np.array([c.amplitude * c.sigma for c in model.components])


def central_frequency(spec) -> float:
    """Power-weighted mean angular frequency of a spectrum or mixture."""
    if isinstance(spec, GaussianMixture):
        w = _mixture_weights(spec)
        total = w.sum()
        if total <= 0:
            raise ValueError("zero total power")
        centers = np.array([c.center for c in spec.components])
        return float((w * centers).sum() / total)
    total = spec.total
    if total <= 0:
        raise ValueError("zero total power")
    return float(np.trapezoid(spec.omega * spec.density, spec.omega) / total)


def width_two_sigma(spec) -> float:
    """Spectral width as twice the standard deviation of the normalized density."""
    if isinstance(spec, GaussianMixture):
        w = _mixture_weights(spec)
        total = w.sum()
        if total <= 0:
            raise ValueError("zero total power")
        centers = np.array([c.center for c in spec.components])
        sigmas = np.array([c.sigma for c in spec.components])
        mean = (w * centers).sum() / total
        # centered moments avoid cancellation for narrow lines at high center
        var = (w * ((centers - mean) ** 2 + sigmas**2)).sum() / total
        return 2.0 * math.sqrt(max(var, 0.0))
    total = spec.total
    if total <= 0:
        raise ValueError("zero total power")
    mean = np.trapezoid(spec.omega * spec.density, spec.omega) / total
    var = np.trapezoid((spec.omega - mean) ** 2 * spec.density, spec.omega) / total
    return 2.0 * math.sqrt(max(float(var), 0.0))


def width_sussmann(spec) -> float:
    """Inverse-participation width b = 1 / integral of the squared normalized density.

    Robust for fat-tailed line shapes; equals 2*sqrt(pi)*sigma for a single
    Gaussian.  Mixtures use the closed-form Gaussian-overlap double sum.
    """
    if isinstance(spec, GaussianMixture):
        comps = spec.components
        total = spec.total
        if total <= 0:
            raise ValueError("zero total power")
        acc = 0.0
        for ci in comps:
            for cj in comps:
                ssum = ci.sigma**2 + cj.sigma**2
                overlap = math.exp(-((ci.center - cj.center) ** 2) / (2 * ssum))
                acc += (
                    ci.amplitude
                    * cj.amplitude
                    * overlap
                    * math.sqrt(TWO_PI)
                    * ci.sigma
                    * cj.sigma
                    / math.sqrt(ssum)
                )
        return float(total**2 / acc)
    total = spec.total
    if total <= 0:
        raise ValueError("zero total power")
    s_norm = spec.density / total
    return float(1.0 / np.trapezoid(s_norm**2, spec.omega))


def _density_at(model, omegas: np.ndarray) -> np.ndarray:
    if isinstance(model, GaussianMixture):
        return model(omegas)
    if omegas[0] < model.omega[0] - 1e-9 * model.omega[0] or omegas[-1] > model.omega[-1] * (1 + 1e-9):
        raise ValueError("mode grid extends beyond the sampled spectrum")
    return np.interp(omegas, model.omega, model.density)


def discretize(
    model,
    grid: ModeGrid,
    cutoff_db: float = 13.0,
    temperature: float = 0.0,
) -> PragState:
    """Turn a continuous spectrum into a PRAG mode comb.

    Per mode, p_i^s = delta_omega * S(omega_i) - p_i^t (clamped at zero) with
    the thermal power taken from the Bose-Einstein occupation through the
    free-space mode relation p_i^t = hbar*omega_i*delta_omega*n_T/(2*pi);
    with an arbitrary-unit spectrum this floor is only meaningful as zero
    (the default T = 0).  Modes more than ``cutoff_db`` below the strongest
    one are dropped from both ends of the comb.
    """
    if cutoff_db < 0:
        raise ValueError("cutoff must be non-negative")
    omegas = grid.omegas
    dens = _density_at(model, omegas)
    p_t = HBAR * omegas * grid.delta_omega * thermal_occupation(omegas, temperature) / TWO_PI
    p_s = np.maximum(grid.delta_omega * dens - p_t, 0.0)
    if not np.any(p_s > 0):
        raise ValueError("no incoherent power on the grid")
    threshold = 0.0 if math.isinf(cutoff_db) else p_s.max() * 10.0 ** (-cutoff_db / 10.0)
    keep = np.flatnonzero(p_s >= threshold)
    if keep.size == 0:
        raise ValueError("no modes survive the cutoff")
    lo, hi = keep[0], keep[-1]
    new_grid = ModeGrid(float(omegas[lo]), grid.delta_omega, int(hi - lo + 1))
    return PragState(new_grid, p_s[lo : hi + 1], p_t[lo : hi + 1], temperature)


def count_modes(spec: OpticalSpectrum, cutoff_db: float, fsr: float) -> int:
    """Number of modes above the cutoff, by peak or comb counting.

    Distinct local maxima above the cutoff are counted when they are dense
    on the free-spectral-range scale (resolved multimode emission); a sparse
    set of maxima over a wide support means a smooth envelope, where the
    count is the number of FSR comb points above the cutoff instead.
    """
    if not fsr > 0:
        raise ValueError("fsr must be positive")
    dens = spec.density
    if dens.max() <= 0:
        raise ValueError("empty spectrum")
    threshold = dens.max() * 10.0 ** (-cutoff_db / 10.0)
    above = np.flatnonzero(dens >= threshold)
    interior = (dens[1:-1] > dens[:-2]) & (dens[1:-1] >= dens[2:]) & (dens[1:-1] >= threshold)
    n_peaks = int(np.count_nonzero(interior))
    lo, hi = spec.omega[above[0]], spec.omega[above[-1]]
    comb_capacity = (hi - lo) / fsr + 1.0
    if n_peaks >= 0.5 * comb_capacity:
        return n_peaks
    comb = lo + fsr * np.arange(int(math.floor((hi - lo) / fsr + 1e-9)) + 1)
    comb_dens = np.interp(comb, spec.omega, dens)
    return int(np.count_nonzero(comb_dens >= threshold))


def mode_comb_state(
    model,
    delta_omega: float,
    cutoff_db: float = 13.0,
    temperature: float = 0.0,
) -> PragState:
    """Convenience builder: span the model's support with an FSR comb and discretize."""
    if isinstance(model, GaussianMixture):
        lo, hi = model.support()
        lo = max(lo, 0.5 * min(c.center for c in model.components))
    else:
        lo, hi = float(model.omega[0]), float(model.omega[-1])
    grid = ModeGrid.from_span(lo, hi, delta_omega)
    return discretize(model, grid, cutoff_db, temperature)
