"""Two-photon-absorption interferograms: synthesis and intensity-correlation recovery.

A Michelson delay line feeding a two-photon detector produces, for a field
realization V, the signal counts(tau) = <|V(0) + V(tau)|^4>.  Expanding the
fourth power splits the record into a baseband envelope

    L(tau) = 2 <I^2> + 4 <I(0) I(tau)>,

a fringe band at the carrier and a weaker band at twice the carrier.
Low-pass filtering below half the carrier isolates L; with the far-delay
baseline B = 2<I^2> + 4<I>^2 and the zero-delay value L(0) = 6<I^2> the
normalized intensity correlation follows as

    g2(tau) = 1 + (L(tau) - B) / s,    s = B - L(0)/3 = 4 <I>^2.

The detector response is taken as instantaneous and frequency flat.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .correlations import CorrelationTrace
from .numerics import lowpass_num_taps, lowpass_zero_phase
from .oracle import OracleConfig, _draw_amplitudes, _batch_rng, _line_arrays

__all__ = ["Interferogram", "synthesize_tpa", "extract_g2"]


@dataclass(frozen=True)
class Interferogram:
    """TPA counts on a uniform delay grid (batch means kept for error bars)."""

    tau: np.ndarray
    counts: np.ndarray
    batch_counts: np.ndarray | None = None

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        if tau.ndim != 1 or counts.shape != tau.shape:
            raise ValueError("tau and counts must be matching 1-d arrays")
        if tau.size < 8:
            raise ValueError("interferogram needs at least 8 samples")
        steps = np.diff(tau)
        if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-6):
            raise ValueError("tau grid must be uniform and increasing")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "counts", counts)
        if self.batch_counts is not None:
            bc = np.asarray(self.batch_counts, dtype=float)
            if bc.ndim != 2 or bc.shape[1] != tau.size:
                raise ValueError("batch_counts must be (n_batches, n_tau)")
            object.__setattr__(self, "batch_counts", bc)

    @property
    def spacing(self) -> float:
        return float(self.tau[1] - self.tau[0])

    def to_csv(self, path_or_file, header_lines: list[str] | None = None) -> None:
        close = False
        if hasattr(path_or_file, "write"):
            fh = path_or_file
        else:
            fh = open(path_or_file, "w", newline="")
            close = True
        try:
            for line in header_lines or []:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh)
            writer.writerow(["tau_s", "counts"])
            for t, c in zip(self.tau, self.counts):
                writer.writerow([f"{t:.17g}", f"{c:.17g}"])
        finally:
            if close:
                fh.close()

    @classmethod
    def from_csv(cls, path) -> "Interferogram":
        taus, counts = [], []
        for raw in Path(path).read_text().splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            try:
                taus.append(float(parts[0]))
                counts.append(float(parts[1]))
            except (ValueError, IndexError):
                if not taus:
                    continue  # header row
                raise ValueError(f"malformed interferogram row: {raw!r}") from None
        return cls(np.array(taus), np.array(counts))


def _carrier_frequency(state) -> float:
    om, p_s, p_t, laser = _line_arrays(state)
    weights = p_s + p_t
    total = weights.sum() + laser
    if not total > 0:
        raise ValueError("zero total power")
    return float((om * weights).sum() + om[-1] * laser) / total


def synthesize_tpa(state, tau_grid, config: OracleConfig) -> Interferogram:
    """Ensemble-averaged TPA record <|V(0) + V(tau)|^4> over field realizations.

    The grid must resolve the carrier fringes with at least 8 samples per
    central period.  Per-batch means are stored on the result so extraction
    can report Monte-Carlo error bars.
    """
    tau = np.asarray(tau_grid, dtype=float)
    if tau.ndim != 1 or tau.size < 8:
        raise ValueError("tau grid must be a 1-d array with at least 8 samples")
    steps = np.diff(tau)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-6):
        raise ValueError("tau grid must be uniform and increasing")
    om, p_s, p_t, laser = _line_arrays(state)
    carrier = _carrier_frequency(state)
    if steps[0] > (2.0 * math.pi / carrier) / 8.0 * (1 + 1e-9):
        raise ValueError("under-sampled grid: need >= 8 samples per carrier period")
    n = config.n_realizations
    if om.size * n * tau.size > config.budget:
        raise ValueError("sampling budget exceeded")

    phase_matrix = np.exp(-1j * np.outer(om, tau))  # (n_lines, K)
    n_batches = (n + config.batch_size - 1) // config.batch_size
    batch_means = np.empty((n_batches, tau.size))
    total = np.zeros(tau.size)
    for b in range(n_batches):
        m = min(config.batch_size, n - b * config.batch_size)
        amps = _draw_amplitudes(p_s, p_t, laser, _batch_rng(config.seed, b), m)
        v0 = amps.sum(axis=1)
        vt = amps @ phase_matrix
        quartic = np.abs(v0[:, None] + vt) ** 4
        batch_means[b] = quartic.mean(axis=0)
        total += quartic.sum(axis=0)
    return Interferogram(tau, total / n, batch_means)


def _extract_one(tau: np.ndarray, counts: np.ndarray, carrier: float, margin: int) -> np.ndarray:
    spacing = tau[1] - tau[0]
    cutoff_hz = carrier / 2.0 / (2.0 * math.pi)
    envelope = lowpass_zero_phase(counts, spacing, cutoff_hz)[margin : counts.size - margin]
    inner_tau = tau[margin : tau.size - margin]
    n_tail = max(int(round(0.10 * inner_tau.size)), 2)
    baseline = float(envelope[-n_tail:].mean())
    center = int(np.argmin(np.abs(inner_tau)))
    scale = baseline - envelope[center] / 3.0
    if not scale > 0:
        raise ValueError("extraction failed: non-positive normalization scale")
    return 1.0 + (envelope - baseline) / scale


def extract_g2(igram: Interferogram, omega_bar: float) -> CorrelationTrace:
    """Recover g2(tau) from a TPA interferogram by fringe removal.

    Low-passes below half the carrier, subtracts the far-delay baseline
    (mean of the last 10% of the delay range) and rescales so that
    g2(tau -> infinity) = 1.  One filter-kernel length at each end of the
    scan is the filter's warm-up region and is dropped from the output.
    Raises if spectral content near half the carrier makes the envelope and
    fringe bands inseparable.
    """
    if not omega_bar > 0:
        raise ValueError("carrier frequency must be positive")
    tau, counts = igram.tau, igram.counts
    spacing = igram.spacing
    nyquist = math.pi / spacing
    if omega_bar / 2.0 >= nyquist:
        raise ValueError("carrier too high for this grid")

    # Guard band around half the carrier must be quiet, otherwise the
    # envelope leaks into the fringe band and the split is ill defined.
    spectrum = np.abs(np.fft.rfft(counts - counts.mean())) ** 2
    freqs = np.fft.rfftfreq(counts.size, d=spacing) * 2.0 * math.pi
    guard = (freqs > 0.35 * omega_bar) & (freqs < 0.65 * omega_bar)
    ac_power = spectrum.sum()
    if ac_power > 0 and spectrum[guard].sum() > 0.02 * ac_power:
        raise ValueError("band overlap detected: envelope bandwidth reaches half the carrier")

    cutoff_hz = omega_bar / 2.0 / (2.0 * math.pi)
    margin = lowpass_num_taps(counts.size, spacing, cutoff_hz)
    if counts.size - 2 * margin < 16:
        raise ValueError("scan too short: filter warm-up region leaves no usable delays")
    inner_tau = tau[margin : tau.size - margin]
    value = _extract_one(tau, counts, omega_bar, margin)
    stderr = None
    if igram.batch_counts is not None and igram.batch_counts.shape[0] >= 2:
        n_batches = igram.batch_counts.shape[0]
        batch_values = np.empty((n_batches, inner_tau.size))
        for i in range(n_batches):
            batch_values[i] = _extract_one(tau, igram.batch_counts[i], omega_bar, margin)
        stderr = batch_values.std(axis=0, ddof=1) / math.sqrt(n_batches)
    return CorrelationTrace(inner_tau, value, stderr)
