"""Closed-form temporal correlation functions of a pure PRAG mode comb.

The normalized field correlation is a power-weighted phasor sum,

    g1(tau) = (1/P) sum_i exp(-i w_i tau) (p_i^s + p_i^t),

and the intensity correlation follows from it with a finite-mode correction,

    g2(tau) = 1 + |g1(tau)|^2 - sum_i (p_i^s)^2 / P^2,

which at tau = 0 reduces to 2 - (1/N)(1 + var/mean^2) / (1 + <p^t>/<p^s>)^2.
All values are invariant under a uniform rescaling of the powers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .state import PragState, power_summary

__all__ = ["CorrelationTrace", "g1", "g2_tau", "g2_zero", "g2_mode_sweep"]


@dataclass(frozen=True)
class CorrelationTrace:
    """Correlation values on a strictly increasing delay grid."""

    tau: np.ndarray
    value: np.ndarray
    stderr: np.ndarray | None = None

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        value = np.asarray(self.value)
        if tau.ndim != 1 or value.shape != tau.shape:
            raise ValueError("tau and value must be matching 1-d arrays")
        if tau.size > 1 and np.any(np.diff(tau) <= 0):
            raise ValueError("tau must be strictly increasing")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "value", value)
        if self.stderr is not None:
            err = np.asarray(self.stderr, dtype=float)
            if err.shape != tau.shape:
                raise ValueError("stderr must match tau")
            object.__setattr__(self, "stderr", err)

    def to_csv(self, path_or_file, header_lines: list[str] | None = None) -> None:
        """Write columns tau_s, value (plus value_im for complex, stderr if set)."""
        close = False
        if hasattr(path_or_file, "write"):
            fh = path_or_file
        else:
            fh = open(path_or_file, "w", newline="")
            close = True
        try:
            for line in header_lines or []:
                fh.write(f"# {line}\n")
            is_complex = np.iscomplexobj(self.value)
            cols = ["tau_s", "value"] + (["value_im"] if is_complex else [])
            if self.stderr is not None:
                cols.append("stderr")
            writer = csv.writer(fh)
            writer.writerow(cols)
            for i, t in enumerate(self.tau):
                row = [f"{t:.17g}"]
                if is_complex:
                    row += [f"{self.value[i].real:.17g}", f"{self.value[i].imag:.17g}"]
                else:
                    row.append(f"{self.value[i]:.17g}")
                if self.stderr is not None:
                    row.append(f"{self.stderr[i]:.17g}")
                writer.writerow(row)
        finally:
            if close:
                fh.close()


def _phasor_mean(omegas: np.ndarray, powers: np.ndarray, tau):
    """Power-weighted mean of exp(-i w tau); tau may be scalar or array."""
    total = powers.sum()
    if not total > 0:
        raise ValueError("zero total power")
    t = np.asarray(tau, dtype=float)
    phases = np.exp(-1j * t.reshape(-1, 1) * omegas)
    out = (phases @ powers) / total
    return out.reshape(t.shape) if t.ndim else complex(out[0])


def g1(state: PragState, tau):
    """Normalized first-order correlation; |g1(0)| = 1 exactly."""
    return _phasor_mean(state.omegas, state.p_s + state.p_t, tau)


def g2_tau(state: PragState, tau):
    """Normalized intensity correlation g2(tau) in [0, 2].

    A purely thermal comb (p_s = 0) reduces to the Siegert relation
    g2 = 1 + |g1|^2.
    """
    total = state.total_power
    if not total > 0:
        raise ValueError("zero total power")
    modulus_sq = np.abs(g1(state, tau)) ** 2
    correction = float((state.p_s**2).sum()) / total**2
    return 1.0 + modulus_sq - correction


def g2_zero(state: PragState) -> float:
    """Zero-delay intensity correlation from the per-mode power statistics.

    Requires incoherent power; for a purely thermal comb use g2_tau(state, 0)
    (the closed form below divides by the mean incoherent power).
    """
    stats = power_summary(state)
    if not stats.mean_ps > 0:
        raise ValueError("state has no incoherent power; use g2_tau for thermal combs")
    n = state.n_modes
    thermal_ratio = stats.mean_pt / stats.mean_ps
    return 2.0 - (1.0 + stats.relative_width) / (n * (1.0 + thermal_ratio) ** 2)


def g2_mode_sweep(relative_width: float, n_values) -> list[tuple[int, float]]:
    """g2(0) = 2 - (1 + relative_width)/N for each mode number in n_values."""
    if relative_width < 0:
        raise ValueError("relative width must be non-negative")
    out = []
    for n in n_values:
        n = int(n)
        if n < 1:
            raise ValueError("mode numbers must be positive")
        out.append((n, 2.0 - (1.0 + relative_width) / n))
    return out
