"""Shared numeric utilities: sum-integral corrections, quadrature, filtering."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import signal
from scipy.integrate import quad

__all__ = [
    "bernoulli",
    "EulerMaclaurinResult",
    "euler_maclaurin_sum",
    "integrate",
    "lowpass_num_taps",
    "lowpass_zero_phase",
]

# Exact values B_2 .. B_20 (even index); odd-index Bernoulli numbers > 1 vanish.
_BERNOULLI = {
    2: Fraction(1, 6),
    4: Fraction(-1, 30),
    6: Fraction(1, 42),
    8: Fraction(-1, 30),
    10: Fraction(5, 66),
    12: Fraction(-691, 2730),
    14: Fraction(7, 6),
    16: Fraction(-3617, 510),
    18: Fraction(43867, 798),
    20: Fraction(-174611, 330),
}


def bernoulli(k: int) -> float:
    """Bernoulli number B_k for even k in [2, 20], table backed."""
    if k not in _BERNOULLI:
        raise ValueError("bernoulli is tabulated for even k between 2 and 20")
    return float(_BERNOULLI[k])


@dataclass(frozen=True)
class EulerMaclaurinResult:
    value: float
    integral_term: float
    boundary_term: float
    correction_terms: tuple
    residual_estimate: float


def _central_derivative(f: Callable[[float], float], order: int, h: float) -> Callable[[float], float]:
    """order-th derivative by nested 4th-order central differences."""
    if order == 0:
        return f
    lower = _central_derivative(f, order - 1, h)

    def deriv(x: float) -> float:
        return (-lower(x + 2 * h) + 8 * lower(x + h) - 8 * lower(x - h) + lower(x - 2 * h)) / (12 * h)

    return deriv


def euler_maclaurin_sum(
    f: Callable[[float], float],
    a: float,
    b: float,
    n_points: int,
    order: int = 2,
    derivatives: Sequence[Callable[[float], float]] | None = None,
) -> EulerMaclaurinResult:
    """Approximate sum_{i=1}^{N} f(a + (i-1)*D) with D = (b-a)/(N-1).

    The approximation is integral/D plus the endpoint average plus Bernoulli
    corrections D^(2m-1) B_2m / (2m)! * (f^(2m-1)(b) - f^(2m-1)(a)) for
    m = 1 .. order-1.  ``derivatives[k]`` may supply the (k+1)-th derivative
    analytically; otherwise nested central differences with step D/8 are used.
    The residual estimate is the magnitude of the last included series term
    (the endpoint average when order == 1).
    """
    if n_points < 2:
        raise ValueError("need at least two sample points")
    if order < 1:
        raise ValueError("order must be >= 1")
    delta = (b - a) / (n_points - 1)
    integral_term = integrate(f, a, b) / delta
    boundary_term = 0.5 * (f(a) + f(b))
    corrections = []
    for m in range(1, order):
        k = 2 * m - 1
        if derivatives is not None and len(derivatives) >= k:
            dfun = derivatives[k - 1]
        else:
            dfun = _central_derivative(f, k, delta / 8.0)
        coeff = delta**k * bernoulli(2 * m) / _factorial(2 * m)
        corrections.append(coeff * (dfun(b) - dfun(a)))
    residual = abs(corrections[-1]) if corrections else abs(boundary_term)
    value = integral_term + boundary_term + sum(corrections)
    return EulerMaclaurinResult(value, integral_term, boundary_term, tuple(corrections), residual)


def _factorial(n: int) -> float:
    out = 1.0
    for i in range(2, n + 1):
        out *= i
    return out


def integrate(f, a: float | None = None, b: float | None = None, rtol: float = 1e-9) -> float:
    """Integrate a callable over [a, b] (adaptive quadrature) or (x, y) samples.

    Callable input uses adaptive quadrature to relative tolerance ``rtol``
    (a RuntimeWarning flags non-convergence); sampled input is integrated by
    the trapezoid rule over the given abscissae.
    """
    if callable(f):
        if a is None or b is None:
            raise ValueError("callable input needs integration bounds")
        value, _err, info, *rest = quad(f, a, b, epsabs=0.0, epsrel=rtol, limit=200, full_output=True)
        if rest:
            warnings.warn(f"quadrature did not converge: {rest[0]}", RuntimeWarning)
        return float(value)
    x, y = f
    return float(np.trapezoid(np.asarray(y, dtype=float), np.asarray(x, dtype=float)))


def lowpass_num_taps(n_samples: int, sample_spacing: float, cutoff: float) -> int:
    """Kernel length used by :func:`lowpass_zero_phase` for these parameters.

    Edge samples within one kernel length of the boundary see the padding,
    so callers that cannot tolerate warm-up artifacts should discard that
    margin.
    """
    fs = 1.0 / sample_spacing
    nyquist = fs / 2.0
    if not 0 < cutoff < nyquist:
        raise ValueError("cutoff must lie strictly below the Nyquist frequency")
    # Blackman main-lobe width sets the transition band ~ 5.5 * fs / numtaps;
    # aim the transition at 0.8 * cutoff, capped so the kernel fits the signal.
    transition = 0.8 * min(cutoff, nyquist - cutoff)
    numtaps = int(np.ceil(5.5 * fs / transition)) | 1
    max_taps = max(11, (n_samples - 2) // 3) | 1
    return min(numtaps, max_taps)


def lowpass_zero_phase(values, sample_spacing: float, cutoff: float) -> np.ndarray:
    """Zero-phase low-pass: Blackman windowed-sinc FIR applied forward-backward.

    ``cutoff`` is an ordinary frequency in the reciprocal units of
    ``sample_spacing`` and must sit below the Nyquist frequency.  Output has
    the same length as the input and unit DC gain.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size < 8:
        raise ValueError("signal must be a 1-d array with at least 8 samples")
    if not sample_spacing > 0:
        raise ValueError("sample spacing must be positive")
    fs = 1.0 / sample_spacing
    numtaps = lowpass_num_taps(x.size, sample_spacing, cutoff)
    kernel = signal.firwin(numtaps, cutoff, fs=fs, window="blackman")
    padlen = min(3 * numtaps, x.size - 1)
    # mirror padding keeps the local DC level at the edges, so fringe-like
    # signals riding on an envelope do not leak a step into the passband
    return signal.filtfilt(kernel, [1.0], x, padtype="even", padlen=padlen)
