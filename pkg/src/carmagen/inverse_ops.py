"""Discrete inverse machinery for the localization filter.

The composite right inverse runs one stable first-order recursion per
non-imaginary pole (causal for left-half-plane poles, anti-causal for the
right half plane) followed by one shift-variant regularized recursion per
imaginary pole.  The regularized step subtracts the null-space sinusoid that
makes the output vanish at k = 0, which is what pins down non-stationary
realizations; the resulting boundary values are reported so callers can audit
them rather than trust the construction.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import SignalTooShort
from .filters import localization_coeffs
from .system import PoleZeroSystem


@dataclass(frozen=True)
class BoundaryReport:
    """Values of the boundary chain at k = 0, one per imaginary pole.

    Entry 0 is the signal itself at 0; entry m is the signal after the first
    m trailing first-order differences, at 0.  All entries are 0 to machine
    precision for signals produced by ``apply_inverse_composite``.
    """

    residuals: tuple[complex, ...]

    @property
    def max_residual(self) -> float:
        if not self.residuals:
            return 0.0
        return float(max(abs(r) for r in self.residuals))


def first_order_inverse(alpha: complex, x) -> np.ndarray:
    """Stable inverse recursion for one first-order difference factor.

    Causal for ``Re(alpha) <= 0`` (``y[k] = e^alpha y[k-1] + x[k]``, zero
    initial state), anti-causal otherwise (``y[k] = e^-alpha (y[k+1] -
    x[k+1])``, zero final state).  Both equal the two-sided convolution with
    the zero-extended input.
    """
    alpha = complex(alpha)
    x = np.asarray(x, dtype=complex)
    w = cmath.exp(alpha)
    if alpha.real <= 0:
        return lfilter([1.0], [1.0, -w], x)
    wi = 1.0 / w
    rev = lfilter([0.0, -wi], [1.0, -wi], x[::-1])
    return rev[::-1]


def regularized_inverse(omega0: float, x, start: int = 0) -> np.ndarray:
    """Right inverse of the marginally-stable difference factor at frequency
    ``omega0`` whose output vanishes at k = 0.

    ``start`` is the time index of ``x[0]``; it must not exceed 0 so that the
    anchor sample lies inside the window.  The causal accumulation is
    corrected by the null-space sinusoid matched at k = 0, so the first-order
    difference of the output reproduces ``x`` from ``start + 1`` on.
    """
    x = np.asarray(x, dtype=complex)
    if not (start <= 0 < start + len(x)):
        raise ValueError("window must contain the anchor index k = 0")
    w = cmath.exp(1j * omega0)
    acc = lfilter([1.0], [1.0, -w], x)
    k = np.arange(start, start + len(x))
    return acc - np.exp(1j * omega0 * k) * acc[-start]


def _composite(sys: PoleZeroSystem, x: np.ndarray, start: int):
    """Composite inverse on an offset window; extends the window left so the
    boundary chain can be evaluated at and just below k = 0."""
    need_lo = min(start, -sys.n0)
    pad = start - need_lo
    z = np.concatenate([np.zeros(pad, dtype=complex), np.asarray(x, dtype=complex)])
    n_regular = sys.order - sys.n0
    for p in sys.poles[:n_regular]:
        z = first_order_inverse(p, z)
    for om in sys.imaginary_frequencies():
        z = regularized_inverse(float(om), z, start=need_lo)
    return z, need_lo


def _boundary_report(sys: PoleZeroSystem, s: np.ndarray, start: int) -> BoundaryReport:
    if sys.n0 == 0:
        return BoundaryReport(())
    freqs = sys.imaginary_frequencies()
    w = s
    idx0 = -start
    residuals = [w[idx0]]
    for m in range(sys.n0 - 1):
        om = freqs[sys.n0 - 1 - m]
        w = w[1:] - cmath.exp(1j * om) * w[:-1]
        idx0 -= 1
        residuals.append(w[idx0])
    return BoundaryReport(tuple(complex(r) for r in residuals))


def apply_inverse_composite(sys: PoleZeroSystem, x) -> tuple[np.ndarray, BoundaryReport]:
    """Solve the difference system for a finite driving signal.

    ``x[k]`` is taken to live on k = 0 .. len(x)-1 (zero outside).  Returns
    the solution on the same window together with the boundary values at
    k = 0, which the construction drives to zero whenever imaginary poles are
    present.
    """
    x = np.asarray(x, dtype=complex)
    s_full, lo = _composite(sys, x, 0)
    report = _boundary_report(sys, s_full, lo)
    return s_full[-lo:] if lo else s_full, report


def apply_localization(sys: PoleZeroSystem, s) -> np.ndarray:
    """Generalized increments of a sampled signal: the valid-region FIR pass
    of the localization taps (output is shorter by the system order)."""
    s = np.asarray(s, dtype=complex)
    d = localization_coeffs(sys.poles).as_array()
    if len(s) <= sys.order:
        raise SignalTooShort(
            f"need more than {sys.order} samples, got {len(s)}"
        )
    return np.convolve(s, d, mode="valid")
