"""Discrete-domain kernels derived from the system's B-splines.

The pole vector maps to an FIR "localization" filter whose zeros sit at
``exp(pole)``; the integer samples of the autocorrelation B-spline form a
Hermitian Laurent kernel whose minimum-phase spectral factor drives the
Gaussian generator; its exact inverse is the interpolation prefilter.  The
module also evaluates the closed-form second-order predictions (stationary
autocorrelation and power spectra) used by the validation suite.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import lfilter

from .errors import FactorizationFailure, RieszViolation, Unsupported
from .expspline import PiecewiseExpPoly, bspline_autocorr
from .system import PoleZeroSystem

#: Frequency-grid density for positivity (Riesz) checks.  A trigonometric
#: polynomial of the orders handled here cannot hide a sign change at this
#: resolution.
RIESZ_GRID = 4096

#: A spectral-factor root this close to the unit circle means the kernel is
#: effectively singular.
UNIT_CIRCLE_TOL = 1e-8


@dataclass(frozen=True)
class FilterSpec:
    """Finite (or truncated two-sided) tap sequence.

    ``taps[i]`` multiplies ``z**-(offset + i)``; ``kind`` is ``"fir"`` for
    genuinely finite filters and ``"two-sided"`` for truncated expansions of
    rational inverses.
    """

    taps: tuple[complex, ...]
    offset: int = 0
    kind: str = "fir"

    def __len__(self) -> int:
        return len(self.taps)

    @property
    def lags(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.taps))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.taps, dtype=complex)

    def tap(self, k: int) -> complex:
        i = k - self.offset
        if 0 <= i < len(self.taps):
            return self.taps[i]
        return 0.0 + 0.0j

    def freq_response(self, omega):
        """Value of the z-transform on the unit circle, ``z = exp(1j*omega)``."""
        om = np.asarray(omega, dtype=float)
        lags = self.lags
        resp = np.exp(-1j * np.multiply.outer(om, lags)) @ self.as_array()
        if np.ndim(omega) == 0:
            return complex(resp)
        return resp


def localization_coeffs(poles) -> FilterSpec:
    """FIR filter with zeros at exp(pole) for each pole; its N+1 taps
    annihilate every sequence exp(pole*k) in the system's null space."""
    taps = np.array([1.0 + 0.0j])
    for p in poles:
        taps = np.convolve(taps, np.array([1.0, -cmath.exp(complex(p))]))
    return FilterSpec(tuple(taps), offset=0, kind="fir")


@lru_cache(maxsize=128)
def _autocorr_spline(sys: PoleZeroSystem) -> PiecewiseExpPoly:
    return bspline_autocorr(sys)


def discrete_bspline_filter(sys: PoleZeroSystem) -> FilterSpec:
    """Integer samples of the autocorrelation B-spline as a Hermitian kernel.

    The samples at lags +-N vanish by continuity (verified, then dropped), so
    the effective support is ``-(N-1) .. N-1``.  Raises ``RieszViolation`` if
    the kernel is not strictly positive on the frequency grid.
    """
    n = sys.order
    ac = _autocorr_spline(sys)
    taps = np.array([ac(float(k)) for k in range(-n, n + 1)])
    scale = float(np.max(np.abs(taps))) or 1.0
    if max(abs(taps[0]), abs(taps[-1])) > 1e-9 * scale:
        raise RieszViolation("autocorrelation samples do not vanish at lags +-N")
    taps = taps[1:-1]
    # Hermitian symmetry holds exactly in theory; remove float asymmetry.
    asym = np.max(np.abs(taps - np.conj(taps[::-1])))
    if asym > 1e-8 * scale:
        raise RieszViolation(f"kernel lost Hermitian symmetry (asymmetry {asym:g})")
    taps = 0.5 * (taps + np.conj(taps[::-1]))
    spec = FilterSpec(tuple(taps), offset=-(n - 1), kind="fir")

    omega = np.linspace(0.0, 2.0 * np.pi, RIESZ_GRID, endpoint=False)
    vals = spec.freq_response(omega).real
    if vals.min() <= 0.0:
        raise RieszViolation(
            f"discrete kernel not positive on the unit circle (min {vals.min():g})"
        )
    return spec


def spectral_factorize(bl: FilterSpec) -> FilterSpec:
    """Minimum-phase causal factor of a Hermitian positive Laurent kernel.

    Roots are taken from the companion-matrix eigenvalues of the associated
    polynomial; the factor keeps the roots strictly inside the unit circle
    and its gain is fixed by the kernel value atz = 1.  The reconstruction
    residual is checked before returning.
    """
    taps = bl.as_array()
    k = len(taps) // 2
    if len(taps) != 2 * k + 1 or bl.offset != -k:
        raise ValueError("expected a two-sided kernel with symmetric support")
    scale = float(np.max(np.abs(taps))) or 1.0

    if k == 0:
        val = taps[0].real
        if val <= 0:
            raise FactorizationFailure("kernel value at lag 0 is not positive")
        return FilterSpec((complex(math.sqrt(val)),), offset=0, kind="fir")

    roots = np.roots(taps)
    if np.any(np.abs(np.abs(roots) - 1.0) < UNIT_CIRCLE_TOL):
        raise FactorizationFailure("kernel root on the unit circle")
    inside = roots[np.abs(roots) < 1.0]
    if len(inside) != k:
        raise FactorizationFailure(
            f"expected {k} roots inside the unit circle, found {len(inside)}"
        )
    poly = np.poly(inside)
    total = bl.freq_response(0.0).real
    denom = abs(np.polyval(poly, 1.0)) ** 2
    if total <= 0 or denom == 0:
        raise FactorizationFailure("kernel not positive at omega = 0")
    factor = math.sqrt(total / denom) * poly
    if np.max(np.abs(taps.imag)) <= 1e-12 * scale:
        factor = factor.real.astype(complex)

    residual = np.convolve(factor, np.conj(factor[::-1])) - taps
    if np.max(np.abs(residual)) > 1e-9 * max(1.0, scale):
        raise FactorizationFailure(
            f"factor residual {np.max(np.abs(residual)):g} exceeds tolerance"
        )
    return FilterSpec(tuple(factor), offset=0, kind="fir")


def _inv_one_sided(pole_z: complex, x: np.ndarray) -> np.ndarray:
    """Apply the stable inverse of (1 - pole_z * z**-1): a causal recursion
    when the z-pole is inside the unit circle, anti-causal otherwise."""
    x = np.asarray(x, dtype=complex)
    if abs(pole_z) < 1.0:
        return lfilter([1.0], [1.0, -pole_z], x)
    w = 1.0 / pole_z
    rev = lfilter([0.0, -w], [1.0, -w], x[::-1])
    return rev[::-1]


def _inv_advanced(pole_z: complex, x: np.ndarray) -> np.ndarray:
    """Apply the stable inverse of (1 - pole_z * z)."""
    return _inv_one_sided(pole_z, x[::-1])[::-1]


@dataclass(frozen=True)
class InterpolationFilter:
    """Exact all-pole inverse of the discrete kernel, as a cascade of stable
    first-order causal and anti-causal sections."""

    roots: tuple[complex, ...]
    gain: float  # scalar 1 / |c|^2 applied once

    def apply(self, x, pad: int | None = None) -> np.ndarray:
        """Filter a finite signal; the ends are zero-padded internally so the
        recursions settle to the two-sided values."""
        x = np.asarray(x, dtype=complex)
        if pad is None:
            rmax = max((abs(r) for r in self.roots), default=0.0)
            pad = 0 if rmax == 0.0 else int(math.ceil(-35.0 / math.log(rmax)))
        y = np.concatenate([np.zeros(pad, complex), x, np.zeros(pad, complex)])
        for r in self.roots:
            y = lfilter([1.0], [1.0, -r], y)
        for r in self.roots:
            rc = np.conj(r)
            y = lfilter([1.0], [1.0, -rc], y[::-1])[::-1]
        y *= self.gain
        return y[pad : pad + len(x)] if pad else y

    def freq_response(self, omega):
        om = np.asarray(omega, dtype=float)
        resp = np.full(om.shape, self.gain, dtype=complex)
        for r in self.roots:
            resp /= 1.0 - r * np.exp(-1j * om)
            resp /= 1.0 - np.conj(r) * np.exp(1j * om)
        if np.ndim(omega) == 0:
            return complex(resp[()])
        return resp


def interpolation_filter(sys: PoleZeroSystem) -> InterpolationFilter:
    """Prefilter turning integer samples into interpolation coefficients:
    the exact inverse of the discrete kernel of ``discrete_bspline_filter``."""
    bl = discrete_bspline_filter(sys)
    factor = spectral_factorize(bl)
    taps = factor.as_array()
    roots = np.roots(taps) if len(taps) > 1 else np.array([], dtype=complex)
    c = taps[0]
    return InterpolationFilter(tuple(roots), gain=float(1.0 / abs(c) ** 2))


def q_alpha(sys: PoleZeroSystem, tol: float = 1e-12) -> FilterSpec:
    """Two-sided expansion coefficients linking the stationary correlation to
    the autocorrelation B-spline; the inverse of the squared-magnitude
    localization filter applied to the unit impulse, truncated at ``tol``."""
    if sys.n0 > 0:
        raise Unsupported("expansion requires a stationary system (no imaginary poles)")
    rates = np.array([abs(p.real) for p in sys.poles])
    half = int(math.ceil((-math.log(tol) + 25.0) / rates.min())) + 8 * sys.order
    if half > 2_000_000:
        raise Unsupported(
            f"pole decay rate {rates.min():g} is too slow for a practical "
            f"expansion at tol {tol:g}"
        )
    arr = np.zeros(2 * half + 1, dtype=complex)
    arr[half] = 1.0
    for p in sys.poles:
        arr = _inv_one_sided(cmath.exp(p.conjugate()), arr)
        arr = _inv_advanced(cmath.exp(p), arr)
    mags = np.abs(arr)
    keep = np.nonzero(mags >= tol)[0]
    if len(keep) == 0:
        keep = np.array([half])
    reach = max(abs(int(keep[0]) - half), abs(int(keep[-1]) - half))
    taps = arr[half - reach : half + reach + 1]
    taps = 0.5 * (taps + np.conj(taps[::-1]))
    return FilterSpec(tuple(taps), offset=-reach, kind="two-sided")


@lru_cache(maxsize=64)
def _stationary_machinery(sys: PoleZeroSystem, tol: float):
    return q_alpha(sys, tol), _autocorr_spline(sys)


def continuous_autocorr(sys: PoleZeroSystem, var0: float, t, tol: float = 1e-12):
    """Stationary autocorrelation r(t) of the process, for scalar or array
    lags, as the expansion of the autocorrelation B-spline with the
    ``q_alpha`` weights."""
    if sys.n0 > 0:
        raise Unsupported("no stationary autocorrelation exists for imaginary poles")
    q, ac = _stationary_machinery(sys, tol)
    t_arr = np.asarray(t, dtype=float)
    out = np.zeros(t_arr.shape, dtype=complex)
    n = sys.order
    k_lo = max(int(math.floor(t_arr.min())) - n, q.offset)
    k_hi = min(int(math.ceil(t_arr.max())) + n, q.offset + len(q.taps) - 1)
    for k in range(k_lo, k_hi + 1):
        out += q.tap(k) * ac(t_arr - k)
    out *= var0
    if np.ndim(t) == 0:
        return complex(out[()])
    return out


def power_spectrum(sys: PoleZeroSystem, var0: float, omega):
    """Theoretical spectra at (scalar or array) frequency ``omega``.

    Returns ``(phi_u, phi_s)``: the flat-times-kernel spectrum of the
    localized increments, and the spectrum of the sampled process itself.
    ``phi_s`` is ``None`` when the system is non-stationary.
    """
    bl = discrete_bspline_filter(sys)
    phi_u = var0 * bl.freq_response(omega).real
    if sys.n0 > 0:
        return phi_u, None
    d = localization_coeffs(sys.poles)
    om = np.asarray(omega, dtype=float)
    lags = d.lags
    dvals = np.exp(1j * np.multiply.outer(om, lags)) @ d.as_array()
    phi_s = phi_u / np.abs(dvals) ** 2
    if np.ndim(omega) == 0:
        return phi_u, float(phi_s)
    return phi_u, phi_s
