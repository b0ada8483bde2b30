"""Exponential B-splines and Green functions in closed form.

Everything here is a piecewise exponential-polynomial: on each unit knot
interval the function is a finite sum of ``c * t**d * exp(p*t)`` terms.  That
class is closed under the operations we need (convolution with a first-order
kernel, differentiation, integer shifts), so B-splines of any order, with
zeros applied, are built exactly -- no sampled approximation enters the
construction.

Conventions fixed once for the whole package:

* knots are at the integers; a piece on ``[k, k+1)`` owns its left endpoint
  (evaluation is right-continuous, and 0 outside the support);
* the first-order kernel with parameter ``a`` is ``exp(a*t)`` on ``[0, 1)``
  for every complex ``a``;
* poles closer than ``CONFLUENT_TOL`` are treated as exactly repeated, which
  produces ``t**j`` factors instead of ill-conditioned near-cancelling
  residues.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .system import PoleZeroSystem

#: Poles closer than this are merged and handled by the repeated-pole branch.
CONFLUENT_TOL = 1e-9

Term = tuple[complex, int, complex]  # (pole, degree, coeff): coeff * t**degree * exp(pole*t)


def _merge(terms) -> tuple[Term, ...]:
    acc: dict[tuple[complex, int], complex] = {}
    for pole, deg, coeff in terms:
        key = (pole, deg)
        acc[key] = acc.get(key, 0.0) + coeff
    return tuple((p, d, c) for (p, d), c in acc.items() if c != 0.0)


def cluster_poles(poles, tol: float = CONFLUENT_TOL) -> list[complex]:
    """Replace near-coincident poles by a shared representative (the first
    occurrence), so repeated poles compare exactly equal downstream."""
    reps: list[complex] = []
    out = []
    for p in poles:
        p = complex(p)
        for r in reps:
            if abs(p - r) <= tol:
                out.append(r)
                break
        else:
            reps.append(p)
            out.append(p)
    return out


@dataclass(frozen=True)
class PiecewiseExpPoly:
    """Compactly supported piecewise exponential-polynomial.

    ``pieces[i]`` holds the terms valid on ``[t_lo + i, t_lo + i + 1)``; the
    function is identically zero outside ``[t_lo, t_hi]``.  Instances are
    immutable; all operations return new objects.
    """

    t_lo: int
    pieces: tuple[tuple[Term, ...], ...]

    @property
    def t_hi(self) -> int:
        return self.t_lo + len(self.pieces)

    @property
    def support(self) -> tuple[int, int]:
        return (self.t_lo, self.t_hi)

    def __call__(self, t):
        """Evaluate at scalar or array ``t`` (right-continuous at knots)."""
        t_arr = np.asarray(t, dtype=float)
        out = np.zeros(t_arr.shape, dtype=complex)
        idx = np.floor(t_arr).astype(int) - self.t_lo
        for i, terms in enumerate(self.pieces):
            mask = idx == i
            if not mask.any():
                continue
            ts = t_arr[mask]
            val = np.zeros(ts.shape, dtype=complex)
            for pole, deg, coeff in terms:
                val += coeff * ts**deg * np.exp(pole * ts)
            out[mask] = val
        if np.ndim(t) == 0:
            return complex(out[()])
        return out

    def scale(self, c: complex) -> "PiecewiseExpPoly":
        c = complex(c)
        return PiecewiseExpPoly(
            self.t_lo,
            tuple(tuple((p, d, c * a) for p, d, a in terms) for terms in self.pieces),
        )

    def shift(self, h: int) -> "PiecewiseExpPoly":
        """Return ``t -> self(t + h)`` for integer ``h``."""
        if h != int(h):
            raise ValueError("shift must be an integer knot offset")
        h = int(h)
        new_pieces = []
        for terms in self.pieces:
            out = []
            for pole, deg, coeff in terms:
                base = coeff * cmath.exp(pole * h)
                for i in range(deg + 1):
                    out.append((pole, i, base * math.comb(deg, i) * h ** (deg - i)))
            new_pieces.append(_merge(out))
        return PiecewiseExpPoly(self.t_lo - h, tuple(new_pieces))

    def derivative(self) -> "PiecewiseExpPoly":
        """Piecewise classical derivative (right-continuous at knots)."""
        new_pieces = []
        for terms in self.pieces:
            out = []
            for pole, deg, coeff in terms:
                if deg > 0:
                    out.append((pole, deg - 1, coeff * deg))
                if pole != 0.0:
                    out.append((pole, deg, coeff * pole))
            new_pieces.append(_merge(out))
        return PiecewiseExpPoly(self.t_lo, tuple(new_pieces))

    def apply_zero(self, gamma: complex) -> "PiecewiseExpPoly":
        """Apply the first-order operator (d/dt - gamma) piecewise."""
        gamma = complex(gamma)
        new_pieces = []
        for terms in self.pieces:
            out = []
            for pole, deg, coeff in terms:
                if deg > 0:
                    out.append((pole, deg - 1, coeff * deg))
                out.append((pole, deg, coeff * (pole - gamma)))
            new_pieces.append(_merge(out))
        return PiecewiseExpPoly(self.t_lo, tuple(new_pieces))

    def convolve_first_order(self, a: complex) -> "PiecewiseExpPoly":
        """Exact convolution with the first-order kernel ``exp(a*t)`` on [0,1).

        Works per output interval from the piecewise antiderivative of
        ``exp(-a*tau) * f(tau)``; the confluent branch (term pole equal to
        ``a``) integrates the polynomial part directly.
        """
        a = complex(a)
        n = len(self.pieces)
        anti = [self._antiderivative_terms(terms, a) for terms in self.pieces]

        new_pieces = []
        for k_rel in range(n + 1):
            out: list[Term] = []
            s_const = 0.0 + 0.0j
            k_abs = self.t_lo + k_rel
            if k_rel < n:  # contribution of the running integral over piece k
                g = anti[k_rel]
                out.extend(g)
                s_const -= _eval_anti(g, k_abs, a)
            if k_rel > 0:  # contribution of the trailing edge over piece k-1
                g = anti[k_rel - 1]
                for pole, deg, coeff in g:
                    mu = pole - a
                    base = -coeff * cmath.exp(-mu)
                    for i in range(deg + 1):
                        out.append(
                            (pole, i, base * math.comb(deg, i) * (-1.0) ** (deg - i))
                        )
                s_const += _eval_anti(g, k_abs, a)
            out.append((a, 0, s_const))
            new_pieces.append(_merge(out))
        return PiecewiseExpPoly(self.t_lo, tuple(new_pieces))

    @staticmethod
    def _antiderivative_terms(terms, a: complex):
        """Antiderivative of ``exp(-a*tau) * piece(tau)``, stored with the
        output pole already folded back in (terms here are meant to be
        multiplied by ``exp(a*t)``)."""
        out: list[Term] = []
        for pole, deg, coeff in terms:
            if pole == a:
                out.append((pole, deg + 1, coeff / (deg + 1)))
                continue
            mu = pole - a
            fact = coeff
            for j in range(deg + 1):
                out.append((pole, deg - j, fact / mu ** (j + 1)))
                fact *= -(deg - j)
        return _merge(out)


def _eval_anti(terms, tau: float, a: complex) -> complex:
    val = 0.0 + 0.0j
    for pole, deg, coeff in terms:
        val += coeff * tau**deg * cmath.exp((pole - a) * tau)
    return val


def bspline_alpha(poles) -> PiecewiseExpPoly:
    """B-spline of order N for the pole vector: the N-fold convolution of the
    first-order kernels, supported on [0, N]."""
    reps = cluster_poles(poles)
    if not reps:
        raise ValueError("need at least one pole")
    spline = PiecewiseExpPoly(0, (((reps[0], 0, 1.0 + 0.0j),),))
    for a in reps[1:]:
        spline = spline.convolve_first_order(a)
    return spline


def bspline_L(sys: PoleZeroSystem) -> PiecewiseExpPoly:
    """Generating kernel of the system: zeros applied as first-order
    derivative operators to the pole B-spline, scaled by the gain."""
    spline = bspline_alpha(sys.poles)
    for gamma in sys.zeros:
        spline = spline.apply_zero(gamma)
    return spline.scale(sys.gain)


def bspline_autocorr(sys: PoleZeroSystem) -> PiecewiseExpPoly:
    """Autocorrelation kernel conj(b) * b(-.) of the generating kernel.

    Built by parameter concatenation: conjugated and sign-flipped poles and
    zeros feed a single 2N-order construction, which is then recentered onto
    [-N, N].  The result is Hermitian-symmetric.
    """
    n = sys.order
    allpoles = cluster_poles(
        [p.conjugate() for p in sys.poles] + [-p for p in sys.poles]
    )
    spline = bspline_alpha(allpoles)
    for gamma in sys.zeros:
        spline = spline.apply_zero(gamma.conjugate())
        spline = spline.apply_zero(-gamma)
    factor = sys.gain * sys.gain.conjugate() * (-1.0) ** sys.num_zeros
    for p in sys.poles:
        factor *= cmath.exp(p)
    return spline.scale(factor).shift(n)


def eval_spline(spline: PiecewiseExpPoly, t):
    """Value of the spline at ``t`` (scalar or array); right-continuous at
    knots and 0 outside the support."""
    return spline(t)


def _partial_fractions(sys: PoleZeroSystem):
    """Expansion of gain * prod(z - zeros) / prod(z - poles) into terms
    ``c[a][i] / (z - a)**i`` with repeated poles grouped."""
    reps = cluster_poles(sys.poles)
    groups: dict[complex, int] = {}
    for r in reps:
        groups[r] = groups.get(r, 0) + 1

    expansion = []
    for a, mult in groups.items():
        # Truncated Taylor series, around a, of the transfer function with
        # this pole group removed.
        series = np.zeros(mult, dtype=complex)
        series[0] = sys.gain
        for gamma in sys.zeros:
            nxt = np.zeros(mult, dtype=complex)
            nxt += (a - gamma) * series
            nxt[1:] += series[:-1]
            series = nxt
        for b, mult_b in groups.items():
            if b == a:
                continue
            inv = np.zeros(mult, dtype=complex)
            base = a - b
            for j in range(mult):
                binom = math.comb(mult_b + j - 1, j)
                inv[j] = (-1.0) ** j * binom * base ** (-(mult_b + j))
            series = _series_mul(series, inv, mult)
        coeffs = [series[mult - i] for i in range(1, mult + 1)]
        expansion.append((a, coeffs))
    return expansion


def _series_mul(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    for i in range(n):
        out[i] = np.dot(x[: i + 1], y[i::-1])
    return out


def green_function_eval(sys: PoleZeroSystem, t):
    """Impulse response of the system, evaluated at ``t`` (scalar or array).

    Each first-order component contributes a causal branch (poles with
    nonpositive real part, supported on ``t >= 0``) or an anti-causal one
    (supported on ``t < 0``); repeated poles contribute ``t**j`` factors.
    """
    t_arr = np.asarray(t, dtype=float)
    out = np.zeros(t_arr.shape, dtype=complex)
    causal = t_arr >= 0
    for a, coeffs in _partial_fractions(sys):
        mask = causal if a.real <= 0 else ~causal
        sign = 1.0 if a.real <= 0 else -1.0
        if not mask.any():
            continue
        ts = t_arr[mask]
        val = np.zeros(ts.shape, dtype=complex)
        for i, c in enumerate(coeffs, start=1):
            val += c * ts ** (i - 1) / math.factorial(i - 1)
        out[mask] += sign * val * np.exp(a * ts)
    if np.ndim(t) == 0:
        return complex(out[()])
    return out
