"""Innovation families: Lévy exponents, samplers, characteristic functions.

Three families are supported -- Gaussian, compound Poisson (impulsive), and
symmetric alpha-stable -- each identified by the log-characteristic function
f of its canonical unit-window observation, with f(0) = 0.  The joint
characteristic functions of localized increments and of the sampled process
are evaluated by adaptive panel quadrature of f composed with the analytic
kernels, which is what the empirical estimators are validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np

from .errors import QuadratureFailure, Unsupported
from .expspline import PiecewiseExpPoly, bspline_L, green_function_eval
from .system import PoleZeroSystem

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


def _adaptive_panel(f, a: float, b: float, tol: float, depth: int = 0) -> complex:
    mid = 0.5 * (a + b)
    whole = _gl(f, a, b)
    split = _gl(f, a, mid) + _gl(f, mid, b)
    if abs(whole - split) <= tol or (b - a) < 1e-13:
        return split
    if depth >= 40:
        raise QuadratureFailure(
            f"panel [{a:g}, {b:g}] did not converge (residual {abs(whole - split):g})"
        )
    half = 0.5 * tol
    return _adaptive_panel(f, a, mid, half, depth + 1) + _adaptive_panel(
        f, mid, b, half, depth + 1
    )


def _gl(f, a: float, b: float) -> complex:
    h = 0.5 * (b - a)
    x = 0.5 * (a + b) + h * _GL_NODES
    return complex(h * np.sum(_GL_WEIGHTS * f(x)))


def integrate_panels(f, knots, tol: float = 1e-10) -> complex:
    """Adaptive Gauss quadrature over consecutive panels between knots."""
    knots = np.asarray(knots, dtype=float)
    per_panel = tol / max(1, len(knots) - 1)
    total = 0.0 + 0.0j
    for a, b in zip(knots[:-1], knots[1:]):
        total += _adaptive_panel(f, float(a), float(b), per_panel)
    return total


# ---------------------------------------------------------------------------
# Amplitude laws for the impulsive family


@dataclass(frozen=True)
class AmplitudeLaw:
    """Sampler plus density descriptor of the impulse amplitude distribution.

    ``charfn`` (the Fourier transform of the density) is used when available;
    otherwise it is obtained by quadrature of the density over ``support``.
    """

    name: str
    sample: Callable[[np.random.Generator, int], np.ndarray]
    density: Optional[Callable[[np.ndarray], np.ndarray]] = None
    charfn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    support: tuple[float, float] = (-15.0, 15.0)
    second_moment: Optional[float] = None

    def char(self, omega):
        om = np.asarray(omega, dtype=float)
        if self.charfn is not None:
            out = np.asarray(self.charfn(om), dtype=complex)
        else:
            if self.density is None:
                raise ValueError("amplitude law needs a charfn or a density")
            out = np.array(
                [
                    integrate_panels(
                        lambda a, w=w: np.exp(1j * a * w) * self.density(a),
                        np.linspace(self.support[0], self.support[1], 31),
                        tol=1e-12,
                    )
                    for w in np.atleast_1d(om)
                ]
            ).reshape(om.shape)
        return out

    def moment2(self) -> float:
        if self.second_moment is not None:
            return self.second_moment
        if self.density is None:
            raise ValueError("amplitude law needs a second_moment or a density")
        val = integrate_panels(
            lambda a: a * a * self.density(a),
            np.linspace(self.support[0], self.support[1], 31),
            tol=1e-12,
        )
        return float(val.real)


def normal_amplitude() -> AmplitudeLaw:
    """Standard normal impulse amplitudes."""
    return AmplitudeLaw(
        name="normal",
        sample=lambda rng, size: rng.standard_normal(size),
        density=lambda a: np.exp(-0.5 * a * a) / math.sqrt(2.0 * math.pi),
        charfn=lambda om: np.exp(-0.5 * om * om),
        second_moment=1.0,
    )


# ---------------------------------------------------------------------------
# Innovation specifications


@dataclass(frozen=True)
class GaussianInnovation:
    b2: float

    def __post_init__(self):
        if self.b2 <= 0:
            raise ValueError("b2 must be positive")


@dataclass(frozen=True)
class CompoundPoissonInnovation:
    rate: float
    amplitude: AmplitudeLaw

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("rate must be nonnegative")


@dataclass(frozen=True)
class SasInnovation:
    alpha: float
    b_alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError("alpha must lie in (0, 2]")
        if self.b_alpha <= 0:
            raise ValueError("b_alpha must be positive")


InnovationSpec = Union[GaussianInnovation, CompoundPoissonInnovation, SasInnovation]


def levy_exponent(spec: InnovationSpec, omega):
    """Log-characteristic function f(omega) of the unit-window observation;
    f(0) = 0 for every family.  ``omega`` is real (scalar or array)."""
    om = np.asarray(omega, dtype=float)
    if isinstance(spec, GaussianInnovation):
        out = -spec.b2 * np.abs(om) ** 2 + 0.0j
    elif isinstance(spec, SasInnovation):
        out = -spec.b_alpha * np.abs(om) ** spec.alpha + 0.0j
    elif isinstance(spec, CompoundPoissonInnovation):
        out = spec.rate * (spec.amplitude.char(om) - 1.0)
    else:
        raise TypeError(f"unknown innovation spec {spec!r}")
    if np.ndim(omega) == 0:
        return complex(out)
    return out


def innovation_variance(spec: InnovationSpec) -> Optional[float]:
    """Variance of the unit-window observation, i.e. -f''(0): 2*b2 for the
    Gaussian family, rate * E[a^2] for the impulsive one.  ``None`` for
    alpha-stable laws with alpha < 2, whose second moments diverge."""
    if isinstance(spec, GaussianInnovation):
        return 2.0 * spec.b2
    if isinstance(spec, CompoundPoissonInnovation):
        return spec.rate * spec.amplitude.moment2()
    if isinstance(spec, SasInnovation):
        if spec.alpha == 2.0:
            return 2.0 * spec.b_alpha
        return None
    raise TypeError(f"unknown innovation spec {spec!r}")


def rescale_innovation(spec: InnovationSpec, T: float) -> InnovationSpec:
    """Innovation parameters for a unit grid standing in for step ``T``: the
    noise intensity per sample grows linearly with the step."""
    if T <= 0:
        raise ValueError("step must be positive")
    if isinstance(spec, GaussianInnovation):
        return replace(spec, b2=spec.b2 * T)
    if isinstance(spec, CompoundPoissonInnovation):
        return replace(spec, rate=spec.rate * T)
    if isinstance(spec, SasInnovation):
        return replace(spec, b_alpha=spec.b_alpha * T)
    raise TypeError(f"unknown innovation spec {spec!r}")


# ---------------------------------------------------------------------------
# Samplers


def sas_standard(alpha: float, rng: np.random.Generator, size) -> np.ndarray:
    """Standard symmetric alpha-stable variates (charfn exp(-|w|^alpha)) by
    the trigonometric transform of a uniform angle and an exponential."""
    u = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, size)
    w = rng.standard_exponential(size)
    if alpha == 1.0:
        return np.tan(u)
    return (
        np.sin(alpha * u)
        / np.cos(u) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha)
    )


@dataclass(frozen=True)
class InnovationDraw:
    """One realization of the innovation over a window.

    Grid families fill ``values`` (``values[i]`` observes
    ``[a + i*step, a + (i+1)*step)``); the impulsive family fills the knot
    arrays instead.
    """

    kind: str
    window: tuple[float, float]
    grid_step: Optional[float] = None
    values: Optional[np.ndarray] = None
    knot_times: Optional[np.ndarray] = None
    knot_amps: Optional[np.ndarray] = None


def grid_sampler(spec: InnovationSpec, step: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """I.i.d. observations of the innovation through windows of width
    ``step``: variance scales with the step for the finite-variance families,
    the stable scale with step**(1/alpha)."""
    if isinstance(spec, GaussianInnovation):
        return rng.normal(0.0, math.sqrt(2.0 * spec.b2 * step), size)
    if isinstance(spec, SasInnovation):
        return (spec.b_alpha * step) ** (1.0 / spec.alpha) * sas_standard(
            spec.alpha, rng, size
        )
    if isinstance(spec, CompoundPoissonInnovation):
        counts = rng.poisson(spec.rate * step, size)
        total = int(counts.sum())
        out = np.zeros(size)
        if total:
            amps = spec.amplitude.sample(rng, total)
            np.add.at(out, np.repeat(np.arange(size), counts), amps)
        return out
    raise TypeError(f"unknown innovation spec {spec!r}")


def draw_innovations(
    spec: InnovationSpec,
    window: tuple[float, float],
    grid_step: float,
    rng: np.random.Generator,
) -> InnovationDraw:
    """Draw one innovation realization over ``window``.

    Gaussian and alpha-stable innovations come as i.i.d. grid observations;
    the impulsive family comes as a knot list (uniform locations, count drawn
    from the Poisson law of the window, i.i.d. amplitudes).
    """
    a, b = window
    if not b > a:
        raise ValueError("window must have positive length")
    if isinstance(spec, CompoundPoissonInnovation):
        count = int(rng.poisson(spec.rate * (b - a)))
        times = np.sort(rng.uniform(a, b, count))
        amps = spec.amplitude.sample(rng, count)
        return InnovationDraw(
            kind="poisson", window=window, knot_times=times, knot_amps=amps
        )
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    size = int(round((b - a) / grid_step))
    values = grid_sampler(spec, grid_step, rng, size)
    kind = "gaussian" if isinstance(spec, GaussianInnovation) else "sas"
    return InnovationDraw(kind=kind, window=window, grid_step=grid_step, values=values)


# ---------------------------------------------------------------------------
# Characteristic functions


@lru_cache(maxsize=128)
def _generating_kernel(sys: PoleZeroSystem) -> PiecewiseExpPoly:
    return bspline_L(sys)


def _real_profile(values: np.ndarray, what: str) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(values.real))))
    if np.max(np.abs(values.imag)) > 1e-9 * scale:
        raise Unsupported(
            f"{what} is complex-valued; characteristic functions are defined "
            "for real-valued kernels only"
        )
    return values.real


def charfn_increment(
    spec: InnovationSpec,
    sys: PoleZeroSystem,
    omega_vec,
    tol: float = 1e-10,
) -> complex:
    """Joint characteristic function of K consecutive localized increments,
    evaluated at the real vector ``omega_vec``."""
    omega_vec = np.atleast_1d(np.asarray(omega_vec, dtype=float))
    k_count = len(omega_vec)
    if k_count < 1:
        raise ValueError("need at least one frequency")
    kernel = _generating_kernel(sys)
    n = sys.order
    probe = np.linspace(0.0, n, 64 * n + 1)
    _real_profile(np.asarray(kernel(probe)), "generating kernel")

    def phi(t):
        acc = np.zeros(np.shape(t))
        for idx, w in enumerate(omega_vec, start=1):
            if w != 0.0:
                acc = acc + w * np.asarray(kernel(idx - 1 - np.asarray(t))).real
        return acc

    def integrand(t):
        return levy_exponent(spec, phi(t))

    knots = np.arange(-n, k_count)
    val = integrate_panels(integrand, knots, tol=tol)
    return complex(np.exp(val))


def charfn_sampled_process(
    spec: InnovationSpec,
    sys: PoleZeroSystem,
    omega_vec,
    tol: float = 1e-10,
    envelope_tol: float = 1e-12,
) -> complex:
    """Joint characteristic function of K consecutive samples of the
    stationary process itself, by quadrature against the impulse response."""
    if sys.n0 > 0:
        raise Unsupported("sampled-process characteristic function needs a "
                          "stationary system")
    omega_vec = np.atleast_1d(np.asarray(omega_vec, dtype=float))
    k_count = len(omega_vec)
    if k_count < 1:
        raise ValueError("need at least one frequency")
    rate = min(abs(p.real) for p in sys.poles)
    probe = np.linspace(-2.0 * sys.order, 2.0 * sys.order, 256)
    rho_probe = _real_profile(np.asarray(green_function_eval(sys, probe)), "impulse response")
    peak = max(1.0, float(np.max(np.abs(rho_probe))))
    reach = int(math.ceil((-math.log(envelope_tol) + math.log(peak) + 5.0) / rate)) + sys.order

    def phi(t):
        acc = np.zeros(np.shape(t))
        for idx, w in enumerate(omega_vec, start=1):
            if w != 0.0:
                acc = acc + w * np.asarray(
                    green_function_eval(sys, idx - 1 - np.asarray(t))
                ).real
        return acc

    def integrand(t):
        return levy_exponent(spec, phi(t))

    knots = np.arange(-reach, k_count - 1 + reach + 1)
    val = integrate_panels(integrand, knots, tol=tol)
    return complex(np.exp(val))
