"""Pole/zero description of the differential system driving a process.

A system is the pair (poles, zeros) of a strictly proper rational transfer
function together with a gain.  Poles on the imaginary axis make the process
non-stationary; there may be ``n0`` of them and they are always stored last so
that downstream inverse operators apply the shift-variant steps in a fixed,
reproducible order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import OrderViolation, RieszViolation

TWO_PI = 2.0 * math.pi

#: Poles with |Re| below this are classified as purely imaginary.
DEFAULT_IMAGINARY_TOL = 1e-12

#: Two imaginary poles whose frequency gap is within this distance of a
#: nonzero multiple of 2*pi make the integer-shift family degenerate.
RIESZ_TOL = 1e-9


@dataclass(frozen=True)
class PoleZeroSystem:
    """Immutable (poles; zeros) system description.

    Attributes
    ----------
    poles : tuple of complex
        Roots of the characteristic polynomial, with the ``n0``
        purely-imaginary ones last.
    zeros : tuple of complex
        Roots of the driving polynomial; strictly fewer than poles.
    gain : complex
        Leading coefficient of the driving polynomial (1 when there are no
        zeros and the drive is the bare innovation).
    n0 : int
        Number of purely-imaginary poles (the degree of non-stationarity).
    step : float
        Sampling step this description corresponds to.  All discrete
        machinery operates on the unit grid of the system at hand;
        ``rescale_system`` is the one place where a different step enters.
    is_real : bool
        True when pole and zero multisets are closed under conjugation and
        the gain is real, i.e. the process is real-valued.
    """

    poles: tuple[complex, ...]
    zeros: tuple[complex, ...] = ()
    gain: complex = 1.0 + 0.0j
    n0: int = 0
    step: float = 1.0
    is_real: bool = True

    @property
    def order(self) -> int:
        """Number of poles N."""
        return len(self.poles)

    @property
    def num_zeros(self) -> int:
        """Number of zeros M (< N)."""
        return len(self.zeros)

    @property
    def stationary(self) -> bool:
        return self.n0 == 0

    def imaginary_frequencies(self) -> np.ndarray:
        """Frequencies w_m of the trailing imaginary poles, in stored order."""
        return np.array([p.imag for p in self.poles[self.order - self.n0:]])


def _conjugate_closed(values: tuple[complex, ...], tol: float) -> bool:
    pool = list(values)
    while pool:
        v = pool.pop()
        if abs(v.imag) <= tol:
            continue
        target = v.conjugate()
        for i, w in enumerate(pool):
            if abs(w - target) <= max(tol, 1e-9 * max(1.0, abs(v))):
                pool.pop(i)
                break
        else:
            return False
    return True


def build_system(
    poles,
    zeros=(),
    gain=1.0,
    imaginary_tolerance: float = DEFAULT_IMAGINARY_TOL,
    step: float = 1.0,
) -> PoleZeroSystem:
    """Validate and canonicalize a pole/zero system.

    Poles are reordered so that the purely-imaginary ones (|Re| within
    ``imaginary_tolerance``) come last; the relative order within each group
    is preserved, so the operation is idempotent and never changes the pole
    multiset.

    Raises
    ------
    OrderViolation
        If there is no pole, or the zero count is not strictly smaller than
        the pole count.
    RieszViolation
        If two imaginary poles differ by a nonzero multiple of 2*pi, which
        would make the integer shifts of the associated kernel degenerate.
    """
    poles = [complex(p) for p in poles]
    zeros = tuple(complex(z) for z in zeros)
    if not poles:
        raise OrderViolation("a system needs at least one pole")
    if len(zeros) >= len(poles):
        raise OrderViolation(
            f"need strictly fewer zeros than poles, got M={len(zeros)}, N={len(poles)}"
        )

    regular = [p for p in poles if abs(p.real) > imaginary_tolerance]
    imaginary = [complex(0.0, p.imag) for p in poles if abs(p.real) <= imaginary_tolerance]

    for i, wi in enumerate(imaginary):
        for wj in imaginary[i + 1:]:
            gap = wi.imag - wj.imag
            k = round(gap / TWO_PI)
            if k != 0 and abs(gap - TWO_PI * k) < RIESZ_TOL:
                raise RieszViolation(
                    f"imaginary poles at {wi.imag:g} and {wj.imag:g} differ by "
                    f"{k}*2*pi; the shift family is degenerate"
                )

    ordered = tuple(regular + imaginary)
    is_real = (
        _conjugate_closed(ordered, imaginary_tolerance)
        and _conjugate_closed(zeros, imaginary_tolerance)
        and abs(complex(gain).imag) <= imaginary_tolerance
    )
    return PoleZeroSystem(
        poles=ordered,
        zeros=zeros,
        gain=complex(gain),
        n0=len(imaginary),
        step=float(step),
        is_real=is_real,
    )


def rescale_system(sys: PoleZeroSystem, T: float) -> PoleZeroSystem:
    """Unit-step-equivalent system for sampling step ``T``.

    The returned system, generated on its own unit grid, has the same law as
    the input system sampled every ``T`` time units: poles and zeros are
    multiplied by ``T`` and the gain by ``T**(N - M - 1)``.  The innovation
    parameters must be scaled as well (``rescale_innovation``), since the
    noise intensity per sample grows linearly with the step.
    """
    if T <= 0:
        raise ValueError(f"sampling step must be positive, got {T}")
    scaled = build_system(
        [p * T for p in sys.poles],
        [z * T for z in sys.zeros],
        gain=sys.gain * T ** (sys.order - sys.num_zeros - 1),
        step=T,
    )
    return replace(scaled, is_real=sys.is_real and scaled.is_real)
