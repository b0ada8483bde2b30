"""Empirical estimators and theory-vs-simulation comparisons.

Every estimator returns a :class:`StatReport` carrying the estimates, their
standard errors (or confidence bands), the theoretical reference when one was
supplied, and a pass flag determined solely by the documented rule -- the
reports are what the validation CLI serializes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import chi2

from .filters import discrete_bspline_filter
from .system import PoleZeroSystem


@dataclass(frozen=True)
class StatReport:
    """Outcome of one empirical check."""

    name: str
    estimate: np.ndarray
    stderr: Optional[np.ndarray] = None
    theory: Optional[np.ndarray] = None
    passed: Optional[bool] = None
    threshold: str = ""
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def conv(x):
            if isinstance(x, np.ndarray):
                if np.iscomplexobj(x):
                    return [[float(v.real), float(v.imag)] for v in x]
                return [float(v) for v in x]
            if isinstance(x, (np.floating, np.integer)):
                return float(x)
            if isinstance(x, complex):
                return [x.real, x.imag]
            return x

        return {
            "name": self.name,
            "estimate": conv(self.estimate),
            "stderr": conv(self.stderr),
            "theory": conv(self.theory),
            "passed": self.passed,
            "threshold": self.threshold,
            "details": {k: conv(v) for k, v in self.details.items()},
        }


def _jackknife_mean(z: np.ndarray, n_blocks: int) -> tuple[complex, float]:
    """Mean of a (serially dependent) sequence with its delete-block
    jackknife standard error."""
    n = len(z)
    n_blocks = max(2, min(n_blocks, n))
    edges = np.linspace(0, n, n_blocks + 1).astype(int)
    total = z.sum()
    theta = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b == a:
            continue
        theta.append((total - z[a:b].sum()) / (n - (b - a)))
    theta = np.asarray(theta)
    b_eff = len(theta)
    center = theta.mean()
    se = np.sqrt((b_eff - 1) / b_eff * np.sum(np.abs(theta - center) ** 2))
    return complex(total / n), float(se)


def empirical_autocorr(
    x,
    maxlag: int,
    sys: Optional[PoleZeroSystem] = None,
    var0: Optional[float] = None,
    n_blocks: int = 200,
    n_sigma: float = 3.0,
) -> StatReport:
    """Biased sample autocovariance up to ``maxlag`` with jackknife standard
    errors; compared lag by lag against ``var0`` times the kernel samples
    when a system is supplied (pass iff every lag is within ``n_sigma``
    standard errors)."""
    x = np.asarray(x)
    n = len(x)
    if n <= maxlag * 4:
        raise ValueError("signal too short for the requested number of lags")
    x = x - x.mean()
    est = np.empty(maxlag + 1, dtype=complex)
    se = np.empty(maxlag + 1)
    for k in range(maxlag + 1):
        z = x[: n - k] * np.conj(x[k:])
        mean, se_k = _jackknife_mean(z, n_blocks)
        # biased normalization: divide the lag-k sum by n, not n - k
        est[k] = mean * (n - k) / n
        se[k] = se_k * (n - k) / n

    theory = None
    passed = None
    details = {"n": n, "maxlag": maxlag, "n_blocks": n_blocks}
    if sys is not None:
        if var0 is None:
            raise ValueError("theory comparison needs var0")
        bl = discrete_bspline_filter(sys)
        theory = np.array([var0 * bl.tap(k) for k in range(maxlag + 1)])
        diff = np.abs(est - theory)
        passed = bool(np.all(diff <= n_sigma * se))
        details["abs_diff"] = diff
        details["diff_over_se"] = diff / se
    return StatReport(
        name="autocovariance",
        estimate=est,
        stderr=se,
        theory=theory,
        passed=passed,
        threshold=f"|estimate - theory| <= {n_sigma:g} SE at every lag",
        details=details,
    )


def empirical_charfn(
    samples,
    omegas,
    theory=None,
    n_boot: int = 500,
    level: float = 0.99,
    rng: Optional[np.random.Generator] = None,
) -> StatReport:
    """Empirical joint characteristic function of K-tuples with bootstrap
    percentile bands.

    ``samples`` is an (n, K) matrix of tuples (rows are treated as i.i.d.;
    draw them with a stride larger than the dependence range), ``omegas`` a
    list of K-vectors.  When theory values are given, the check passes iff
    both real and imaginary parts lie inside their bands at every frequency.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] < 10_000:
        raise ValueError("need at least 1e4 tuples for a meaningful band")
    omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
    if omegas.shape[1] != samples.shape[1]:
        raise ValueError("frequency vectors must match the tuple length")
    if rng is None:
        rng = np.random.default_rng(0)
    n = samples.shape[0]
    phases = np.exp(1j * samples @ omegas.T)  # (n, n_omega)
    est = phases.mean(axis=0)

    lo_q, hi_q = 50.0 * (1.0 - level), 50.0 * (1.0 + level)
    boot = np.empty((n_boot, omegas.shape[0]), dtype=complex)
    for b in range(n_boot):
        idx = rng.integers(0, n, size=n)
        boot[b] = phases[idx].mean(axis=0)
    band_re = np.percentile(boot.real, [lo_q, hi_q], axis=0)
    band_im = np.percentile(boot.imag, [lo_q, hi_q], axis=0)

    theory_arr = None
    passed = None
    if theory is not None:
        theory_arr = np.asarray(theory, dtype=complex)
        ok_re = (band_re[0] <= theory_arr.real) & (theory_arr.real <= band_re[1])
        ok_im = (band_im[0] <= theory_arr.imag) & (theory_arr.imag <= band_im[1])
        passed = bool(np.all(ok_re & ok_im))
    se = boot.std(axis=0)
    return StatReport(
        name="characteristic-function",
        estimate=est,
        stderr=se,
        theory=theory_arr,
        passed=passed,
        threshold=f"theory inside the {level:.0%} bootstrap band at every point",
        details={
            "n_tuples": n,
            "n_boot": n_boot,
            "band_re_lo": band_re[0],
            "band_re_hi": band_re[1],
            "band_im_lo": band_im[0],
            "band_im_hi": band_im[1],
        },
    )


def whiteness_check(
    e,
    n_segments: int = 32,
    alpha: float = 0.01,
) -> StatReport:
    """Segment-averaged periodogram flatness test.

    The periodogram is averaged over ``n_segments`` disjoint segments; under
    whiteness the normalized dispersion of the averaged ordinates around
    their mean is chi-square with one degree of freedom per ordinate (minus
    one for the estimated level).  Passes iff the statistic stays below the
    ``1 - alpha`` quantile.
    """
    e = np.asarray(e)
    n = len(e)
    if n < 2**14:
        raise ValueError("need at least 2**14 samples for the flatness test")
    seg = n // n_segments
    x = e[: seg * n_segments].reshape(n_segments, seg)
    x = x - x.mean(axis=1, keepdims=True)
    spec = np.abs(np.fft.fft(x, axis=1)) ** 2 / seg
    ords = spec[:, 1 : (seg + 1) // 2].mean(axis=0)
    mean_level = ords.mean()
    stat = n_segments * np.sum((ords / mean_level - 1.0) ** 2)
    df = len(ords) - 1
    threshold = float(chi2.ppf(1.0 - alpha, df))
    passed = bool(stat <= threshold)
    return StatReport(
        name="whiteness",
        estimate=np.array([stat]),
        theory=np.array([float(df)]),
        passed=passed,
        threshold=f"chi-square({df}) statistic <= {threshold:.1f} (alpha={alpha:g})",
        details={
            "n_segments": n_segments,
            "segment_length": seg,
            "statistic": float(stat),
            "quantile": threshold,
        },
    )
