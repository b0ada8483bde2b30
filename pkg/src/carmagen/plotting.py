"""Figure rendering for the CLI report paths.

All functions write a PNG next to the delimited output and return the path;
they are optional conveniences -- nothing in the library depends on them.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .expspline import bspline_L, bspline_autocorr
from .filters import discrete_bspline_filter, localization_coeffs, power_spectrum
from .generators import Realization
from .system import PoleZeroSystem


def plot_realization(real: Realization, path: str, title: str = "") -> str:
    fig, ax = plt.subplots(figsize=(9, 3.2))
    k = np.arange(len(real.samples))
    ax.plot(k, real.samples.real, lw=0.8, color="C0")
    if np.max(np.abs(real.samples.imag)) > 1e-9 * max(1.0, np.max(np.abs(real.samples.real))):
        ax.plot(k, real.samples.imag, lw=0.8, color="C1", label="imag")
        ax.legend(loc="upper right", fontsize=8)
    if real.knots is not None and len(real.knots[0]):
        times, _ = real.knots
        inside = times[(times >= 0) & (times <= len(real.samples) - 1)]
        ax.plot(inside, np.interp(inside, k, real.samples.real), ".", ms=3, color="C3")
    ax.set_xlabel("k")
    ax.set_ylabel("s[k]")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_bsplines(sys: PoleZeroSystem, path: str, grid_step: float = 0.01) -> str:
    bl = bspline_L(sys)
    ac = bspline_autocorr(sys)
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.0))
    for ax, spline, label in ((axes[0], bl, "generating kernel"),
                              (axes[1], ac, "autocorrelation kernel")):
        lo, hi = spline.support
        t = np.arange(lo - 0.5, hi + 0.5, grid_step)
        v = np.asarray(spline(t))
        ax.plot(t, v.real, lw=1.0)
        if np.max(np.abs(v.imag)) > 1e-9:
            ax.plot(t, v.imag, lw=1.0, ls="--")
        ax.axhline(0.0, color="k", lw=0.4)
        ax.set_title(label, fontsize=9)
        ax.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_filters(sys: PoleZeroSystem, path: str, grid_points: int = 512) -> str:
    d = localization_coeffs(sys.poles)
    bl = discrete_bspline_filter(sys)
    omega = np.linspace(0.0, np.pi, grid_points)
    phi_u, phi_s = power_spectrum(sys, 1.0, omega)
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.0))
    axes[0].stem(d.lags, np.asarray(d.taps).real)
    axes[0].set_title("localization taps", fontsize=9)
    axes[1].stem(bl.lags, np.asarray(bl.taps).real)
    axes[1].set_title("discrete kernel taps", fontsize=9)
    axes[2].plot(omega, phi_u, label="increments")
    if phi_s is not None:
        axes[2].semilogy(omega, phi_s, label="process")
    axes[2].legend(fontsize=8)
    axes[2].set_title("power spectra (unit variance)", fontsize=9)
    axes[2].set_xlabel("omega")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_reports(reports, path: str) -> str:
    """One panel per report: estimates with error bars against theory."""
    reports = [r for r in reports if r.theory is not None and r.estimate.size > 1]
    n = max(1, len(reports))
    fig, axes = plt.subplots(1, n, figsize=(4 * n, 3.0), squeeze=False)
    for ax, rep in zip(axes[0], reports):
        k = np.arange(rep.estimate.size)
        err = rep.stderr if rep.stderr is not None else None
        ax.errorbar(k, rep.estimate.real, yerr=None if err is None else 3 * err,
                    fmt="o", ms=3, capsize=2, label="estimate")
        ax.plot(k, np.asarray(rep.theory).real, "x", ms=5, color="C3", label="theory")
        ax.set_title(f"{rep.name} [{'PASS' if rep.passed else 'FAIL'}]", fontsize=9)
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
