"""Report figures (matplotlib, non-interactive backend)."""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .symbol import circle_grid, symbol_values  # noqa: E402
from .wfa import difference, series  # noqa: E402

__all__ = ["plot_singular_numbers", "plot_error_modulus", "plot_coefficients", "write_reduction_figures"]


def plot_singular_numbers(D, k, path):
    """Hankel singular numbers on a log scale, target index highlighted."""
    D = np.asarray(D)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    idx = np.arange(D.size)
    ax.semilogy(idx, D, "o-", color="0.3", label="singular numbers")
    ax.semilogy([k], [D[k]], "o", color="C3", ms=9, label=f"sigma_{k} = {D[k]:.4g}")
    ax.set_xlabel("index")
    ax.set_ylabel("Hankel singular number")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_error_modulus(errors, sigma, path, samples=1000):
    """``|e(e^{i theta})|`` for each labelled error automaton.

    Parameters
    ----------
    errors : dict
        Label to ``(Wfa, constant)``; the curve is ``|symbol - constant|``.
    sigma : float
        Reference level drawn as a dashed line.
    """
    theta, zs = circle_grid(samples)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for label, (W, c) in errors.items():
        ax.plot(theta, np.abs(symbol_values(W, zs) - c), label=label)
    ax.axhline(sigma, ls="--", color="k", lw=0.8, label="sigma_k")
    ax.set_xlabel("theta")
    ax.set_ylabel("|error symbol|")
    ax.set_xlim(0, 2 * np.pi)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_coefficients(original, approximations, path, terms=40):
    """Series ``f(j)`` of the input and each approximation."""
    j = np.arange(terms)
    fig, (ax, ax2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    f = series(original, terms)
    ax.plot(j, f, "k.-", label="input")
    for label, W in approximations.items():
        ax.plot(j, series(W, terms), ".--", label=label)
        ax2.semilogy(j, np.abs(series(difference(original, W), terms)) + 1e-300, ".-", label=label)
    ax.set_ylabel("f(j)")
    ax.legend()
    ax2.set_ylabel("|f(j) - g(j)|")
    ax2.set_xlabel("j")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_reduction_figures(S, report, directory, truncated=None):
    """Write the three standard figures of a reduction; returns the paths."""
    os.makedirs(directory, exist_ok=True)
    paths = {
        "singular_numbers": os.path.join(directory, "singular_numbers.png"),
        "error_modulus": os.path.join(directory, "error_modulus.png"),
        "coefficients": os.path.join(directory, "coefficients.png"),
    }
    plot_singular_numbers(S.singular_numbers, report.k, paths["singular_numbers"])
    E = report.error_wfa
    errors = {"optimal": (E.wfa, E.constant)}
    approx = {"optimal": report.reduced}
    if truncated is not None:
        errors["truncation"] = (difference(S.wfa, truncated), 0.0)
        approx["truncation"] = truncated
    plot_error_modulus(errors, report.sigma_k, paths["error_modulus"])
    plot_coefficients(S.wfa, approx, paths["coefficients"])
    return paths
