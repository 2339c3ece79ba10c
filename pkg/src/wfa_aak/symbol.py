"""Complex-function view of an automaton.

The symbol of ``<alpha, A, beta>`` is ``phi(z) = alpha^T (z - A)^{-1} beta``
whose Laurent coefficient of ``z^{-(m+1)}`` is ``f(m)``.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import DEFAULT
from .errors import NearPole, NearZeroDenominator, NumericalError
from .wfa import evaluate

__all__ = [
    "CircleSample",
    "circle_grid",
    "symbol_eval",
    "symbol_values",
    "fourier_coefficient",
    "SchmidtPair",
    "schmidt_functions",
    "error_ratio",
    "error_symbol",
    "UnimodularityResult",
    "unimodularity_check",
    "Pole",
    "pole_report",
]

COND_WARN = 1e8


@dataclass(frozen=True)
class CircleSample:
    theta: float
    z: complex


def circle_grid(samples):
    """Equispaced points ``exp(i theta)``, ``theta = 2 pi l / samples``."""
    theta = 2.0 * np.pi * np.arange(int(samples)) / int(samples)
    return theta, np.exp(1j * theta)


def _check_pole(A, z, tol):
    if A.shape[0] == 0:
        return
    lam = np.linalg.eigvals(A)
    d = np.abs(lam - z).min()
    if d <= tol.pole * max(1.0, abs(z)):
        raise NearPole(f"z={z} is within {d:.3g} of an eigenvalue")


def symbol_eval(W, z, *, tol=DEFAULT):
    """``alpha^T (z I - A)^{-1} beta`` by one linear solve.

    Examples
    --------
    >>> from wfa_aak.wfa import example1
    >>> round(symbol_eval(example1(), 2.0).real, 12)
    0.4

    Raises
    ------
    NearPole
    """
    z = complex(z)
    if W.n == 0:
        return 0j
    _check_pole(W.A, z, tol)
    M = z * np.eye(W.n) - W.A
    cond = np.linalg.cond(M)
    if cond > COND_WARN:
        warnings.warn(f"resolvent condition number {cond:.3g} at z={z}", RuntimeWarning, stacklevel=2)
    return complex(W.alpha @ np.linalg.solve(M, W.beta.astype(complex)))


def symbol_values(W, zs):
    """Vectorised :func:`symbol_eval` over an array of points (no pole check).

    One complex Schur factorisation ``A = Z T Z^H`` is shared by all points;
    each resolvent solve is then a triangular back-substitution.
    """
    zs = np.asarray(zs, dtype=complex).reshape(-1)
    if W.n == 0:
        return np.zeros(zs.size, dtype=complex)
    T, Z = scipy.linalg.schur(W.A.astype(complex), output="complex")
    c = Z.conj().T @ W.beta
    a = W.alpha @ Z
    n = W.n
    Y = np.empty((n, zs.size), dtype=complex)
    for i in range(n - 1, -1, -1):
        Y[i] = (c[i] + T[i, i + 1 :] @ Y[i + 1 :]) / (zs - T[i, i])
    return a @ Y


def fourier_coefficient(W, m):
    """Coefficient of ``z^m`` (``m <= -1``) of the symbol, i.e. ``f(-m-1)``."""
    m = int(m)
    if m > -1:
        raise ValueError("only negative Fourier coefficients are defined here")
    return evaluate(W, -m - 1)


@dataclass(frozen=True, eq=False)
class SchmidtPair:
    """Generating functions of the singular vectors for ``sigma``.

    ``xi(z) = sigma^{-1/2} alpha^T (1 - z A)^{-1} V w`` (power series in ``z``),
    ``eta(z) = sigma^{-1/2} w^T V^T (z - A)^{-1} beta`` (series in ``1/z``),
    where ``V`` selects the coordinates of the singular number's group and
    ``w`` is a unit vector in the group.
    """

    wfa: object
    sigma: float
    column: np.ndarray

    def xi(self, z, *, tol=DEFAULT):
        W = self.wfa
        z = complex(z)
        M = np.eye(W.n) - z * W.A
        if z != 0:
            _check_pole(W.A, 1.0 / z, tol)
        return complex(W.alpha @ np.linalg.solve(M, self.column.astype(complex))) / np.sqrt(self.sigma)

    def eta(self, z, *, tol=DEFAULT):
        W = self.wfa
        z = complex(z)
        _check_pole(W.A, z, tol)
        M = z * np.eye(W.n) - W.A
        return complex(self.column @ np.linalg.solve(M, W.beta.astype(complex))) / np.sqrt(self.sigma)

    def xi_coefficients(self, J):
        W = self.wfa
        out = np.empty(int(J))
        u = np.array(self.column, dtype=float)
        for j in range(int(J)):
            out[j] = W.alpha @ u
            u = W.A @ u
        return out / np.sqrt(self.sigma)

    def eta_coefficients(self, J):
        W = self.wfa
        out = np.empty(int(J))
        v = np.array(W.beta)
        for j in range(int(J)):
            out[j] = self.column @ v
            v = W.A @ v
        return out / np.sqrt(self.sigma)


def schmidt_functions(S, k, w=None):
    """Schmidt pair of the ``k``-th singular number of a canonical-form automaton.

    ``w`` optionally picks a unit vector inside the singular number's tie
    group (given over the whole state space); the default is ``e_k``.
    """
    n = S.n
    if w is None:
        w = np.zeros(n)
        w[int(k)] = 1.0
    w = np.asarray(w, dtype=float)
    return SchmidtPair(S.wfa, float(S.singular_numbers[int(k)]), w / np.linalg.norm(w))


def error_ratio(S, k, z, w=None, *, tol=DEFAULT):
    """``sigma_k [w^T V^T (z - A)^{-1} beta] / [alpha^T (1 - z A)^{-1} V w]``.

    On the unit circle the ratio of the two singular-vector generating
    functions has modulus ``sigma_k`` for any canonical-form automaton.

    Raises
    ------
    NearZeroDenominator, NearPole
    """
    pair = schmidt_functions(S, k, w)
    den = pair.xi(z, tol=tol)
    scale = np.linalg.norm(S.wfa.alpha) / np.sqrt(pair.sigma)
    if abs(den) <= 1e-12 * max(scale, 1e-300):
        raise NearZeroDenominator(f"denominator {abs(den):.3g} at z={z}")
    return pair.sigma * pair.eta(z, tol=tol) / den


def error_symbol(E, z, *, tol=DEFAULT):
    """Error symbol ``alpha_e^T (z - A_e)^{-1} beta_e - C`` of a reduction."""
    return symbol_eval(E.wfa, z, tol=tol) - E.constant


@dataclass(frozen=True)
class UnimodularityResult:
    deviation: float
    skipped: int
    samples: int


def unimodularity_check(S, k, samples=1000, *, error=None, method="symbol", w=None, tol=DEFAULT):
    """Largest ``| |e(z)| / sigma_k - 1 |`` over an equispaced circle grid.

    Parameters
    ----------
    S : SvaWfa
    k : int
    samples : int
    error : ErrorWfa, optional
        Error automaton of a reduction.  With ``method="symbol"`` and no
        ``error`` given, the optimal rank-``k`` reduction is computed first.
    method : {"symbol", "ratio"}
        ``"symbol"`` tests the actual error symbol of the reduction.
        ``"ratio"`` tests the singular-vector ratio, which only depends on
        the canonical form.

    Samples where the evaluation fails (pole or vanishing denominator) are
    skipped and counted.
    """
    theta, zs = circle_grid(samples)
    sigma = float(S.singular_numbers[int(k)])
    skipped = 0
    if method == "ratio":
        vals = []
        for z in zs:
            try:
                vals.append(error_ratio(S, k, z, w, tol=tol))
            except NumericalError:
                skipped += 1
        vals = np.asarray(vals)
    elif method == "symbol":
        if error is None:
            from .aak import build_error_wfa, partition, solve_auxiliary

            Pb = partition(S, k, tol=tol)
            error = build_error_wfa(Pb, solve_auxiliary(Pb, tol=tol))
        W = error.wfa
        lam = np.linalg.eigvals(W.A) if W.n else np.zeros(0)
        if lam.size:
            near = np.abs(zs[:, None] - lam[None, :]).min(axis=1) <= tol.pole
        else:
            near = np.zeros(zs.size, dtype=bool)
        skipped = int(near.sum())
        vals = symbol_values(W, zs[~near]) - error.constant
    else:
        raise ValueError(f"unknown method {method!r}")
    dev = float(np.max(np.abs(np.abs(vals) / sigma - 1.0))) if len(vals) else float("nan")
    return UnimodularityResult(dev, skipped, int(samples))


@dataclass(frozen=True)
class Pole:
    eigenvalue: complex
    modulus: float
    inside_disc: bool


def pole_report(W):
    """Eigenvalues of the transition matrix with their moduli and disc membership.

    For a minimal automaton the number inside the disc equals the Hankel rank.
    """
    if W.n == 0:
        return []
    lam = np.linalg.eigvals(W.A)
    order = np.argsort(np.abs(lam), kind="stable")
    return [Pole(complex(l), float(abs(l)), bool(abs(l) < 1.0)) for l in lam[order]]
