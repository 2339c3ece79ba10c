"""Finite Hankel truncations as ground truth for operator quantities.

``H_N(i, j) = f(i + j)`` for ``0 <= i, j < N``.  Spectral-norm errors between
automata are measured as the largest singular value of the truncated
Hankel matrix of their difference, with an estimate of the neglected tail.
"""

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .config import DEFAULT
from .errors import DivergentDivision, InputError, SpectralRadiusTooLarge, TruncationWarning
from .linalg import spectral_radius
from .wfa import Wfa, difference, series

__all__ = [
    "TruncatedHankel",
    "truncated_hankel",
    "tail_bound",
    "auto_hankel_size",
    "hankel_singular_numbers",
    "spectral_error",
    "spectral_error_details",
    "svd_truncation_baseline",
    "sva_truncation_baseline",
    "polynomial_method",
    "write_csv",
]

AUTO_TARGET = 1e-8
AUTO_MIN = 16
AUTO_CAP = 1024


@dataclass(frozen=True, eq=False)
class TruncatedHankel:
    """``N x N`` Hankel truncation with an estimate of the neglected tail.

    ``tail_bound`` estimates the Frobenius norm of ``H - H_N`` (with ``H_N``
    embedded in the infinite matrix), hence bounds the spectral-norm gap.
    """

    N: int
    entries: np.ndarray
    tail_bound: float
    coefficients: np.ndarray = field(repr=False)

    @property
    def singular_values(self):
        # symmetric matrix: singular values are the eigenvalue moduli
        return np.sort(np.abs(np.linalg.eigvalsh(self.entries)))[::-1]

    @property
    def norm(self):
        if self.N == 0:
            return 0.0
        return float(self.singular_values[0])


def _outside_weight(m, N):
    """Number of positions with ``i + j = m`` lying outside the ``N x N`` block."""
    m = np.asarray(m)
    return np.where(m >= 2 * N - 1, m + 1, np.maximum(2 * m + 2 - 2 * N, 0))


def tail_bound(W, N, *, tol=DEFAULT, _coeffs=None):
    r"""Estimate of :math:`\|H - H_N\|_F`.

    Anti-diagonals ``N <= m <= 2N + 10`` are summed exactly.  Beyond that the
    sequence is modelled as ``|f(m)| <= c rho^m`` with ``rho`` the spectral
    radius and ``c`` the largest ratio over the last eleven exact terms, and
    the weighted geometric series is summed in closed form.

    Raises
    ------
    SpectralRadiusTooLarge
    """
    N = int(N)
    rho = spectral_radius(W.A) if W.n else 0.0
    if rho >= 1.0 - tol.rho:
        raise SpectralRadiusTooLarge(f"spectral radius {rho:.12g} is not below 1")
    M = 2 * N + 10
    f = _coeffs if _coeffs is not None and _coeffs.size > M else series(W, M + 1)
    m = np.arange(N, M + 1)
    exact = float(np.sum(_outside_weight(m, N) * f[N : M + 1] ** 2))
    if rho == 0.0:
        return float(np.sqrt(exact))
    # c rho^(M+1) bounded from the last exact window
    window = np.arange(M - 10, M + 1)
    head = float(np.max(np.abs(f[window]) * rho ** (M + 1 - window)))
    a = M + 1
    x = rho * rho
    rest = head**2 * ((a + 1) - a * x) / (1.0 - x) ** 2
    return float(np.sqrt(exact + rest))


def truncated_hankel(W, N, *, tol=DEFAULT):
    """Hankel truncation of ``W``.

    Parameters
    ----------
    W : Wfa
    N : int
        Matrix size.

    Examples
    --------
    >>> truncated_hankel(Wfa([1.0], [[0.5]], [1.0]), 2).entries
    array([[1.  , 0.5 ],
           [0.5 , 0.25]])
    """
    N = int(N)
    if N < 1:
        raise InputError("Hankel size must be positive")
    f = series(W, 2 * N + 11)
    H = scipy.linalg.hankel(f[:N], f[N - 1 : 2 * N - 1])
    tb = tail_bound(W, N, tol=tol, _coeffs=f)
    return TruncatedHankel(N, H, tb, f[: 2 * N - 1])


def auto_hankel_size(W, scale=None, *, target=AUTO_TARGET, cap=AUTO_CAP, tol=DEFAULT):
    """Smallest power of two ``N`` with ``tail_bound(N) < target * scale``.

    ``scale`` defaults to the norm of a 16 x 16 truncation.  When the cap is
    reached a :class:`TruncationWarning` is issued and the cap is returned.
    """
    if scale is None:
        scale = truncated_hankel(W, AUTO_MIN, tol=tol).norm
    if scale == 0.0:
        return AUTO_MIN
    N = AUTO_MIN
    while N < cap:
        if tail_bound(W, N, tol=tol) < target * scale:
            return N
        N *= 2
    tb = tail_bound(W, cap, tol=tol)
    if tb >= target * scale:
        warnings.warn(
            f"Hankel truncation capped at N={cap}; tail estimate {tb:.3g}",
            TruncationWarning,
            stacklevel=2,
        )
    return cap


def hankel_singular_numbers(S):
    """Hankel singular numbers of a canonical-form automaton (exact, no truncation)."""
    return np.array(S.singular_numbers)


def spectral_error_details(W1, W2, N="auto", *, tol=DEFAULT):
    """Spectral norm of the truncated Hankel matrix of ``f1 - f2``.

    Returns
    -------
    error : float
    tail : float
        Tail estimate of the truncation; the true operator norm lies within
        ``error`` and ``error + tail``.
    N : int
        Size used.
    """
    D = difference(W1, W2)
    if N == "auto" or N is None:
        N = auto_hankel_size(D, tol=tol)
    T = truncated_hankel(D, int(N), tol=tol)
    return T.norm, T.tail_bound, T.N


def spectral_error(W1, W2, N="auto", *, tol=DEFAULT):
    """``||H_{f1} - H_{f2}||`` measured on an ``N x N`` truncation."""
    return spectral_error_details(W1, W2, N, tol=tol)[0]


def svd_truncation_baseline(T, k, *, matrix=True):
    """Rank-``k`` truncated SVD of a Hankel truncation.

    Returns
    -------
    approx : ndarray or None
        Best rank-``k`` matrix (generally not Hankel); ``None`` when
        ``matrix`` is false.
    error : float
        ``sigma_k(H_N)``, zero when ``k >= N``.
    """
    k = int(k)
    if not matrix:
        s = T.singular_values
        return None, float(s[k]) if k < s.size else 0.0
    U, s, Vt = np.linalg.svd(T.entries)
    approx = (U[:, :k] * s[:k]) @ Vt[:k]
    error = float(s[k]) if k < s.size else 0.0
    return approx, error


def sva_truncation_baseline(S, k):
    """Keep the leading ``k`` coordinates of a canonical-form automaton."""
    k = int(k)
    W = S.wfa
    if k >= W.n:
        return W
    return Wfa(W.alpha[:k], W.A[:k, :k], W.beta[:k])


def _schmidt_coefficients(S, k, L):
    W = S.wfa
    sigma = S.singular_numbers[k]
    xi = np.empty(L)
    eta = np.empty(L)
    u = np.zeros(W.n)
    u[k] = 1.0
    v = np.array(W.beta)
    for j in range(L):
        xi[j] = W.alpha @ u
        eta[j] = v[k]
        u = W.A @ u
        v = W.A @ v
    s = 1.0 / np.sqrt(sigma)
    return s * xi, s * eta


def polynomial_method(S, k, N, *, max_grid=2**18, tol=DEFAULT):
    """Optimal rank-``k`` Hankel matrix by dividing the Schmidt pair.

    The error symbol of the optimum is ``sigma_k eta^-(z) / xi^+(z)`` where
    ``xi^+`` and ``eta^-`` are the generating functions of the left and right
    singular vectors of ``sigma_k``.  The quotient is sampled on an
    ``L``-point unit-circle grid and its negative Fourier coefficients are
    recovered by FFT; ``L`` is doubled until the aliased coefficients near
    ``L/2`` are negligible.  The result is ``H_N - M_N`` with ``M`` the Hankel
    matrix of the quotient.

    Raises
    ------
    DivergentDivision
        If ``xi^+`` vanishes on the circle or aliasing persists up to
        ``max_grid`` points.
    """
    n = S.n
    k = int(k)
    if not 0 < k < n:
        raise InputError(f"k must satisfy 0 < k < n (got k={k}, n={n})")
    sigma = S.singular_numbers[k]
    N = int(N)
    rho = spectral_radius(S.wfa.A)
    L = 1 << max(12, int(np.ceil(np.log2(8 * N))))
    if rho > 0:
        L = max(L, 1 << int(np.ceil(np.log2(40.0 / -np.log(rho)))))
    L = min(L, max_grid)
    while True:
        xi, eta = _schmidt_coefficients(S, k, L)
        Xz = np.fft.ifft(xi) * L
        Ez = np.fft.fft(np.concatenate([[0.0], sigma * eta[:-1]]))
        if np.abs(Xz).min() <= 1e-12 * np.abs(Xz).max():
            raise DivergentDivision("singular vector generating function vanishes on the circle")
        c = np.fft.ifft(Ez / Xz)
        mid = np.abs(c[L // 2 - L // 16 : L // 2 + L // 16]).max()
        if mid <= 1e-13 * np.abs(c).max():
            break
        if L >= max_grid:
            raise DivergentDivision(
                f"coefficients still {mid:.3g} near the aliasing band at L={L}"
            )
        L *= 2
    f = series(S.wfa, 2 * N - 1)
    g = f - c[1 : 2 * N].real
    G = scipy.linalg.hankel(g[:N], g[N - 1 :])
    if N > k:
        sv = np.linalg.svd(G, compute_uv=False)
        if sv[k] > 1e-6 * max(sv[0], 1e-300):
            warnings.warn(
                f"divided Hankel matrix has numerical rank above {k} (sigma_k={sv[k]:.3g})",
                RuntimeWarning,
                stacklevel=2,
            )
    return G


def write_csv(T, path):
    """Dump the matrix rows followed by a ``singular_values`` row."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        for row in T.entries:
            w.writerow([repr(float(x)) for x in row])
        w.writerow(["singular_values"] + [repr(float(x)) for x in T.singular_values])
