"""Dense kernels: Stein/Lyapunov and Sylvester solvers, modulus-ordered real
Schur decomposition, spectral radius.

All routines are pure functions of their arguments.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .config import DEFAULT
from .errors import (
    DimensionMismatch,
    EigenvalueOnCircle,
    NonConvergent,
    SingularSystem,
)

__all__ = [
    "SchurForm",
    "spectral_radius",
    "solve_discrete_lyapunov",
    "solve_stein",
    "solve_sylvester",
    "ordered_schur",
]

# above this order the Kronecker system becomes too large and doubling is used
KRONECKER_MAX_ORDER = 32


def _square(M, name="A"):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
    return M


def spectral_radius(A):
    """Largest eigenvalue modulus of ``A`` (0 for an empty matrix)."""
    A = _square(A)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def solve_stein(A, B, C, *, tol=DEFAULT):
    r"""Solve :math:`X - A X B = C`.

    The unique solution exists when :math:`\rho(A)\rho(B) < 1`; it equals
    :math:`\sum_k A^k C B^k`.  Small problems are solved through the
    Kronecker form, larger ones by doubling.

    Raises
    ------
    NonConvergent
        If ``rho(A) * rho(B) >= 1 - tol.rho``.
    DimensionMismatch
        If shapes are inconsistent.
    """
    A = _square(A, "A")
    B = _square(B, "B")
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if C.shape != (A.shape[0], B.shape[0]):
        raise DimensionMismatch(
            f"C has shape {C.shape}, expected {(A.shape[0], B.shape[0])}"
        )
    if C.size == 0:
        return np.zeros_like(C)
    rate = spectral_radius(A) * spectral_radius(B)
    if rate >= 1.0 - tol.rho:
        raise NonConvergent(
            f"Stein equation has no convergent solution (rho product {rate:.6g})"
        )
    m, n = C.shape
    if max(m, n) <= KRONECKER_MAX_ORDER:
        # row-major vec: vec(A X B) = kron(A, B^T) vec(X)
        K = np.eye(m * n) - np.kron(A, B.T)
        return np.linalg.solve(K, C.ravel()).reshape(m, n)
    return _stein_doubling(A, B, C)


def _stein_doubling(A, B, C, max_steps=64):
    X = C.copy()
    Ak, Bk = A.copy(), B.copy()
    for _ in range(max_steps):
        step = Ak @ X @ Bk
        X = X + step
        if np.linalg.norm(step) <= 1e-17 * np.linalg.norm(X):
            break
        Ak = Ak @ Ak
        Bk = Bk @ Bk
    else:
        raise NonConvergent("doubling iteration did not converge")
    return X


def solve_discrete_lyapunov(A, S, *, tol=DEFAULT):
    r"""Solve the Stein equation :math:`X - A X A^\top = S`.

    Parameters
    ----------
    A : (n, n) array_like
        Transition matrix with spectral radius below one.
    S : (n, n) array_like
        Symmetric right-hand side.

    Returns
    -------
    X : (n, n) ndarray
        Symmetric solution, ``sum_k A^k S (A^T)^k``.

    Examples
    --------
    >>> solve_discrete_lyapunov([[0.5]], [[1.0]])
    array([[1.33333333]])
    """
    A = _square(A, "A")
    S = _square(S, "S")
    if S.shape != A.shape:
        raise DimensionMismatch(f"S has shape {S.shape}, expected {A.shape}")
    X = solve_stein(A, A.T, S, tol=tol)
    return 0.5 * (X + X.T)


def solve_sylvester(Ap, Am, C, *, tol=DEFAULT):
    r"""Solve :math:`A_p X - X A_m + C = 0` (Bartels-Stewart).

    Raises
    ------
    SingularSystem
        If the spectra of ``Ap`` and ``Am`` come within ``tol.circle`` of
        each other (relative to their scale).
    """
    Ap = _square(Ap, "Ap")
    Am = _square(Am, "Am")
    C = np.asarray(C, dtype=float).reshape(Ap.shape[0], Am.shape[0])
    if C.size == 0:
        return np.zeros_like(C)
    lp = np.linalg.eigvals(Ap)
    lm = np.linalg.eigvals(Am)
    scale = max(1.0, np.abs(lp).max(), np.abs(lm).max())
    gap = np.abs(lp[:, None] - lm[None, :]).min()
    if gap <= tol.circle * scale:
        raise SingularSystem(f"spectra overlap (separation {gap:.3g})")
    return scipy.linalg.solve_sylvester(Ap, -Am, -C)


@dataclass(frozen=True, eq=False)
class SchurForm:
    """Real Schur factorisation ``A = U T U^T`` with blocks ordered by modulus.

    ``split_index`` counts the eigenvalues strictly inside the unit circle;
    they occupy the leading ``split_index`` rows and columns of ``T``.
    """

    U: np.ndarray
    T: np.ndarray
    split_index: int

    @property
    def eigenvalues(self):
        return _block_eigenvalues(self.T)


def _block_starts(T):
    n = T.shape[0]
    starts = []
    i = 0
    while i < n:
        starts.append(i)
        i += 2 if (i + 1 < n and T[i + 1, i] != 0.0) else 1
    return starts


def _block_eigenvalues(T):
    n = T.shape[0]
    out = []
    for s in _block_starts(T):
        if s + 1 < n and T[s + 1, s] != 0.0:
            out.extend(np.linalg.eigvals(T[s : s + 2, s : s + 2]))
        else:
            out.append(complex(T[s, s]))
    return np.array(out, dtype=complex)


def _block_modulus(T, s):
    n = T.shape[0]
    if s + 1 < n and T[s + 1, s] != 0.0:
        return float(np.abs(np.linalg.eigvals(T[s : s + 2, s : s + 2])).max())
    return abs(T[s, s])


def ordered_schur(A, *, tol=DEFAULT):
    """Real Schur form with diagonal blocks in non-decreasing modulus.

    Blocks are moved by orthogonal adjacent swaps (LAPACK ``dtrexc``), one
    selection pass per target position.

    Raises
    ------
    EigenvalueOnCircle
        If an eigenvalue modulus lies within ``tol.circle`` of one.
    """
    A = _square(A)
    n = A.shape[0]
    if n == 0:
        return SchurForm(np.zeros((0, 0)), np.zeros((0, 0)), 0)
    T, U = scipy.linalg.schur(A, output="real")
    moduli = np.abs(_block_eigenvalues(T))
    near = np.abs(moduli - 1.0) <= tol.circle
    if near.any():
        raise EigenvalueOnCircle(
            f"eigenvalue of modulus {moduli[near][0]:.12g} on the unit circle"
        )

    T = np.asfortranarray(T)
    U = np.asfortranarray(U)
    pos = 0
    while pos < n:
        starts = [s for s in _block_starts(T) if s >= pos]
        mods = [_block_modulus(T, s) for s in starts]
        j = int(np.argmin(mods))
        # keep the current block when it ties with the minimum
        if mods[j] < mods[0] - 1e-14 * max(1.0, mods[0]):
            T, U, info = lapack.dtrexc(T, U, starts[j] + 1, pos + 1)
            if info != 0:
                raise SingularSystem("Schur block swap failed (ill-conditioned)")
        pos += 2 if (pos + 1 < n and T[pos + 1, pos] != 0.0) else 1

    T = np.ascontiguousarray(T)
    U = np.ascontiguousarray(U)
    split = int(np.sum(np.abs(_block_eigenvalues(T)) < 1.0))
    return SchurForm(U, T, split)
