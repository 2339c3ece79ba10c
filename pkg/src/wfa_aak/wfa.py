"""One-letter weighted automata: representation, evaluation, minimisation,
Gramians and the singular-value (balanced) canonical form.

A WFA ``<alpha, A, beta>`` realises ``f(k) = alpha^T A^k beta``.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .errors import DimensionMismatch, InputError, NotMinimal, SpectralRadiusTooLarge
from .linalg import solve_discrete_lyapunov, solve_stein, spectral_radius

__all__ = [
    "Wfa",
    "SvaWfa",
    "Gramians",
    "evaluate",
    "series",
    "zero_wfa",
    "direct_sum",
    "difference",
    "minimize",
    "gramians",
    "to_sva",
    "equivalent",
    "wfa_to_dict",
    "wfa_from_dict",
    "dumps_wfa",
    "loads_wfa",
    "load_wfa",
    "save_wfa",
    "example1",
]


def _frozen(x):
    x = np.array(x, dtype=float)
    x.setflags(write=False)
    return x


@dataclass(frozen=True, eq=False)
class Wfa:
    """Weighted automaton over a one-letter alphabet.

    Parameters
    ----------
    alpha : (n,) array_like
        Initial weights.
    A : (n, n) array_like
        Transition weights.
    beta : (n,) array_like
        Final weights.

    Arrays are copied and made read-only; ``n = 0`` is allowed.
    """

    alpha: np.ndarray
    A: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float).reshape(-1)
        beta = np.asarray(self.beta, dtype=float).reshape(-1)
        A = np.asarray(self.A, dtype=float)
        n = alpha.size
        if A.size == 0 and n == 0:
            A = np.zeros((0, 0))
        if A.ndim != 2 or A.shape != (n, n) or beta.size != n:
            raise DimensionMismatch(
                f"inconsistent WFA dimensions: alpha {alpha.shape}, "
                f"A {np.shape(self.A)}, beta {beta.shape}"
            )
        for name, x in (("alpha", alpha), ("A", A), ("beta", beta)):
            if not np.all(np.isfinite(x)):
                raise InputError(f"{name} has non-finite entries")
        object.__setattr__(self, "alpha", _frozen(alpha))
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "beta", _frozen(beta))

    @property
    def n(self):
        return self.alpha.size

    def __call__(self, k):
        return evaluate(self, k)

    def __repr__(self):
        return f"Wfa(n={self.n}, rho={spectral_radius(self.A) if self.n else 0.0:.4g})"

    def similar(self, T, Tinv=None):
        """Realisation ``<T^T alpha, T^-1 A T, T^-1 beta>`` (same function)."""
        T = np.asarray(T, dtype=float)
        if Tinv is None:
            Tinv = np.linalg.inv(T)
        return Wfa(T.T @ self.alpha, Tinv @ self.A @ T, Tinv @ self.beta)

    def scaled(self, c):
        """WFA computing ``c * f``."""
        return Wfa(c * self.alpha, self.A, self.beta)


@dataclass(frozen=True, eq=False)
class Gramians:
    """Reachability ``P`` and observability ``Q`` Gramians.

    ``P - A P A^T = beta beta^T`` and ``Q - A^T Q A = alpha alpha^T``.
    """

    P: np.ndarray
    Q: np.ndarray


@dataclass(frozen=True, eq=False)
class SvaWfa:
    """WFA in singular-value (balanced) form.

    Both Gramians equal ``diag(singular_numbers)``.  With ``S =
    diag(sign_vector)`` the realisation also satisfies ``alpha = S beta`` and
    ``A^T = S A S``; the signs are those of the eigenvalues of the (symmetric)
    Hankel operator.  When all signs agree ``A`` is symmetric.
    """

    wfa: Wfa
    singular_numbers: np.ndarray
    sign_vector: np.ndarray

    @property
    def n(self):
        return self.wfa.n

    @property
    def alpha(self):
        return self.wfa.alpha

    @property
    def A(self):
        return self.wfa.A

    @property
    def beta(self):
        return self.wfa.beta

    def check(self, tol=1e-8):
        """Largest relative violation of the canonical-form identities."""
        W, D, s = self.wfa, self.singular_numbers, self.sign_vector
        scale = max(D[0], 1e-300)
        G = gramians(W)
        Dm = np.diag(D)
        na = max(np.linalg.norm(W.alpha), 1e-300)
        nA = max(np.linalg.norm(W.A), 1e-300)
        return {
            "gramian_P": float(np.abs(G.P - Dm).max() / scale),
            "gramian_Q": float(np.abs(G.Q - Dm).max() / scale),
            "sign": float(np.abs(W.alpha - s * W.beta).max() / na),
            "sign_symmetry": float(np.abs(W.A.T - s[:, None] * W.A * s[None, :]).max() / nA),
        }


def zero_wfa():
    """Minimal realisation of the zero function (one state, all weights 0)."""
    return Wfa(np.zeros(1), np.zeros((1, 1)), np.zeros(1))


def evaluate(W, k):
    """``alpha^T A^k beta`` by ``k`` matrix-vector products.

    Examples
    --------
    >>> W = Wfa([3 ** 0.5 / 2, 0], [[0, .5], [.5, 0]], [3 ** 0.5 / 2, 0])
    >>> round(evaluate(W, 2), 12)
    0.1875
    """
    k = int(k)
    if k < 0:
        raise InputError("k must be non-negative")
    if W.n == 0:
        return 0.0
    v = np.array(W.beta)
    for _ in range(k):
        v = W.A @ v
    return float(W.alpha @ v)


def series(W, K):
    """First ``K`` values ``f(0), ..., f(K-1)``."""
    out = np.zeros(int(K))
    if W.n == 0:
        return out
    v = np.array(W.beta)
    for j in range(int(K)):
        out[j] = W.alpha @ v
        v = W.A @ v
    return out


def direct_sum(W1, W2, c1=1.0, c2=1.0):
    """WFA computing ``c1 f1 + c2 f2`` on the block-diagonal state space."""
    n1, n2 = W1.n, W2.n
    A = np.zeros((n1 + n2, n1 + n2))
    A[:n1, :n1] = W1.A
    A[n1:, n1:] = W2.A
    return Wfa(
        np.concatenate([c1 * W1.alpha, c2 * W2.alpha]),
        A,
        np.concatenate([W1.beta, W2.beta]),
    )


def difference(W1, W2):
    """WFA computing ``f1 - f2``."""
    return direct_sum(W1, W2, 1.0, -1.0)


def _krylov_basis(A, v, rank_tol):
    """Orthonormal basis of span{v, Av, A^2 v, ...} (columns)."""
    n = A.shape[0]
    if n == 0 or not np.any(v):
        return np.zeros((n, 0))
    cols = []
    u = np.array(v)
    for _ in range(n):
        nu = np.linalg.norm(u)
        if nu == 0.0:
            break
        u = u / nu
        cols.append(u)
        u = A @ u
    K = np.column_stack(cols)
    U, s, _ = np.linalg.svd(K, full_matrices=False)
    r = int(np.sum(s > rank_tol * s[0]))
    return U[:, :r]


def minimize(W, *, tol=DEFAULT):
    """Minimal realisation of the same function.

    Restricts to the reachable subspace (Krylov space of ``beta``), then to
    the observable quotient (Krylov space of ``alpha`` under ``A^T``).  Numerical
    rank uses a relative singular-value threshold ``tol.rank``.

    The zero function yields :func:`zero_wfa`.
    """
    if W.n == 0:
        return zero_wfa()
    V = _krylov_basis(W.A, W.beta, tol.rank)
    if V.shape[1] == 0:
        return zero_wfa()
    A1 = V.T @ W.A @ V
    a1 = V.T @ W.alpha
    b1 = V.T @ W.beta
    U = _krylov_basis(A1.T, a1, tol.rank)
    if U.shape[1] == 0:
        return zero_wfa()
    return Wfa(U.T @ a1, U.T @ A1 @ U, U.T @ b1)


def _check_radius(W, tol):
    rho = spectral_radius(W.A)
    if rho >= 1.0 - tol.rho:
        raise SpectralRadiusTooLarge(f"spectral radius {rho:.12g} is not below 1")
    return rho


def gramians(W, *, tol=DEFAULT):
    """Reachability and observability Gramians.

    Raises
    ------
    SpectralRadiusTooLarge
        If ``rho(A) >= 1 - tol.rho``.
    """
    _check_radius(W, tol)
    P = solve_discrete_lyapunov(W.A, np.outer(W.beta, W.beta), tol=tol)
    Q = solve_discrete_lyapunov(W.A.T, np.outer(W.alpha, W.alpha), tol=tol)
    return Gramians(P, Q)


def _psd_factor(M):
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    return V * np.sqrt(np.clip(w, 0.0, None))


def _tie_groups(d, tol):
    groups = []
    i = 0
    while i < d.size:
        j = i + 1
        while j < d.size and d[i] - d[j] <= tol * d[0]:
            j += 1
        groups.append((i, j))
        i = j
    return groups


def _balance(W, tol):
    """One square-root balancing step; returns the balanced WFA and ``d``."""
    G = gramians(W, tol=tol)
    Lp = _psd_factor(G.P)
    Lq = _psd_factor(G.Q)
    U, d, Vt = np.linalg.svd(Lq.T @ Lp)
    if d[0] == 0.0 or d[-1] <= 1e-13 * d[0]:
        raise NotMinimal(
            f"Hankel singular numbers reach {d[-1]:.3g} (max {d[0]:.3g}); input is not minimal"
        )
    sq = np.sqrt(d)
    T = Lp @ Vt.T / sq
    Tinv = (U / sq).T @ Lq.T
    return W.similar(T, Tinv), d


def to_sva(W, *, tol=DEFAULT):
    """Singular-value (balanced) canonical form.

    Gramians are factored through symmetric square roots, ``L_q^T L_p =
    U D V^T`` gives the balancing change of basis ``T = L_p V D^{-1/2}``.
    The step is applied twice: the second pass starts from nearly diagonal
    Gramians, so its change of basis is well conditioned and it removes the
    rounding left by the first (which grows with the spread of ``D``).
    The Hankel-eigenvalue signs are read off the cross-Gramian ``X - A X A =
    beta alpha^T`` (equal to ``D S`` in the balanced basis); inside groups of
    tied singular numbers an orthogonal rotation diagonalises it.  Each basis
    vector is oriented so that the first non-negligible entry of
    ``beta, A beta, A^2 beta, ...`` at that coordinate is positive.

    Raises
    ------
    SpectralRadiusTooLarge, NotMinimal
    """
    n = W.n
    B, _ = _balance(W, tol)
    B, d = _balance(B, tol)

    X = solve_stein(B.A, B.A, np.outer(B.beta, B.alpha), tol=tol)
    R = np.eye(n)
    for i, j in _tie_groups(d, tol.mult):
        if j - i > 1:
            blk = X[i:j, i:j]
            _, V = np.linalg.eigh(0.5 * (blk + blk.T))
            R[i:j, i:j] = V
    B = B.similar(R, R.T)
    X = R.T @ X @ R
    signs = np.where(np.diag(X) >= 0.0, 1.0, -1.0)

    flip = np.ones(n)
    v = np.array(B.beta)
    thresh = 1e-12 * np.linalg.norm(B.beta)
    decided = np.zeros(n, dtype=bool)
    for _ in range(n + 1):
        big = (~decided) & (np.abs(v) > thresh)
        flip[big] = np.sign(v[big])
        decided |= big
        if decided.all():
            break
        v = B.A @ v
    B = B.similar(np.diag(flip), np.diag(flip))
    return SvaWfa(B, _frozen(d), _frozen(signs))


def equivalent(W1, W2, horizon=None, *, tol=DEFAULT):
    """True when the two automata agree on ``k = 0..horizon``.

    The default horizon ``2 (n1 + n2)`` decides exact equivalence of
    rational series.
    """
    if horizon is None:
        horizon = 2 * (W1.n + W2.n)
    f1 = series(W1, horizon + 1)
    f2 = series(W2, horizon + 1)
    bound = tol.eq * np.maximum(1.0, np.maximum(np.abs(f1), np.abs(f2)))
    return bool(np.all(np.abs(f1 - f2) <= bound))


# --- JSON interchange ---------------------------------------------------------


def _reject_constant(name):
    raise InputError(f"non-finite number {name!r} in WFA JSON")


def wfa_to_dict(W, comment=None):
    d = {
        "alpha": [float(x) for x in W.alpha],
        "transition": [[float(x) for x in row] for row in W.A],
        "beta": [float(x) for x in W.beta],
    }
    if comment is not None:
        d["comment"] = str(comment)
    return d


def wfa_from_dict(d):
    """Build a :class:`Wfa` from the ``alpha``/``transition``/``beta`` object."""
    if not isinstance(d, dict):
        raise InputError("WFA JSON must be an object")
    missing = [k for k in ("alpha", "transition", "beta") if k not in d]
    if missing:
        raise InputError(f"WFA JSON is missing fields: {', '.join(missing)}")
    try:
        alpha = np.asarray(d["alpha"], dtype=float).reshape(-1)
        beta = np.asarray(d["beta"], dtype=float).reshape(-1)
        rows = d["transition"]
        n = alpha.size
        if not isinstance(rows, list) or len(rows) != n:
            raise DimensionMismatch(f"transition must have {n} rows")
        for row in rows:
            if not isinstance(row, list) or len(row) != n:
                raise DimensionMismatch(f"every transition row must have {n} entries")
        A = np.asarray(rows, dtype=float).reshape(n, n)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed WFA JSON: {exc}") from exc
    for x in (alpha, A, beta):
        if not np.all(np.isfinite(x)):
            raise InputError("WFA JSON contains non-finite numbers")
    return Wfa(alpha, A, beta)


def dumps_wfa(W, comment=None):
    """Serialise; floats are written with shortest round-trip repr."""
    return json.dumps(wfa_to_dict(W, comment), indent=2, allow_nan=False)


def loads_wfa(text):
    try:
        d = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    return wfa_from_dict(d)


def load_wfa(path):
    with open(path, encoding="utf-8") as fh:
        return loads_wfa(fh.read())


def save_wfa(W, path, comment=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_wfa(W, comment))
        fh.write("\n")


def example1():
    """Two-state probabilistic automaton with ``f(k) = 3/4 2^-k`` for even
    ``k`` and 0 for odd ``k``; minimal and already in singular-value form."""
    h = math.sqrt(3.0) / 2.0
    return Wfa([h, 0.0], [[0.0, 0.5], [0.5, 0.0]], [h, 0.0])
