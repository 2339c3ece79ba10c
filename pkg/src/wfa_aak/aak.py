"""Optimal spectral-norm rank-k reduction of a canonical-form automaton.

Pipeline
--------
1. Group the singular number ``sigma_k`` with its ties and permute the group
   to the last coordinates (:func:`group_multiplicity`, :func:`partition`).
2. Solve for the auxiliary automaton ``<alpha_hat, A_hat, beta_hat>`` whose
   symbol differs from the input symbol by an all-pass function of modulus
   ``sigma_k`` (:func:`solve_auxiliary`).
3. Split ``A_hat`` into its parts inside and outside the unit disc; the part
   inside is the optimal rank-``k`` automaton (:func:`block_diagonalize`).
4. Certify: all-pass Gramian identities, unimodularity of the error symbol,
   and the truncated-Hankel spectral error (:func:`aak_reduce`).

Sign structure
--------------
For a canonical form with Hankel-eigenvalue signs ``S`` the transition
matrix satisfies ``A^T = S A S`` rather than symmetry, so the formulas below
keep ``A_12`` and ``A_21`` distinct.  They coincide with the symmetric
formulas when all signs agree.
"""

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .errors import (
    DegenerateCaseWarning,
    EigenvalueOnCircle,
    GroupNotAtBoundary,
    InertiaMismatch,
    InputError,
    SingularCore,
)
from .hankel import (
    auto_hankel_size,
    spectral_error_details,
    sva_truncation_baseline,
    svd_truncation_baseline,
    truncated_hankel,
)
from .linalg import ordered_schur, solve_sylvester, spectral_radius
from .symbol import unimodularity_check
from .wfa import Wfa, difference, series, wfa_to_dict

__all__ = [
    "PartitionBlocks",
    "Auxiliary",
    "ErrorWfa",
    "ReductionReport",
    "group_multiplicity",
    "partition",
    "solve_auxiliary",
    "build_error_wfa",
    "allpass_matrices",
    "verify_allpass",
    "block_diagonalize",
    "aak_reduce",
]

BRANCH_NONZERO = "alpha2_nonzero"
BRANCH_ZERO = "alpha2_zero"

# certificate thresholds
CERT_ERROR_REL = 1e-6
CERT_ALLPASS = 1e-8
CERT_UNIMODULAR = 1e-8
CERT_L2 = 1e-8
L2_TERMS = 1001
VERIFY_MAX_N = 64


def group_multiplicity(D, k, tol=DEFAULT.mult):
    """Size of the tie group of ``D[k]`` and the permutation moving it last.

    Parameters
    ----------
    D : (n,) array_like
        Non-increasing singular numbers.
    k : int
        Index of the singular number, ``0 <= k < n``.
    tol : float
        Entries within ``tol * D[0]`` of ``D[k]`` are tied.

    Returns
    -------
    r : int
    perm : ndarray of int
        Indices outside the group in their original order, then the group.

    Raises
    ------
    GroupNotAtBoundary
        If ``k`` is not the first index of its group.

    Examples
    --------
    >>> group_multiplicity([3, 2, 2, 1], 1)
    (2, array([0, 3, 1, 2]))
    """
    D = np.asarray(D, dtype=float)
    n = D.size
    k = int(k)
    if not 0 <= k < n:
        raise InputError(f"k must satisfy 0 <= k < n (got k={k}, n={n})")
    thr = tol * D[0]
    start = k
    while start > 0 and abs(D[start - 1] - D[k]) <= thr:
        start -= 1
    stop = k + 1
    while stop < n and abs(D[stop] - D[k]) <= thr:
        stop += 1
    if start != k:
        raise GroupNotAtBoundary(
            f"k={k} lies inside the tie group [{start}, {stop}); use k={start} or k={stop}",
            start,
            stop,
        )
    r = stop - start
    perm = np.array([i for i in range(n) if not start <= i < stop] + list(range(start, stop)))
    return r, perm


@dataclass(frozen=True, eq=False)
class PartitionBlocks:
    """Blocks of a canonical form with the ``sigma_k`` group moved last.

    ``m = n - r`` retained coordinates come first.  ``A21`` is kept next to
    ``A12`` because the transition matrix is only sign-symmetric.
    """

    Sigma: np.ndarray
    r: int
    k: int
    sigma_k: float
    A11: np.ndarray
    A12: np.ndarray
    A21: np.ndarray
    A22: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    R: np.ndarray
    permutation: np.ndarray
    signs: np.ndarray

    @property
    def m(self):
        return self.Sigma.size

    @property
    def n(self):
        return self.m + self.r

    @property
    def A(self):
        return np.block([[self.A11, self.A12], [self.A21, self.A22]])

    @property
    def alpha(self):
        return np.concatenate([self.alpha1, self.alpha2])

    @property
    def beta(self):
        return np.concatenate([self.beta1, self.beta2])

    @property
    def wfa(self):
        """Permuted automaton (same function as the input)."""
        return Wfa(self.alpha, self.A, self.beta)


def partition(S, k, *, tol=DEFAULT):
    """Permute the ``sigma_k`` tie group last and cut the blocks.

    Raises
    ------
    GroupNotAtBoundary
        If ``k`` is inside its tie group or the group covers every state.
    """
    D = np.asarray(S.singular_numbers)
    n = D.size
    k = int(k)
    if not 0 < k < n:
        raise InputError(f"k must satisfy 0 < k < n (got k={k}, n={n})")
    r, perm = group_multiplicity(D, k, tol.mult)
    if r == n:
        raise GroupNotAtBoundary("all singular numbers are tied; no rank below n exists", 0, n)
    m = n - r
    W = S.wfa
    A = W.A[np.ix_(perm, perm)]
    a = W.alpha[perm]
    b = W.beta[perm]
    Sig = D[perm][:m]
    s = float(D[k])
    return PartitionBlocks(
        Sigma=Sig.copy(),
        r=r,
        k=k,
        sigma_k=s,
        A11=A[:m, :m].copy(),
        A12=A[:m, m:].copy(),
        A21=A[m:, :m].copy(),
        A22=A[m:, m:].copy(),
        alpha1=a[:m].copy(),
        alpha2=a[m:].copy(),
        beta1=b[:m].copy(),
        beta2=b[m:].copy(),
        R=np.diag(s * s - Sig * Sig),
        permutation=perm,
        signs=np.asarray(S.sign_vector)[perm].copy(),
    )


@dataclass(frozen=True, eq=False)
class Auxiliary:
    """Auxiliary automaton ``<alpha_hat, A_hat, beta_hat>`` of size ``n - r``."""

    A_hat: np.ndarray
    alpha_hat: np.ndarray
    beta_hat: np.ndarray
    branch: str
    constraint_residual: float
    warnings: tuple = ()

    @property
    def wfa(self):
        return Wfa(self.alpha_hat, self.A_hat, self.beta_hat)


def constraint_residuals(Pb, A_hat, alpha_hat, beta_hat):
    """Relative residual of the four linear identities defining the auxiliary
    automaton::

        A11 A_hat^T + beta1 beta_hat^T = I
        A21 A_hat^T + beta2 beta_hat^T = 0
        A11^T R A_hat - alpha1 alpha_hat^T = R
        A12^T R A_hat - alpha2 alpha_hat^T = 0
    """
    m = Pb.m
    R = Pb.R
    I = np.eye(m)
    e1 = Pb.A11 @ A_hat.T + np.outer(Pb.beta1, beta_hat) - I
    e2 = Pb.A21 @ A_hat.T + np.outer(Pb.beta2, beta_hat)
    e3 = Pb.A11.T @ R @ A_hat - np.outer(Pb.alpha1, alpha_hat) - R
    e4 = Pb.A12.T @ R @ A_hat - np.outer(Pb.alpha2, alpha_hat)
    num = np.sqrt(sum(np.sum(e**2) for e in (e1, e2, e3, e4)))
    den = np.sqrt(m) + np.linalg.norm(R)
    return float(num / den)


def _constraint_system(Pb):
    """Dense system ``M x = rhs`` for ``x = (vec A_hat, alpha_hat, beta_hat)``
    (row-major vectorisation)."""
    m, r = Pb.m, Pb.r
    R = Pb.R
    I = np.eye(m)
    K = np.zeros((m * m, m * m))  # vec(X^T) = K vec(X)
    idx = np.arange(m * m)
    K[idx, (idx % m) * m + idx // m] = 1.0
    Zm = np.zeros((m * m, m))
    Zr = np.zeros((r * m, m))
    rows = [
        np.hstack([np.kron(Pb.A11, I) @ K, Zm, np.kron(Pb.beta1[:, None], I)]),
        np.hstack([np.kron(Pb.A21, I) @ K, Zr, np.kron(Pb.beta2[:, None], I)]),
        np.hstack([np.kron(Pb.A11.T @ R, I), -np.kron(Pb.alpha1[:, None], I), Zm]),
        np.hstack([np.kron(Pb.A12.T @ R, I), -np.kron(Pb.alpha2[:, None], I), Zr]),
    ]
    rhs = np.concatenate([I.ravel(), np.zeros(r * m), R.ravel(), np.zeros(r * m)])
    return np.vstack(rows), rhs


def solve_auxiliary(Pb, *, tol=DEFAULT):
    """Auxiliary automaton for the partitioned canonical form.

    With ``(v^T)^+ = v / (v^T v)``:

    * ``alpha2 != 0``: ``A_hat = (A11^T - A21^T (beta2^T)^+ beta1^T)^{-1}``,
      ``beta_hat = -A_hat A21^T (beta2^T)^+``,
      ``alpha_hat = A_hat^T R A12 (alpha2^T)^+``.
    * ``alpha2 = 0``: the four identities of :func:`constraint_residuals`
      are solved jointly for the minimum-norm ``(A_hat, alpha_hat,
      beta_hat)``.  When the system is inconsistent and ``r >= n/2`` the
      choice ``A_hat = 0`` is returned with a :class:`DegenerateCaseWarning`
      recommending a neighbouring rank.

    Raises
    ------
    SingularCore
        If the matrix inverted in the first branch is numerically singular,
        or the joint system of the second branch is inconsistent with
        ``r < n/2``.
    EigenvalueOnCircle
        If ``A_hat`` has an eigenvalue on the unit circle.
    """
    m, r, n = Pb.m, Pb.r, Pb.n
    notes = []
    na = np.linalg.norm(np.concatenate([Pb.alpha1, Pb.alpha2]))
    a2 = np.linalg.norm(Pb.alpha2)
    if a2 > tol.branch * na:
        branch = BRANCH_NONZERO
        if a2 <= 1e3 * tol.branch * na:
            notes.append(
                f"|alpha2|/|alpha| = {a2 / na:.3g} is close to the branch threshold; "
                "the pseudo-inverses are ill-conditioned"
            )
        b2p = Pb.beta2 / (Pb.beta2 @ Pb.beta2)
        a2p = Pb.alpha2 / (Pb.alpha2 @ Pb.alpha2)
        core = Pb.A11.T - np.outer(Pb.A21.T @ b2p, Pb.beta1)
        sv = np.linalg.svd(core, compute_uv=False)
        if sv[-1] <= tol.rank * max(sv[0], 1.0):
            raise SingularCore(
                f"core matrix is singular (smallest singular value {sv[-1]:.3g}); "
                "no all-pass extension of this size exists for this rank"
            )
        A_hat = np.linalg.inv(core)
        beta_hat = -A_hat @ Pb.A21.T @ b2p
        alpha_hat = A_hat.T @ Pb.R @ Pb.A12 @ a2p
    else:
        branch = BRANCH_ZERO
        M, rhs = _constraint_system(Pb)
        x = np.linalg.lstsq(M, rhs, rcond=None)[0]
        resid = np.linalg.norm(M @ x - rhs) / np.linalg.norm(rhs)
        if resid <= 1e-8:
            A_hat = x[: m * m].reshape(m, m)
            nb = Pb.beta1 @ Pb.beta1
            nal = Pb.alpha1 @ Pb.alpha1
            beta_hat = (np.eye(m) - A_hat @ Pb.A11.T) @ Pb.beta1 / nb
            alpha_hat = -(Pb.R - A_hat.T @ Pb.R @ Pb.A11) @ Pb.alpha1 / nal
        elif 2 * r >= n:
            A_hat = np.zeros((m, m))
            beta_hat = Pb.beta1 / (Pb.beta1 @ Pb.beta1)
            alpha_hat = -Pb.R @ Pb.alpha1 / (Pb.alpha1 @ Pb.alpha1)
            msg = (
                f"degenerate case (alpha2 = 0, r={r} >= n/2): A_hat = 0 used; "
                f"consider rank {Pb.k - 1} or {Pb.k + 1}"
            )
            notes.append(msg)
            warnings.warn(msg, DegenerateCaseWarning, stacklevel=2)
        else:
            raise SingularCore(
                f"auxiliary identities are inconsistent (relative residual {resid:.3g})"
            )

    if m:
        lam = np.linalg.eigvals(A_hat)
        if np.any(np.abs(np.abs(lam) - 1.0) <= tol.circle):
            raise EigenvalueOnCircle("auxiliary transition matrix has an eigenvalue on the unit circle")
    res = constraint_residuals(Pb, A_hat, alpha_hat, beta_hat)
    return Auxiliary(A_hat, alpha_hat, beta_hat, branch, res, tuple(notes))


def allpass_matrices(Pb):
    """Gramians of the error automaton.

    Block order ``(n - r, r, n - r)``::

        P_e = [[Sigma, 0, I], [0, sigma I, 0], [I, 0, -Sigma R^{-1}]]
        Q_e = [[Sigma, 0, R], [0, sigma I, 0], [R, 0, -Sigma R]]

    so that ``P_e Q_e = sigma^2 I``.
    """
    m, r, s = Pb.m, Pb.r, Pb.sigma_k
    Sg = np.diag(Pb.Sigma)
    I = np.eye(m)
    Z = np.zeros
    Rinv = np.diag(1.0 / np.diag(Pb.R))
    Pe = np.block(
        [
            [Sg, Z((m, r)), I],
            [Z((r, m)), s * np.eye(r), Z((r, m))],
            [I, Z((m, r)), -Sg @ Rinv],
        ]
    )
    Qe = np.block(
        [
            [Sg, Z((m, r)), Pb.R],
            [Z((r, m)), s * np.eye(r), Z((r, m))],
            [Pb.R, Z((m, r)), -Sg @ Pb.R],
        ]
    )
    return Pe, Qe


@dataclass(frozen=True, eq=False)
class ErrorWfa:
    """Error automaton ``<(alpha; -alpha_hat), diag(A, A_hat), (beta; beta_hat)>``
    in partition coordinates, and the constant ``C`` of the optimal symbol.

    ``symbol(E)(z) - C`` is the error symbol ``phi(z) - psi(z)``; on the unit
    circle its modulus is ``sigma_k``.
    """

    wfa: Wfa
    sigma_k: float
    constant: float
    blocks: PartitionBlocks


def build_error_wfa(Pb, aux):
    """Assemble the error automaton and its constant term.

    The constant is ``C = alpha_e^T A_e^T Q_e beta_e / (alpha_e^T alpha_e)``,
    the value making the error symbol all-pass.
    """
    m, n = Pb.m, Pb.n
    Ae = np.zeros((n + m, n + m))
    Ae[:n, :n] = Pb.A
    Ae[n:, n:] = aux.A_hat
    ae = np.concatenate([Pb.alpha, -aux.alpha_hat])
    be = np.concatenate([Pb.beta, aux.beta_hat])
    _, Qe = allpass_matrices(Pb)
    C = float(ae @ Ae.T @ Qe @ be / (ae @ ae))
    return ErrorWfa(Wfa(ae, Ae, be), Pb.sigma_k, C, Pb)


def verify_allpass(E, Pb=None):
    """Relative residuals of the error automaton's Gramian identities.

    Returns
    -------
    (a, b, c) : tuple of float
        ``P_e - A_e P_e A_e^T - beta_e beta_e^T``,
        ``Q_e - A_e^T Q_e A_e - alpha_e alpha_e^T`` and
        ``P_e Q_e - sigma^2 I``, each in Frobenius norm relative to the
        norms of the terms involved.
    """
    Pb = E.blocks if Pb is None else Pb
    Pe, Qe = allpass_matrices(Pb)
    W = E.wfa
    Ae, ae, be = W.A, W.alpha, W.beta
    s2 = Pb.sigma_k**2
    fro = np.linalg.norm
    t1 = Ae @ Pe @ Ae.T
    t2 = np.outer(be, be)
    ra = fro(Pe - t1 - t2) / (fro(Pe) + fro(t1) + fro(t2))
    t1 = Ae.T @ Qe @ Ae
    t2 = np.outer(ae, ae)
    rb = fro(Qe - t1 - t2) / (fro(Qe) + fro(t1) + fro(t2))
    I = np.eye(Pe.shape[0])
    rc = fro(Pe @ Qe - s2 * I) / (fro(Pe) * fro(Qe) + s2 * fro(I))
    return float(ra), float(rb), float(rc)


def block_diagonalize(aux, *, tol=DEFAULT):
    """Split an automaton into its parts with eigenvalues inside and outside
    the unit disc.

    ``A = U T U^T`` is brought to real Schur form with blocks ordered by
    modulus; the coupling block is removed by ``M = [[I, X], [0, I]]`` with
    ``T_11 X - X T_22 + T_12 = 0``.

    Parameters
    ----------
    aux : Auxiliary or Wfa

    Returns
    -------
    stable, unstable : Wfa
        Their direct sum realises the same function as the input.

    Raises
    ------
    EigenvalueOnCircle
    """
    if isinstance(aux, Auxiliary):
        a, A, b = aux.alpha_hat, aux.A_hat, aux.beta_hat
    else:
        a, A, b = aux.alpha, aux.A, aux.beta
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    sf = ordered_schur(A, tol=tol)
    p = sf.split_index
    T, U = sf.T, sf.U
    X = solve_sylvester(T[:p, :p], T[p:, p:], T[:p, p:], tol=tol)
    M = np.eye(n)
    M[:p, p:] = X
    Minv = np.eye(n)
    Minv[:p, p:] = -X
    At = Minv @ T @ M
    at = M.T @ (U.T @ a)
    bt = Minv @ (U.T @ b)
    stable = Wfa(at[:p], At[:p, :p], bt[:p])
    unstable = Wfa(at[p:], At[p:, p:], bt[p:])
    return stable, unstable


@dataclass(eq=False)
class ReductionReport:
    """Outcome of :func:`aak_reduce`.

    ``achieved_error`` and the baselines are truncated-Hankel measurements
    and are ``None`` when verification is disabled.
    """

    reduced: Wfa
    k: int
    r: int
    branch: str
    sigma_k: float
    singular_numbers: np.ndarray
    input_spectral_radius: float
    allpass_residuals: tuple
    constraint_residual: float
    lyapunov_residual: float
    error_wfa: ErrorWfa
    unstable: Wfa
    achieved_error: float = None
    tail_bound: float = None
    hankel_size: int = None
    l2_error_sq: float = None
    l2_bound_check: float = None
    unimodularity_deviation: float = None
    unimodularity_skipped: int = 0
    baselines: dict = field(default_factory=dict)
    certified: bool = None
    warnings: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def verified(self):
        return self.achieved_error is not None

    def failures(self):
        """Names of certificate checks that failed (empty when certified)."""
        out = []
        s = self.sigma_k
        if max(self.allpass_residuals) > CERT_ALLPASS:
            out.append("allpass")
        if self.unimodularity_deviation is not None and not (
            self.unimodularity_deviation <= CERT_UNIMODULAR
        ):
            out.append("unimodularity")
        if self.achieved_error is not None:
            if abs(self.achieved_error - s) > CERT_ERROR_REL * s:
                out.append("spectral_error")
            if self.l2_bound_check > CERT_L2:
                out.append("l2_bound")
        return out

    def to_dict(self):
        res = {
            "lyapunov": self.lyapunov_residual,
            "allpass_a": self.allpass_residuals[0],
            "allpass_b": self.allpass_residuals[1],
            "allpass_c": self.allpass_residuals[2],
            "unimodularity": self.unimodularity_deviation,
            "constraints": self.constraint_residual,
        }
        baselines = [
            {
                "method": "aak",
                "rank": self.k,
                "spectral_error": self.achieved_error,
                "is_hankel": True,
                "certified": self.certified,
            }
        ]
        for name, err in self.baselines.items():
            baselines.append(
                {
                    "method": name,
                    "rank": self.k,
                    "spectral_error": err,
                    "is_hankel": name != "svd_truncation",
                    "certified": False,
                }
            )
        return {
            "input": {
                "n": int(self.singular_numbers.size),
                "spectral_radius": self.input_spectral_radius,
                "singular_numbers": [float(x) for x in self.singular_numbers],
            },
            "reduction": {
                "k": self.k,
                "r": self.r,
                "branch": self.branch,
                "sigma_k": self.sigma_k,
                "achieved_error": self.achieved_error,
                "tail_bound": self.tail_bound,
                "hankel_size": self.hankel_size,
                "l2_error_sq": self.l2_error_sq,
                "certified": self.certified,
                "residuals": res,
                "reduced": wfa_to_dict(self.reduced),
            },
            "baselines": baselines,
            "warnings": list(self.warnings),
        }


def _gramian_residual(S):
    W = S.wfa
    D = np.diag(S.singular_numbers)
    A = W.A
    fro = np.linalg.norm
    rp = fro(D - A @ D @ A.T - np.outer(W.beta, W.beta))
    rq = fro(D - A.T @ D @ A - np.outer(W.alpha, W.alpha))
    return float(max(rp, rq) / fro(D))


def aak_reduce(
    S,
    k,
    *,
    verify=None,
    hankel_size="auto",
    samples=1000,
    tol=DEFAULT,
):
    """Optimal rank-``k`` spectral-norm approximation.

    Parameters
    ----------
    S : SvaWfa
        Canonical form of the automaton to reduce.
    k : int
        Target number of states, ``0 < k < n``.
    verify : bool, optional
        Measure the achieved error on a truncated Hankel matrix, and the
        baselines.  Defaults to ``n <= 64``.
    hankel_size : int or "auto"
        Truncation size for verification.
    samples : int
        Circle samples for the unimodularity test.

    Returns
    -------
    ReductionReport
        ``reduced`` has exactly ``k`` states and spectral radius below one.

    Raises
    ------
    InputError, GroupNotAtBoundary, SingularCore, EigenvalueOnCircle,
    InertiaMismatch
    """
    n = S.n
    k = int(k)
    if k >= n:
        raise InputError(f"k must be < n (got k={k}, n={n})")
    if k <= 0:
        raise InputError(f"k must be >= 1 (got k={k})")
    if verify is None:
        verify = n <= VERIFY_MAX_N
    times = {}
    t0 = time.perf_counter()
    Pb = partition(S, k, tol=tol)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateCaseWarning)
        aux = solve_auxiliary(Pb, tol=tol)
    for w in caught:
        warnings.warn(w.message, w.category, stacklevel=2)

    expected = int(np.sum(Pb.Sigma * (Pb.Sigma**2 - Pb.sigma_k**2) > 0))
    stable, unstable = block_diagonalize(aux, tol=tol)
    if stable.n != expected or expected != k:
        raise InertiaMismatch(
            f"stable part has {stable.n} states; inertia count predicts {expected} (k={k})"
        )
    rho = spectral_radius(stable.A)
    if rho >= 1.0 - tol.circle / 2:
        raise InertiaMismatch(f"reduced automaton has spectral radius {rho:.12g}")
    times["reduce"] = time.perf_counter() - t0

    E = build_error_wfa(Pb, aux)
    report = ReductionReport(
        reduced=stable,
        k=k,
        r=Pb.r,
        branch=aux.branch,
        sigma_k=Pb.sigma_k,
        singular_numbers=np.array(S.singular_numbers),
        input_spectral_radius=spectral_radius(S.wfa.A),
        allpass_residuals=verify_allpass(E, Pb),
        constraint_residual=aux.constraint_residual,
        lyapunov_residual=_gramian_residual(S),
        error_wfa=E,
        unstable=unstable,
        warnings=list(aux.warnings),
    )
    uc = unimodularity_check(S, k, samples, error=E, tol=tol)
    report.unimodularity_deviation = uc.deviation
    report.unimodularity_skipped = uc.skipped

    if verify:
        t1 = time.perf_counter()
        sigma0 = float(S.singular_numbers[0])
        D = difference(S.wfa, stable)
        if hankel_size == "auto" or hankel_size is None:
            N = auto_hankel_size(D, scale=sigma0, tol=tol)
        else:
            N = int(hankel_size)
        err, tail, N = spectral_error_details(S.wfa, stable, N, tol=tol)
        report.achieved_error = err
        report.tail_bound = tail
        report.hankel_size = N
        d = series(D, L2_TERMS)
        report.l2_error_sq = float(d @ d)
        report.l2_bound_check = report.l2_error_sq - Pb.sigma_k**2
        trunc = sva_truncation_baseline(S, k)
        report.baselines["sva_truncation"] = spectral_error_details(S.wfa, trunc, N, tol=tol)[0]
        report.baselines["svd_truncation"] = svd_truncation_baseline(
            truncated_hankel(S.wfa, N, tol=tol), k, matrix=False
        )[1]
        times["verify"] = time.perf_counter() - t1
        report.certified = not report.failures()
    report.timings = times
    return report
