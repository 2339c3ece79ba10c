"""Automata with eigenvalues outside the unit disc.

The transition matrix is split into its parts inside and outside the disc.
The outside part is reflected inside by ``A -> A^{-1}``, both parts are
reduced separately and the reduced outside part is reflected back.  The
combined result is not optimal in any norm; each part's reduction is.
"""

from dataclasses import dataclass, field

import numpy as np

from .aak import aak_reduce, block_diagonalize
from .config import DEFAULT
from .errors import InputError, SingularTransition
from .linalg import spectral_radius
from .wfa import Wfa, direct_sum, minimize, series, to_sva, wfa_to_dict

__all__ = [
    "SplitWfa",
    "PartReduction",
    "GeneralReduction",
    "split_stable_unstable",
    "reflect_unstable",
    "reduce_general",
]


@dataclass(frozen=True, eq=False)
class SplitWfa:
    """Parts of an automaton with eigenvalues inside (``stable``) and outside
    (``unstable``) the unit disc; ``f = f_stable + f_unstable``."""

    stable: Wfa
    unstable: Wfa
    original_n: int


def split_stable_unstable(W, *, tol=DEFAULT):
    """Split by eigenvalue modulus (ordered real Schur form and a Sylvester
    solve, as in :func:`wfa_aak.aak.block_diagonalize`).

    Raises
    ------
    EigenvalueOnCircle
    """
    stable, unstable = block_diagonalize(W, tol=tol)
    return SplitWfa(stable, unstable, W.n)


def _reflect(W, tol):
    if W.n == 0:
        return W
    sv = np.linalg.svd(W.A, compute_uv=False)
    if sv[-1] <= tol.rank * max(sv[0], 1.0):
        raise SingularTransition(f"transition matrix is singular (smallest singular value {sv[-1]:.3g})")
    Ainv = np.linalg.inv(W.A)
    return Wfa(W.alpha, Ainv, -Ainv @ W.beta)


def reflect_unstable(Wu, *, tol=DEFAULT):
    """``<alpha, A^{-1}, -A^{-1} beta>``.

    For ``|z|`` large enough, the symbol of the result at ``z`` equals the
    symbol ``alpha^T (1 - z A)^{-1} beta`` of the input read at ``1/z``; its
    coefficients are ``-alpha^T A^{-(m+1)} beta``.  The underlying map
    ``<alpha, A, beta> -> <alpha, A^{-1}, -A^{-1} beta>`` is an involution.

    Raises
    ------
    SingularTransition
        If ``A`` is numerically singular.
    InputError
        If some eigenvalue of ``A`` lies in the closed unit disc.
    """
    if Wu.n and np.min(np.abs(np.linalg.eigvals(Wu.A))) <= 1.0:
        if np.min(np.abs(np.linalg.eigvals(Wu.A))) <= tol.rank:
            raise SingularTransition("transition matrix is singular")
        raise InputError("reflect_unstable expects every eigenvalue outside the unit disc")
    return _reflect(Wu, tol)


@dataclass(eq=False)
class PartReduction:
    """Reduction of one part.  ``sigma_k`` is ``None`` when the part is kept."""

    n: int
    k: int
    singular_numbers: np.ndarray
    sigma_k: float = None
    achieved_error: float = None
    certified: bool = None
    report: object = None

    def to_dict(self):
        return {
            "n": self.n,
            "k": self.k,
            "singular_numbers": [float(x) for x in self.singular_numbers],
            "sigma_k": self.sigma_k,
            "achieved_error": self.achieved_error,
            "certified": self.certified,
        }


@dataclass(eq=False)
class GeneralReduction:
    wfa: Wfa
    stable: PartReduction
    unstable: PartReduction
    coefficient_max_diff: float
    compare_terms: int
    non_optimal: bool = True
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {
            "flag": "NON-OPTIMAL",
            "non_optimal": self.non_optimal,
            "stable": self.stable.to_dict(),
            "unstable": self.unstable.to_dict(),
            "coefficient_max_abs_diff": self.coefficient_max_diff,
            "compare_terms": self.compare_terms,
            "reduced": wfa_to_dict(self.wfa),
            "warnings": list(self.warnings),
        }


def _reduce_part(W, k, verify, tol, **kw):
    """Reduce a part whose spectrum lies inside the disc."""
    W = minimize(W, tol=tol)
    if not np.any(W.alpha) and not np.any(W.beta):
        return Wfa(np.zeros(0), np.zeros((0, 0)), np.zeros(0)), PartReduction(0, 0, np.zeros(0))
    S = to_sva(W, tol=tol)
    D = np.array(S.singular_numbers)
    if k >= S.n:
        return S.wfa, PartReduction(S.n, S.n, D, achieved_error=0.0, certified=True)
    if k == 0:
        empty = Wfa(np.zeros(0), np.zeros((0, 0)), np.zeros(0))
        return empty, PartReduction(S.n, 0, D, sigma_k=float(D[0]))
    rep = aak_reduce(S, k, verify=verify, tol=tol, **kw)
    return rep.reduced, PartReduction(
        S.n, k, D, rep.sigma_k, rep.achieved_error, rep.certified, rep
    )


def reduce_general(W, k_stable, k_unstable, *, verify=True, compare_terms=None, tol=DEFAULT, **kw):
    """Reduce each spectral part separately and recombine.

    Parameters
    ----------
    W : Wfa
        No eigenvalue on the unit circle.
    k_stable, k_unstable : int
        Target sizes of the two parts (``0`` drops a part).
    compare_terms : int, optional
        The result is compared with the input coefficient-wise on
        ``k = 0..compare_terms`` (default ``2 n``).

    Returns
    -------
    GeneralReduction
        Always flagged non-optimal.  Per-part errors are certified for each
        part separately; no combined bound is claimed.
    """
    if k_stable < 0 or k_unstable < 0:
        raise InputError("target sizes must be non-negative")
    split = split_stable_unstable(W, tol=tol)
    Ws, ps = _reduce_part(split.stable, k_stable, verify, tol, **kw) if split.stable.n else (
        split.stable,
        PartReduction(0, 0, np.zeros(0)),
    )
    if split.unstable.n:
        Wr, pu = _reduce_part(_reflect(split.unstable, tol), k_unstable, verify, tol, **kw)
        Wu = _reflect(Wr, tol)
    else:
        Wu, pu = split.unstable, PartReduction(0, 0, np.zeros(0))
    out = direct_sum(Ws, Wu)
    if out.n == 0:
        out = Wfa(np.zeros(1), np.zeros((1, 1)), np.zeros(1))
    K = 2 * W.n if compare_terms is None else int(compare_terms)
    diff = float(np.max(np.abs(series(W, K + 1) - series(out, K + 1))))
    notes = []
    if split.unstable.n and spectral_radius(Wu.A) <= 1.0:
        notes.append("reflected reduced part has an eigenvalue inside the disc")
    return GeneralReduction(out, ps, pu, diff, K, True, notes)
