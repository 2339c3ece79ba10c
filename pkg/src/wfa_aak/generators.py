"""Random and structured test automata."""

import numpy as np

from .errors import NumericalError
from .linalg import spectral_radius
from .wfa import Wfa, minimize, to_sva

__all__ = [
    "random_wfa",
    "random_minimal_sva",
    "random_orthogonal_sva",
    "random_mixed_wfa",
    "stretch",
]


def random_wfa(rng, n, rho=(0.3, 0.9)):
    """Gaussian automaton with ``A`` rescaled to a spectral radius drawn from ``rho``."""
    A = rng.normal(size=(n, n))
    A *= rng.uniform(*rho) / spectral_radius(A)
    return Wfa(rng.normal(size=n), A, rng.normal(size=n))


def _gaps_ok(d, gap):
    gaps = np.append(-np.diff(d), d[-1])
    return gaps.min() > gap * d[0]


def random_minimal_sva(rng, n, *, rho=(0.3, 0.9), gap=1e-3, max_tries=1000):
    """Random minimal canonical form with ``n`` states.

    Draws are rejected until the spectral radius is below ``rho[1]`` and all
    consecutive singular-number gaps, including the gap from the smallest
    to zero, exceed ``gap * sigma_0``.
    """
    for _ in range(max_tries):
        W = minimize(random_wfa(rng, n, rho))
        if W.n != n:
            continue
        try:
            S = to_sva(W)
        except NumericalError:
            continue
        if spectral_radius(S.wfa.A) < rho[1] and _gaps_ok(S.singular_numbers, gap):
            return S
    raise RuntimeError(f"no admissible {n}-state draw in {max_tries} tries")


def random_orthogonal_sva(rng, n, rho=0.95):
    """Random canonical form with ``A = rho Q`` for a Haar-random orthogonal ``Q``.

    Every eigenvalue has modulus ``rho``, which keeps the Hankel singular
    numbers from collapsing and makes large minimal inputs cheap to draw.
    """
    Q, Rq = np.linalg.qr(rng.normal(size=(n, n)))
    Q = Q * np.sign(np.diag(Rq))
    return to_sva(Wfa(rng.normal(size=n), rho * Q, rng.normal(size=n)))


def random_mixed_wfa(rng, n_stable, n_unstable, *, inside=(0.2, 0.8), outside=(1.3, 3.0)):
    """Automaton with ``n_stable`` eigenvalues inside and ``n_unstable``
    outside the unit disc, coupled by a random similarity."""
    n = n_stable + n_unstable
    lam = np.concatenate(
        [
            rng.uniform(*inside, n_stable) * rng.choice([-1.0, 1.0], n_stable),
            rng.uniform(*outside, n_unstable) * rng.choice([-1.0, 1.0], n_unstable),
        ]
    )
    T = np.triu(rng.normal(scale=0.3, size=(n, n)), 1) + np.diag(lam)
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return Wfa(rng.normal(size=n), Q @ T @ Q.T, rng.normal(size=n))


def stretch(W, s):
    """Automaton for ``g(m) = f(m / s)`` when ``s`` divides ``m``, else 0.

    The Hankel spectrum acquires tied singular numbers for ``s >= 3`` and
    the canonical form has zero initial weights on the tied coordinates.
    """
    n = W.n
    A = np.zeros((s * n, s * n))
    A[:n, (s - 1) * n :] = W.A
    for i in range(1, s):
        A[i * n : (i + 1) * n, (i - 1) * n : i * n] = np.eye(n)
    z = np.zeros((s - 1) * n)
    return Wfa(np.concatenate([W.alpha, z]), A, np.concatenate([W.beta, z]))
