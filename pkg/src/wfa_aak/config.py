"""Numerical tolerances shared across modules."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Tolerance bundle.

    Attributes
    ----------
    solve
        Relative residual accepted from the dense matrix-equation solvers.
    circle
        Minimum distance of an eigenvalue modulus from 1.
    rho
        Margin below 1 required of the spectral radius for Gramians.
    mult
        Relative gap (times ``sigma_0``) under which singular numbers are tied.
    branch
        ``||alpha_2|| <= branch * ||alpha||`` selects the ``alpha_2 = 0`` branch.
    pole
        Minimum distance of a symbol evaluation point from a pole.
    eq
        Relative tolerance of :func:`wfa_aak.wfa.equivalent`.
    rank
        Relative singular-value threshold for numerical rank decisions.
    """

    solve: float = 1e-10
    circle: float = 1e-8
    rho: float = 1e-8
    mult: float = 1e-9
    branch: float = 1e-8
    pole: float = 1e-10
    eq: float = 1e-9
    rank: float = 1e-10

    def with_(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)


DEFAULT = Tolerances()
