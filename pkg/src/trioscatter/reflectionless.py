"""Closed forms for data with no reflection and one bound scale per sign.

With both reflection ratios identically zero and a single positive and
single negative bound scale, the residue system collapses to a 2x2
solve whose determinant and solution are elementary.  The module keeps
that algebra in one place so both pipelines can use it as an exact
fixture: the direct solver checks its zero sets against the planted
scales, the inverse solver checks its pole path against psi0_closed.

A caution on the potential map.  The tail-mass channel of the closed
form vanishes identically (double poles contribute nothing at order
1/lambda), which forces p = 0 on the half axis; and for a symmetric
pair (mu1 = -nu1) the moment field Q is exactly real, which forces
q = 0 as well.  Q itself does not decay as x grows and its real part
disagrees with the vanishing tail mass, so the two recovery channels
are inconsistent on this class.  The potentials returned follow the
tail-mass channel; Q is returned as computed so the discrepancy stays
visible.  This is recorded as an observed property of the closed form,
not a theorem about the scattering class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .inverse_right import (
    RecoveredPotentials,
    _bracket_neg,
    _bracket_pos,
    _dx_imag,
    _POLE_EXCLUSION,
    FIT_MOMENT,
)
from .jost import SolverConvergenceError
from .rootsys import SQRT3, ZETA1, ZETA2

__all__ = [
    "ReflectionlessParams",
    "closed_form",
    "psi0_closed",
    "reflectionless_potentials",
]

_DEGENERATE = 1e-14


@dataclass(frozen=True)
class ReflectionlessParams:
    """One positive and one negative bound scale."""

    mu1: float
    nu1: float

    def __post_init__(self):
        if not self.mu1 > 0:
            raise ValueError("mu1 must be positive")
        if not self.nu1 < 0:
            raise ValueError("nu1 must be negative")


def _system(params: ReflectionlessParams, x: float) -> np.ndarray:
    mu, nu = params.mu1, params.nu1
    em = np.exp(-SQRT3 * mu * x)
    en = np.exp(SQRT3 * nu * x)
    return np.array(
        [
            [
                -ZETA2 * em / (3.0 * mu**2),
                1.0 / (mu - nu) ** 2 + ZETA2 * en / (mu - nu * ZETA1) ** 2,
            ],
            [
                1.0 / (nu - mu) ** 2 + ZETA1 * em / (nu - mu * ZETA2) ** 2,
                -ZETA1 * en / (3.0 * nu**2),
            ],
        ],
        dtype=complex,
    )


def closed_form(
    params: ReflectionlessParams, x: float
) -> Tuple[complex, complex, complex]:
    """Determinant and residue pair of the 2x2 system at the point x.

    Both residues solve the vanishing-regular-part conditions with
    right side (-1, -1); the determinant never vanishes for admissible
    scale pairs, but a degenerate configuration is still reported
    rather than silently inverted.
    """
    A = _system(params, x)
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if abs(det) < _DEGENERATE:
        raise SolverConvergenceError(
            "degenerate residue configuration: |determinant| = %.3g" % abs(det)
        )
    rhs = np.array([-1.0, -1.0], dtype=complex)
    sol = np.linalg.solve(A, rhs)
    return complex(det), complex(sol[0]), complex(sol[1])


def psi0_closed(
    params: ReflectionlessParams, lam: complex, x: float
) -> complex:
    """Continued normalized field of the reflectionless pair at lam.

    One double-pole bracket per scale; matches the general solver's
    pole path exactly, which is the point of keeping it separate.
    """
    mu, nu = params.mu1, params.nu1
    for pt in (mu, mu * ZETA2, nu, nu * ZETA1):
        if abs(lam - pt) < _POLE_EXCLUSION:
            raise ValueError("evaluation point too close to a pole")
    _, r1, r1hat = closed_form(params, x)
    return complex(
        1.0
        + r1 * _bracket_pos(lam, mu, x)
        + r1hat * _bracket_neg(lam, nu, x)
    )


def reflectionless_potentials(
    params: ReflectionlessParams, xgrid: np.ndarray
) -> RecoveredPotentials:
    """Potentials on the half axis through the calibrated tail map.

    The large-lambda expansion of the closed form has no 1/lambda term,
    so the tail mass P vanishes identically and with it p; q follows
    from the x derivative of Im Q and vanishes for symmetric pairs.
    See the module docstring for why Q itself is kept unmodified.
    """
    xs = np.asarray(xgrid, dtype=float)
    mu, nu = params.mu1, params.nu1
    Q = np.empty(xs.size, dtype=complex)
    for j, x in enumerate(xs):
        det, r1, r1hat = closed_form(params, x)
        c2 = r1 * (1.0 + ZETA1 * np.exp(-SQRT3 * mu * x)) + r1hat * (
            1.0 + ZETA2 * np.exp(SQRT3 * nu * x)
        )
        Q[j] = FIT_MOMENT * np.conj(c2)
    zeros = np.zeros(xs.size)
    return RecoveredPotentials(
        xgrid=xs, P=zeros.astype(complex), Q=Q, p=zeros.copy(),
        q=_dx_imag(Q, xs),
    )
