"""Inverse problem on the left half axis.

Waves incident from the far left see the reflected pair, so the left
system is the mirror image of the right one: the same coupled
collocation rows with the roles of direct and dual data exchanged and
the solve point negated.  One factorization of the coupled system
already produces both sides; this module exposes the left half through
its own kernel and unknown types and fixes the left sign conventions,

    left tail mass      P(x) = integral of p over (-inf, x),
    left moment field   Q(x) = p(x) + i * integral of q over (-inf, x),

so q comes from the x derivative of Im Q with a plus sign, exactly as
on the right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .inverse_right import (
    CollocationTable,
    JumpKernelsRight,
    MarchenkoUnknowns,
    RayDataRight,
    RecoveredPotentials,
    _bracket_neg,
    _bracket_pos,
    _cauchy_tail_row,
    _dx_imag,
    _fit_points,
    _pole_points,
    FIT_MASS,
    FIT_MOMENT,
    fit_inverse_powers_at,
    jump_kernels_right,
    solve_marchenko_right,
)
from .numerics import RealGrid
from .rootsys import SQRT3, ZETA1, ZETA2
from .scatter import BoundStateSet

__all__ = [
    "JumpKernelsLeft",
    "jump_kernels_left",
    "DualUnknowns",
    "solve_marchenko_left",
    "solve_left_on_grid",
    "eval_phi0",
    "recover_left",
]


@dataclass(frozen=True)
class JumpKernelsLeft:
    """Mirror jump weights, built from the dual reflection ratios.

    p1 and p2 carry the dual ratios with the opposite phase sign of the
    right-side kernels; p3 and p4 are the mirrored lower-ray weights
    and reduce to pure exponentials for reflectionless data.
    """

    data: RayDataRight
    x: float
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    p4: np.ndarray

    @property
    def tau_grid(self) -> RealGrid:
        return self.data.tau_grid


def jump_kernels_left(data: RayDataRight, x: float) -> JumpKernelsLeft:
    tau = data.tau
    k1 = ZETA1 * data.s2_dual * np.exp(+1j * SQRT3 * tau * x)
    k2 = ZETA2 * data.s1_dual * np.exp(-1j * SQRT3 * tau * x)
    p3 = (1.0 + k1) * np.exp(-tau * x * (ZETA1 - 1.0))
    p4 = -(1.0 + k2) * np.exp(-tau * x * (ZETA2 - 1.0))
    return JumpKernelsLeft(data=data, x=x, p1=k1, p2=-k2, p3=p3, p4=p4)


@dataclass(frozen=True)
class DualUnknowns:
    """Left-side solution at one point x.

    phi1_plus and phi2_plus sample the mirrored edge boundary values on
    the tau grid; Rp and Rhatp are the residue coefficients of the
    left-continued field at the mirrored bound scales.
    """

    tau_grid: RealGrid
    x: float
    phi1_plus: np.ndarray
    phi2_plus: np.ndarray
    Rp: Tuple[complex, ...] = ()
    Rhatp: Tuple[complex, ...] = ()
    bound: Optional[BoundStateSet] = None
    cond: float = 0.0
    gram_residual: float = 0.0


def _wrap_mirror(m: MarchenkoUnknowns) -> DualUnknowns:
    return DualUnknowns(
        tau_grid=m.tau_grid, x=m.x,
        phi1_plus=m.psi1_plus, phi2_plus=m.psi2_plus,
        Rp=m.R, Rhatp=m.Rhat, bound=m.bound,
        cond=m.cond, gram_residual=m.gram_residual,
    )


def solve_marchenko_left(
    kernels: JumpKernelsLeft,
    bound: Optional[BoundStateSet] = None,
    table: Optional[CollocationTable] = None,
) -> DualUnknowns:
    """Solve the mirrored collocation system at the kernel's point x.

    Delegates to the coupled right-side factorization, which solves
    both sides at once, and returns its mirror half.  Error behaviour
    matches solve_marchenko_right.
    """
    right = solve_marchenko_right(
        jump_kernels_right(kernels.data, kernels.x), bound=bound, table=table
    )
    assert right.mirror is not None
    return _wrap_mirror(right.mirror)


def solve_left_on_grid(
    data: RayDataRight,
    xs: Sequence[float],
    table: Optional[CollocationTable] = None,
) -> List[DualUnknowns]:
    from .inverse_right import build_collocation

    if table is None and not data.is_reflectionless():
        table = build_collocation(data.tau_grid)
    return [
        solve_marchenko_left(jump_kernels_left(data, x), table=table)
        for x in xs
    ]


def _as_right(sol: DualUnknowns) -> MarchenkoUnknowns:
    return MarchenkoUnknowns(
        tau_grid=sol.tau_grid, x=sol.x,
        psi1_plus=sol.phi1_plus, psi2_plus=sol.phi2_plus,
        R=sol.Rp, Rhat=sol.Rhatp, bound=sol.bound, reflected=True,
    )


def eval_phi0(
    sol: DualUnknowns, kernels: JumpKernelsLeft, lam: complex
) -> complex:
    """Left-continued normalized field at lam in the open lower wedge.

    Reflection negates the spectral parameter, so the value equals the
    mirrored upper-wedge field at -lam; poles sit at the mirrored bound
    scales and the same exclusion radius applies.
    """
    ang = math.atan2(lam.imag, lam.real)
    if not (-5 * math.pi / 6 < ang < -math.pi / 6):
        raise ValueError("evaluation point must lie in the open lower wedge")
    from .inverse_right import eval_psi0

    proxy = _as_right(sol)
    return eval_psi0(
        proxy, jump_kernels_right(kernels.data, kernels.x), -lam
    )


def recover_left(
    sols: Sequence[DualUnknowns],
    fit_lambdas: Optional[np.ndarray] = None,
) -> RecoveredPotentials:
    """Potential recovery on the left half axis from a sweep of solves.

    The mirrored large-lambda expansion yields the left tail mass P and
    the left moment field Q = p + i * (mass of q left of x) directly;
    both fields live at the original coordinate x, not the reflected
    one.  q is the fourth-order x derivative of Im Q.
    """
    if not sols:
        raise ValueError("no solutions to recover from")
    from .inverse_right import _tail_fit

    lams = _fit_points() if fit_lambdas is None else np.asarray(fit_lambdas)
    xs = np.array([s.x for s in sols], dtype=float)
    order = np.argsort(xs)
    xs = xs[order]
    P = np.empty(xs.size, dtype=complex)
    Q = np.empty(xs.size, dtype=complex)
    for j, idx in enumerate(order):
        c1, c2 = _tail_fit(_as_right(sols[idx]), lams)
        P[j] = FIT_MASS * c1
        Q[j] = FIT_MOMENT * np.conj(c2 - c1 * c1 / 2.0)
    p = Q.real.copy()
    return RecoveredPotentials(xgrid=xs, P=P, Q=Q, p=p, q=_dx_imag(Q, xs))
