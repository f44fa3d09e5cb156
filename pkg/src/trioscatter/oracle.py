"""Independent ODE integration used to cross-check the Volterra engines.

Integrates the canonical third-order system

    y''' = i*lam**3*y + 2*p(x)*y' + (p'(x) - i*q(x))*y

with an explicit high-order Runge-Kutta method (DOP853), starting from
exact free-solution data at the endpoint nearest the normalization side
and sweeping across the grid.  This shares no code with the marching
solver: the potential enters through cubic splines, the stepping is
adaptive, and nothing about the integral-equation structure is reused.

Shooting across a range L amplifies parasitic exponential modes by up
to exp(sqrt(3)*|lam|*L); callers comparing against the oracle should
keep |lam|*L moderate (the tests use short grids for exactly this
reason) or rely on the finite-difference residual check instead, which
is immune to mode growth.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .numerics import ComplexSamples
from .jost import PotentialPair, Side, SolverDomainError
from .rootsys import SQRT3, ZETA

__all__ = ["ode_jost", "ode_residual", "THIRD_DERIV_STENCIL"]

# Seven-point fourth-order stencil for the third derivative.
THIRD_DERIV_STENCIL = np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]) / 8.0

# First derivative, five-point fourth order.
_D1_STENCIL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def ode_jost(lam: complex, pot: PotentialPair, side: Side, k: int,
             rtol: float = 1e-11, atol: float = 1e-12):
    """Integrate the k-th Jost column across pot.xgrid.

    Returns (val, d1, d2) as ComplexSamples.  Initial data is the free
    exponential at the last node (side PLUS_INFINITY, swept backward)
    or the first node (side MINUS_INFINITY, swept forward).
    """
    lam = complex(lam)
    if lam == 0:
        raise SolverDomainError("lambda = 0 rejected")
    if k not in (0, 1, 2):
        raise ValueError("column index k must be 0, 1, or 2")
    x = pot.xgrid.nodes
    sp_p = CubicSpline(x, pot.p)
    sp_c = CubicSpline(x, pot.dp - 1j * pot.q)
    il3 = 1j * lam**3

    def rhs(t, y):
        return [y[1], y[2], il3 * y[0] + 2 * sp_p(t) * y[1] + sp_c(t) * y[0]]

    mu = -1j * lam * ZETA[k]
    if side is Side.PLUS_INFINITY:
        x0, x1 = x[-1], x[0]
        t_eval = x[::-1]
    else:
        x0, x1 = x[0], x[-1]
        t_eval = x
    e0 = np.exp(mu * x0)
    y0 = np.array([e0, mu * e0, mu**2 * e0], dtype=complex)
    growth = SQRT3 * abs(lam) * (x[-1] - x[0])
    if growth > 220.0:
        raise SolverDomainError(
            f"shooting range too long for |lambda|={abs(lam):.3g}: "
            f"parasitic growth exp({growth:.0f})"
        )
    sol = solve_ivp(rhs, (x0, x1), y0, method="DOP853", t_eval=t_eval,
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"ODE integration failed: {sol.message}")
    ys = sol.y
    if side is Side.PLUS_INFINITY:
        ys = ys[:, ::-1]
    return (
        ComplexSamples(pot.xgrid, np.ascontiguousarray(ys[0])),
        ComplexSamples(pot.xgrid, np.ascontiguousarray(ys[1])),
        ComplexSamples(pot.xgrid, np.ascontiguousarray(ys[2])),
    )


def ode_residual(val: ComplexSamples, lam: complex, pot: PotentialPair) -> float:
    """Sup-norm FD residual of the canonical equation, relative to sup|y|.

    Uses interior fourth-order stencils; insensitive to which engine
    produced the samples, so it serves as a truth check at spectral
    points where shooting would be contaminated.  The stencil error
    grows like (|lam|*h)**4 against the |lam|**3 term, so thresholds
    are only meaningful while |lam|*h stays well below 1.
    """
    y = val.values
    x = val.grid.nodes
    h = val.grid.spacing()
    n = y.size
    if n < 7:
        raise ValueError("need at least 7 nodes for the residual stencil")
    i0, i1 = 3, n - 3
    d3 = np.zeros(n, dtype=complex)
    for m, cm in enumerate(THIRD_DERIV_STENCIL):
        if cm:
            d3[i0:i1] += cm * y[i0 - 3 + m : i1 - 3 + m]
    d3 /= h**3
    d1 = np.zeros(n, dtype=complex)
    for m, cm in enumerate(_D1_STENCIL):
        if cm:
            d1[i0:i1] += cm * y[i0 - 2 + m : i1 - 2 + m]
    d1 /= h
    res = (
        -1j * d3[i0:i1]
        + 1j * (pot.dp[i0:i1] * y[i0:i1] + pot.p[i0:i1] * d1[i0:i1])
        + 1j * pot.p[i0:i1] * d1[i0:i1]
        + pot.q[i0:i1] * y[i0:i1]
        - lam**3 * y[i0:i1]
    )
    scale = float(np.max(np.abs(y)))
    if scale == 0.0:
        return float(np.max(np.abs(res)))
    return float(np.max(np.abs(res))) / scale
