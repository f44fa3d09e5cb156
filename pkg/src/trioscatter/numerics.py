"""Grids, quadrature rules, principal-value integration and tail fitting.

Everything downstream integrates over one of two kinds of grid:

* uniform x-grids over [-X, X] carrying endpoint-corrected trapezoid
  weights (fourth order) for the Volterra marching solver, and
* geometrically graded tau-grids over (0, T] carrying plain trapezoid
  weights, used for the singular ray systems.  Grading exponent 3 keeps
  the uncovered sliver (0, tau_1) down to T/n**3 so the Cauchy
  integrals do not feel it.

The principal-value rule is the subtraction scheme

    PV int f/(tau - t) = int (f(tau) - f(t))/(tau - t) + f(t) * log((T - t)/(t - a))

which reduces the singular integral to a regular one plus an explicit
logarithm.  ``cauchy_row``/``pv_row`` expose the same rules as weight
vectors acting on node samples, which is what the dense collocation
assembly needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RealGrid",
    "ComplexSamples",
    "uniform_grid",
    "gregory_grid",
    "graded_grid",
    "integrate_samples",
    "pv_integrate",
    "cauchy_row",
    "pv_row",
    "fit_inverse_powers",
]


@dataclass(frozen=True)
class RealGrid:
    """Ascending real nodes with positive quadrature weights."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("grid needs at least two nodes")
        if weights.shape != nodes.shape:
            raise ValueError("weights must match nodes")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("nodes must be strictly ascending")
        if not np.all(weights > 0):
            raise ValueError("weights must be positive")

    @property
    def n(self) -> int:
        return self.nodes.size

    def spacing(self) -> float:
        """Uniform step; raises if the grid is not uniform."""
        d = np.diff(self.nodes)
        h = d[0]
        if np.max(np.abs(d - h)) > 1e-9 * h:
            raise ValueError("grid is not uniform")
        return float(h)


@dataclass(frozen=True)
class ComplexSamples:
    """Values of a function at the nodes of a grid."""

    grid: RealGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", values)
        if values.shape != self.grid.nodes.shape:
            raise ValueError("values must match grid nodes")


def _trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    w = np.zeros_like(nodes)
    d = np.diff(nodes)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


def uniform_grid(a: float, b: float, n: int) -> RealGrid:
    """Uniform grid with composite trapezoid weights."""
    if not b > a:
        raise ValueError("need b > a")
    nodes = np.linspace(a, b, n)
    return RealGrid(nodes, _trapezoid_weights(nodes))


# Endpoint correction of the trapezoid rule to fourth order: the three
# nodes nearest each end get weights h*(3/8, 7/6, 23/24).
_GREG4_END = np.array([3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0])


def gregory4_weights(n: int, h: float) -> np.ndarray:
    if n < 8:
        nodes = np.arange(n) * h
        return _trapezoid_weights(nodes)
    w = np.full(n, h)
    w[:3] = _GREG4_END * h
    w[-3:] = _GREG4_END[::-1] * h
    return w


def gregory_grid(a: float, b: float, n: int) -> RealGrid:
    """Uniform grid with fourth-order endpoint-corrected weights."""
    if not b > a:
        raise ValueError("need b > a")
    nodes = np.linspace(a, b, n)
    h = (b - a) / (n - 1)
    return RealGrid(nodes, gregory4_weights(n, h))


def graded_grid(t_max: float, n: int, gamma: float = 3.0) -> RealGrid:
    """Graded grid on (0, t_max]: nodes t_max*(j/n)**gamma, j = 1..n.

    Refinement accumulates toward 0; spacing grows algebraically toward
    the far end.  Plain trapezoid weights over [t_1, t_max].
    """
    if t_max <= 0 or n < 4:
        raise ValueError("need t_max > 0 and n >= 4")
    j = np.arange(1, n + 1, dtype=float)
    nodes = t_max * (j / n) ** gamma
    return RealGrid(nodes, _trapezoid_weights(nodes))


def integrate_samples(samples: ComplexSamples) -> complex:
    """Quadrature of sampled values with the grid's stored weights."""
    return complex(np.dot(samples.grid.weights, samples.values))


def _interior_checks(grid: RealGrid, t: float):
    nodes = grid.nodes
    if not (nodes[0] < t < nodes[-1]):
        raise ValueError(f"pole {t} outside the open grid interval")
    if t - nodes[0] < 0.5 * (nodes[1] - nodes[0]):
        raise ValueError("pole within half a cell of the lower endpoint")
    if nodes[-1] - t < 0.5 * (nodes[-1] - nodes[-2]):
        raise ValueError("pole within half a cell of the upper endpoint")


def pv_integrate(samples: ComplexSamples, t: float) -> complex:
    """Principal value of int f(tau)/(tau - t) dtau over the grid interval."""
    row = pv_row(samples.grid, t)
    return complex(np.dot(row, samples.values))


def pv_row(grid: RealGrid, t: float) -> np.ndarray:
    """Weight vector realizing the subtraction-scheme PV rule.

    The result acts on node samples.  When ``t`` is a node, the
    singular node's contribution is the average of the one-sided
    difference quotients; otherwise f(t) is obtained by local cubic
    interpolation and folded into the row.
    """
    _interior_checks(grid, t)
    nodes, w = grid.nodes, grid.weights
    n = nodes.size
    row = np.zeros(n)
    log_factor = np.log((nodes[-1] - t) / (t - nodes[0]))

    j = int(np.argmin(np.abs(nodes - t)))
    cell = min(
        nodes[j + 1] - nodes[j] if j + 1 < n else np.inf,
        nodes[j] - nodes[j - 1] if j > 0 else np.inf,
    )
    on_node = abs(nodes[j] - t) < 1e-9 * cell

    if on_node:
        mask = np.ones(n, dtype=bool)
        mask[j] = False
        row[mask] += w[mask] / (nodes[mask] - t)
        row[j] -= np.sum(w[mask] / (nodes[mask] - t))
        row[j] += log_factor
        # Singular node: w_j * f'(t), averaged one-sided quotients.
        hp = nodes[j + 1] - nodes[j]
        hm = nodes[j] - nodes[j - 1]
        row[j + 1] += w[j] / (2 * hp)
        row[j] += w[j] * (1 / (2 * hm) - 1 / (2 * hp))
        row[j - 1] -= w[j] / (2 * hm)
        return row

    # Off-node pole: interpolate f(t) from the four nearest nodes.
    row += w / (nodes - t)
    stencil = _cubic_stencil(nodes, t)
    correction = log_factor - np.sum(w / (nodes - t))
    for idx, coeff in stencil:
        row[idx] += coeff * correction
    return row


def _cubic_stencil(nodes: np.ndarray, t: float):
    """Lagrange interpolation weights for f(t) on the 4 nearest nodes."""
    n = nodes.size
    j = int(np.searchsorted(nodes, t))
    lo = min(max(j - 2, 0), n - 4)
    idx = np.arange(lo, lo + 4)
    pts = nodes[idx]
    out = []
    for a in range(4):
        c = 1.0
        for b in range(4):
            if a != b:
                c *= (t - pts[b]) / (pts[a] - pts[b])
        out.append((idx[a], c))
    return out


def cauchy_row(grid: RealGrid, c: complex) -> np.ndarray:
    """Weight vector for int f(tau)/(tau - c) dtau, c anywhere off the nodes.

    Far from the interval the plain rule suffices.  Near or on the real
    axis the integrand develops a feature the bare rule cannot resolve,
    so value- and slope-level subtractions are peeled off and integrated
    analytically; the principal branch of the complex logarithm encodes
    the side from which c approaches the axis, so the row converges to
    the one-sided boundary value (PV plus half-residue) as Im c -> 0.
    """
    nodes, w = grid.nodes, grid.weights
    c = complex(c)
    span = nodes[-1] - nodes[0]
    inside = nodes[0] < c.real < nodes[-1]
    if not inside or abs(c.imag) > 0.25 * span:
        return w / (nodes - c)

    t0 = c.real
    if c.imag == 0.0:
        # Exact-axis pole: fix the branch to the upper-side limit (the
        # ratio below is negative real; float signed zeros would
        # otherwise pick a side arbitrarily).
        log_factor = (
            np.log(abs((nodes[-1] - t0) / (nodes[0] - t0))) + 1j * np.pi
        )
    else:
        log_factor = np.log((nodes[-1] - c) / (nodes[0] - c))
    j = int(np.argmin(np.abs(nodes - t0)))
    cell = min(
        nodes[j + 1] - nodes[j] if j + 1 < grid.n else np.inf,
        nodes[j] - nodes[j - 1] if j > 0 else np.inf,
    )
    on_node = abs(nodes[j] - t0) < 1e-9 * cell
    near_axis = abs(c.imag) < 2.0 * cell and 0 < j < grid.n - 1

    if near_axis and on_node:
        # Pole (nearly) over node j: subtract value and slope there so
        # the remaining integrand is quadrature-friendly.  The node's
        # own base term cancels against the value correction exactly,
        # so neither is materialized (safe even for Im c = 0).
        mask = np.ones(grid.n, dtype=bool)
        mask[j] = False
        row = np.zeros(grid.n, dtype=complex)
        row[mask] = w[mask] / (nodes[mask] - c)
        row[j] = log_factor - np.sum(w[mask] / (nodes[mask] - c))
        slope_int = span + (c - t0) * log_factor
        slope_corr = slope_int - np.sum(
            w[mask] * (nodes[mask] - t0) / (nodes[mask] - c)
        )
        hp = nodes[j + 1] - nodes[j]
        hm = nodes[j] - nodes[j - 1]
        row[j + 1] += slope_corr / (2 * hp)
        row[j] += slope_corr * (1 / (2 * hm) - 1 / (2 * hp))
        row[j - 1] -= slope_corr / (2 * hm)
        return row

    row = np.array(w / (nodes - c), dtype=complex)
    value_corr = log_factor - np.sum(w / (nodes - c))
    for idx, coeff in _cubic_stencil(nodes, t0):
        row[idx] += coeff * value_corr
    return row


def fit_inverse_powers(samples, order: int = 2):
    """Least-squares fit of f(lam) ~ 1 + c1/lam + ... + c_order/lam**order.

    Parameters
    ----------
    samples : sequence of (lam, f) pairs
        Complex abscissae along a ray to infinity with the sampled
        values; f is expected to approach 1.
    order : int
        Number of inverse-power terms; the default matches the
        two-coefficient tail used by the potential recovery.

    Returns
    -------
    tuple of ``order`` complex coefficients (c1, c2, ...).
    """
    lams = np.array([complex(lam) for lam, _ in samples])
    values = np.array([complex(f) for _, f in samples])
    return fit_inverse_powers_at(lams, values, order)


def fit_inverse_powers_at(lams: np.ndarray, values: np.ndarray,
                          order: int = 2):
    lams = np.asarray(lams, dtype=complex)
    values = np.asarray(values, dtype=complex)
    if lams.size != values.size:
        raise ValueError("abscissae and values must match")
    if lams.size < order + 2:
        raise ValueError(f"need at least {order + 2} sample points")
    design = np.column_stack([lams ** (-p) for p in range(1, order + 1)])
    rhs = values - 1.0
    coef, _, rank, _ = np.linalg.lstsq(design, rhs, rcond=None)
    if rank < order:
        raise ValueError("rank-deficient design matrix in tail fit")
    return tuple(coef)
