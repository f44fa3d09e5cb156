"""Transition matrix, scattering ratios, and bound-state location.

The transition matrix T expresses the Jost columns normalized at
-infinity through those normalized at +infinity.  Its first row is a
Wronskian-cofactor bilinear form of the minus-side column 0 against
involuted plus-side columns, evaluated at one grid node (the formula is
x-independent, and that is checked at three nodes); the other rows are
the first row at rotated spectral points, which on the real axis are
available inside the same two bundles by index shuffling.

Scattering ratios divide row 0 by t00; dual ratios come from the
reciprocal matrix.  Bound states are the double zeros of t00 in the
lower-middle sector, located by argument-principle subdivision plus
Newton refinement on the derivative.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .jost import JostBundle, PotentialPair, Side, jost_left, jost_right, march_normalized
from .numerics import RealGrid
from .rootsys import SQRT3, ZETA, ZETA1, ZETA2, SectorLabel

__all__ = [
    "TransitionMatrix",
    "ScatteringCoeffs",
    "BoundStateSet",
    "wronskian",
    "transition_matrix",
    "scattering_coefficients",
    "locate_bound_states",
    "t00_at",
    "row0_at",
    "real_line_scattering",
    "ray_scattering_right",
    "ray_scattering_dual",
    "RAY_TAGS",
]

# Hermitian pairing for the conjugation identity: conjugating a Jost
# column swaps the boundary modes with conjugate exponents (1 <-> 2).
_K = np.array(
    [[1.0, 0.0, 0.0], [0.0, 0.0, ZETA1], [0.0, ZETA2, 0.0]], dtype=complex
)
_CUBE_ROOTS = np.array([1.0 + 0j, ZETA1, ZETA2])

RAY_TAGS = (
    "zeta0_out", "zeta1_out", "zeta2_out",
    "zeta0_in", "zeta1_in", "zeta2_in",
)

# Ray tag -> unit direction of the spectral parameterization lam = tau*dir.
RAY_DIRECTIONS = {
    "zeta0_out": -1j,
    "zeta1_out": -1j * ZETA1,
    "zeta2_out": -1j * ZETA2,
    "zeta0_in": 1j,
    "zeta1_in": 1j * ZETA1,
    "zeta2_in": 1j * ZETA2,
}


def wronskian(f, g) -> complex:
    """Pairing f'*g - g'*f of two (value, derivative) pairs."""
    fv, fd = f
    gv, gd = g
    return fd * gv - gd * fv


@dataclass(frozen=True)
class TransitionMatrix:
    """3x3 transition matrix at a real spectral point."""

    lam: complex
    t: np.ndarray
    det_class: complex = field(default=0j)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=complex)
        if t.shape != (3, 3):
            raise ValueError("t must be 3x3")
        object.__setattr__(self, "t", t)
        d = np.linalg.det(t)
        cls = _CUBE_ROOTS[np.argmin(np.abs(_CUBE_ROOTS - d))]
        if abs(d - cls) > 1e-6 * max(1.0, abs(d)):
            raise ValueError(
                f"det T = {d:.8g} not within 1e-6 of a cube root of unity"
            )
        object.__setattr__(self, "det_class", complex(cls))
        if abs(self.lam.imag) <= 1e-9 * abs(self.lam):
            dev = self.conjugation_residual()
            if dev > 1e-6:
                raise ValueError(
                    f"conjugation-identity residual {dev:.2e} exceeds 1e-6 "
                    f"at lambda={self.lam}"
                )

    def conjugation_residual(self) -> float:
        """Entrywise deviation of T^t K conj(T) - det*K on the real axis.

        Conjugating a column swaps the two oscillatory boundary modes
        whose exponents are complex conjugates of each other, so the
        quadratic invariant pairs index 1 with index 2: K is the
        Hermitian matrix with K[0,0] = 1, K[1,2] = zeta1, K[2,1] = zeta2
        and zeros elsewhere.
        """
        lhs = self.t.T @ _K @ self.t.conj()
        return float(np.max(np.abs(lhs - self.det_class * _K)))

    def reciprocal(self) -> np.ndarray:
        return np.linalg.inv(self.t)


@dataclass(frozen=True)
class ScatteringCoeffs:
    """Six scattering ratios sampled over a set of spectral points.

    Entries that are not computable on a given ray are NaN.
    """

    lambda_grid: np.ndarray
    r0: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    r0_dual: np.ndarray
    s1_dual: np.ndarray
    s2_dual: np.ndarray

    def __post_init__(self):
        lg = np.asarray(self.lambda_grid, dtype=complex)
        object.__setattr__(self, "lambda_grid", lg)
        for name in ("r0", "s1", "s2", "r0_dual", "s1_dual", "s2_dual"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != lg.shape:
                raise ValueError(f"{name} must match lambda_grid")
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class BoundStateSet:
    """Double zeros of t00 in the lower-middle sector, split by ray.

    mu lists the positive scales of zeros on the 120-degree ray
    (points mu*zeta1); nu the negative scales of zeros on the 60-degree
    ray (points nu*zeta2).  All multiplicities are 2 under the standing
    assumption; the locator verifies each by a winding integral.
    """

    mu: tuple
    nu: tuple
    multiplicities: tuple
    winding_verified: bool = True
    flags: tuple = ()

    @property
    def count(self) -> int:
        return len(self.mu) + len(self.nu)

    def points(self) -> List[complex]:
        return [m * ZETA1 for m in self.mu] + [n * ZETA2 for n in self.nu]


# --------------------------------------------------------------------------
# bilinear form and transition rows

# t_{0,m} pairs u0 with the involuted column sigma(m): (0, 2, 1).
_SIGMA = (0, 2, 1)
_ROW_COEF = (1.0 + 0j, ZETA1, ZETA2)


def _gform_node(uv, ud1, ud2, p_at, vv, vd1, vd2) -> complex:
    return uv * vd2 - ud1 * vd1 + ud2 * vv - 2.0 * p_at * uv * vv


def _check_nodes(grid: RealGrid, spread: float = 1.2):
    n0 = int(np.argmin(np.abs(grid.nodes)))
    h = grid.spacing()
    off = max(1, int(round(spread / h)))
    lo = max(0, n0 - off)
    hi = min(grid.n - 1, n0 + off)
    return (lo, n0, hi), n0


def row0_at(lam: complex, j: int, left: JostBundle, right: JostBundle):
    """(t00, t01, t02) evaluated at lam*zeta_j from two real-lam bundles.

    Requires real lam: the involuted columns are then plain conjugates
    of the stored plus-side columns, and rotated arguments permute the
    column index.
    """
    if left.pot is None:
        raise ValueError("left bundle must carry its potential")
    grid = left.xgrid
    nodes, n0 = _check_nodes(grid)
    p = left.pot.p
    lam_j = lam * ZETA[j]
    denom = 3.0 * lam_j**2
    out = []
    for m in range(3):
        vidx = (3 - j + _SIGMA[m]) % 3
        vals = []
        for idx in nodes:
            g = _gform_node(
                left.val[j].values[idx],
                left.d1[j].values[idx],
                left.d2[j].values[idx],
                p[idx],
                np.conj(right.val[vidx].values[idx]),
                np.conj(right.d1[vidx].values[idx]),
                np.conj(right.d2[vidx].values[idx]),
            )
            vals.append(-_ROW_COEF[m] * g / denom)
        spread = max(abs(vals[0] - vals[1]), abs(vals[2] - vals[1]))
        scale = max(abs(vals[1]), 1e-3)
        if spread > 1e-6 * scale:
            raise ValueError(
                f"transition entry not x-independent: spread {spread:.2e} "
                f"at lambda*zeta_{j}={lam_j:.5g} (entry m={m})"
            )
        out.append(vals[1])
    return tuple(out)


def transition_matrix(lam: complex, left: JostBundle,
                      right: JostBundle) -> TransitionMatrix:
    """Full 3x3 transition matrix at a real spectral point."""
    lam = complex(lam)
    if abs(lam) < 1e-8:
        raise ValueError("lambda too small: the system determinant degenerates")
    if abs(lam.imag) > 1e-9 * abs(lam):
        raise ValueError(
            "full transition matrix requires real lambda; use t00_at for "
            "complex points"
        )
    if left.side is not Side.MINUS_INFINITY or right.side is not Side.PLUS_INFINITY:
        raise ValueError("need a minus-side and a plus-side bundle, in order")
    if left.lam != right.lam or left.lam != lam:
        raise ValueError("bundles must be at the given lambda")
    t = np.empty((3, 3), dtype=complex)
    for k in range(3):
        row0 = row0_at(lam, k, left, right)
        for l in range(3):
            t[k, l] = row0[(l - k) % 3]
    return TransitionMatrix(lam=lam, t=t)


def scattering_coefficients(tm: TransitionMatrix):
    """(r0, s1, s2, r0_dual, s1_dual, s2_dual) from one transition matrix."""
    t00 = tm.t[0, 0]
    if abs(t00) <= 1e-12:
        raise ValueError(
            "t00 vanishes to working precision: spectral point is at or "
            "near a bound state"
        )
    r0 = 1.0 / t00
    s1 = tm.t[0, 1] / t00
    s2 = tm.t[0, 2] / t00
    td = tm.reciprocal()
    t00d = td[0, 0]
    if abs(t00d) <= 1e-12:
        raise ValueError("dual t00 vanishes to working precision")
    return (r0, s1, s2, 1.0 / t00d, td[0, 1] / t00d, td[0, 2] / t00d)


def _column_balance(t: np.ndarray, det: complex) -> float:
    """|t00|^2 + zeta1*t10*conj(t20) + zeta2*t20*conj(t10) - det."""
    z = t[1, 0] * np.conj(t[2, 0])
    return abs(abs(t[0, 0]) ** 2 + ZETA1 * z + ZETA2 * np.conj(z) - det)


def unitarity_residual(tm: TransitionMatrix) -> float:
    """Energy-balance residual for the incident wave from the right.

    The (0,0) entry of the conjugation identity weighs the first
    column: det T = |t00|^2 + 2 Re(zeta1 * t10 * conj(t20)) at real
    lambda.  Dividing by |t00|^2 turns it into a statement about the
    transition coefficient 1/t00 and the cross flux of the two
    scattered channels.
    """
    return _column_balance(tm.t, tm.det_class)


def dual_unitarity_residual(tm: TransitionMatrix) -> float:
    """Energy-balance residual for the reciprocal matrix.

    Inverting the conjugation identity shows inv(T) satisfies the same
    relation with det inv(T) = conj(det T) on the right-hand side.
    """
    return _column_balance(tm.reciprocal(), np.conj(tm.det_class))


# --------------------------------------------------------------------------
# single-entry evaluation at complex spectral points


def _u0_columns(lam: complex, pot: PotentialPair):
    """Column 0 normalized at -infinity: (val, d1, d2) arrays."""
    refl = pot.reflect()
    psi, chi, xi, _ = march_normalized(-lam, refl)
    mu = 1j * lam
    env = np.exp(mu * refl.xgrid.nodes)
    val = (psi * env)[::-1].copy()
    d1 = -(mu * chi * env)[::-1].copy()
    d2 = (mu**2 * xi * env)[::-1].copy()
    return val, d1, d2


def _v_columns(lam_eff: complex, pot: PotentialPair):
    """Plus-side column at an effective point: (val, d1, d2) arrays."""
    psi, chi, xi, _ = march_normalized(lam_eff, pot)
    mu = -1j * lam_eff
    env = np.exp(mu * pot.xgrid.nodes)
    return psi * env, mu * chi * env, mu**2 * xi * env


def t00_at(lam: complex, pot: PotentialPair) -> complex:
    """t00 at any point of the closed lower-middle sector (fresh solves).

    Pairs u0(lam) with the involution of the plus-side column 0, whose
    base point conj(lam) lies in the closed bottom sector whenever lam
    is in the closed top-middle one, so both marches stay admissible at
    any modulus.
    """
    lam = complex(lam)
    if abs(lam) < 1e-8:
        raise ValueError("lambda too small")
    uval, ud1, ud2 = _u0_columns(lam, pot)
    vval, vd1, vd2 = _v_columns(np.conj(lam), pot)
    vval, vd1, vd2 = np.conj(vval), np.conj(vd1), np.conj(vd2)
    grid = pot.xgrid
    nodes, n0 = _check_nodes(grid)
    denom = 3.0 * lam**2
    vals = [
        -_gform_node(uval[i], ud1[i], ud2[i], pot.p[i], vval[i], vd1[i], vd2[i])
        / denom
        for i in nodes
    ]
    spread = max(abs(vals[0] - vals[1]), abs(vals[2] - vals[1]))
    if spread > 1e-5 * max(abs(vals[1]), 0.05):
        raise ValueError(
            f"t00 evaluation not x-independent at lambda={lam:.5g}: "
            f"spread {spread:.2e}"
        )
    return vals[1]


def _t0m_on_ray(lam: complex, m: int, pot: PotentialPair) -> complex:
    """t0m at a sector-edge point (fresh solves; m in {0,1,2})."""
    lam = complex(lam)
    uval, ud1, ud2 = _u0_columns(lam, pot)
    lam_bar = np.conj(lam)
    eff = lam_bar * ZETA[_SIGMA[m]]
    vval, vd1, vd2 = _v_columns(eff, pot)
    vval, vd1, vd2 = np.conj(vval), np.conj(vd1), np.conj(vd2)
    grid = pot.xgrid
    nodes, n0 = _check_nodes(grid)
    denom = 3.0 * lam**2
    vals = [
        -_ROW_COEF[m]
        * _gform_node(uval[i], ud1[i], ud2[i], pot.p[i], vval[i], vd1[i], vd2[i])
        / denom
        for i in nodes
    ]
    spread = max(abs(vals[0] - vals[1]), abs(vals[2] - vals[1]))
    if spread > 1e-5 * max(abs(vals[1]), 0.05):
        if max(abs(v) for v in vals) <= 2.0e-6:
            # decayed beneath the quadrature noise floor: honest zero
            return 0.0
        raise ValueError(
            f"t0{m} evaluation not x-independent at lambda={lam:.5g}"
        )
    return vals[1]


# --------------------------------------------------------------------------
# sweeps


def real_line_scattering(pot: PotentialPair,
                         lams: Sequence[float]) -> ScatteringCoeffs:
    """Scattering ratios over a real-axis grid (full matrices)."""
    lams = np.asarray(lams, dtype=float)
    cols = {k: np.empty(lams.size, dtype=complex)
            for k in ("r0", "s1", "s2", "r0_dual", "s1_dual", "s2_dual")}
    for i, lam in enumerate(lams):
        tm = transition_matrix(
            lam, jost_left(lam, pot), jost_right(lam, pot)
        )
        vals = scattering_coefficients(tm)
        for key, v in zip(
            ("r0", "s1", "s2", "r0_dual", "s1_dual", "s2_dual"), vals
        ):
            cols[key][i] = v
    return ScatteringCoeffs(lambda_grid=lams.astype(complex), **cols)


def ray_scattering_right(pot: PotentialPair,
                         tau_grid: RealGrid) -> Dict[str, ScatteringCoeffs]:
    """Direct-coefficient samples on the two outgoing sector-edge rays.

    Returns {"zeta1_out": ..., "zeta2_out": ...}; r0 and the reachable
    s-component are filled on each, the rest NaN.  The ratios stay
    smooth down to tau = 0 (the individual entries grow like 1/tau**2
    but their relative accuracy does not degrade).
    """
    tau = tau_grid.nodes
    n = tau.size
    nan = np.full(n, np.nan + 0j)
    t00_1 = np.empty(n, dtype=complex)
    t01_1 = np.empty(n, dtype=complex)
    t00_2 = np.empty(n, dtype=complex)
    t02_2 = np.empty(n, dtype=complex)
    for i, tv in enumerate(tau):
        lam1 = -1j * tv * ZETA1
        t00_1[i] = _t0m_on_ray(lam1, 0, pot)
        t01_1[i] = _t0m_on_ray(lam1, 1, pot)
        lam2 = -1j * tv * ZETA2
        t00_2[i] = _t0m_on_ray(lam2, 0, pot)
        t02_2[i] = _t0m_on_ray(lam2, 2, pot)
    s1 = t01_1 / t00_1
    r0_1 = 1.0 / t00_1
    s2 = t02_2 / t00_2
    r0_2 = 1.0 / t00_2
    out1 = ScatteringCoeffs(
        lambda_grid=-1j * tau * ZETA1, r0=r0_1, s1=s1, s2=nan.copy(),
        r0_dual=nan.copy(), s1_dual=nan.copy(), s2_dual=nan.copy(),
    )
    out2 = ScatteringCoeffs(
        lambda_grid=-1j * tau * ZETA2, r0=r0_2, s1=nan.copy(), s2=s2,
        r0_dual=nan.copy(), s1_dual=nan.copy(), s2_dual=nan.copy(),
    )
    return {"zeta1_out": out1, "zeta2_out": out2}


def ray_scattering_dual(pot: PotentialPair,
                        tau_grid: RealGrid) -> Dict[str, ScatteringCoeffs]:
    """Dual-coefficient samples on the two incoming rays.

    The dual data of (p, q) on ray +i*tau*zeta_j equals the direct data
    of the reflected pair on -i*tau*zeta_j, which is how it is computed.
    """
    refl = pot.reflect()
    direct = ray_scattering_right(refl, tau_grid)
    tau = tau_grid.nodes
    n = tau.size
    nan = np.full(n, np.nan + 0j)
    out1 = ScatteringCoeffs(
        lambda_grid=1j * tau * ZETA1,
        r0=nan.copy(), s1=nan.copy(), s2=nan.copy(),
        r0_dual=direct["zeta1_out"].r0,
        s1_dual=direct["zeta1_out"].s1,
        s2_dual=nan.copy(),
    )
    out2 = ScatteringCoeffs(
        lambda_grid=1j * tau * ZETA2,
        r0=nan.copy(), s1=nan.copy(), s2=nan.copy(),
        r0_dual=direct["zeta2_out"].r0,
        s1_dual=nan.copy(),
        s2_dual=direct["zeta2_out"].s2,
    )
    return {"zeta1_in": out1, "zeta2_in": out2}


# --------------------------------------------------------------------------
# bound states


def _winding_on_circle(f: Callable, center: complex, radius: float,
                       n: int = 48) -> int:
    angles = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    vals = np.array([f(center + radius * cmath.exp(1j * a)) for a in angles])
    if np.any(vals == 0) or not np.all(np.isfinite(vals)):
        raise ValueError("zero or non-finite sample on winding circle")
    args = np.angle(vals)
    d = np.diff(np.concatenate([args, args[:1]]))
    d = (d + math.pi) % (2.0 * math.pi) - math.pi
    total = d.sum() / (2.0 * math.pi)
    return int(round(total))


def _winding_on_path(f: Callable, path: np.ndarray) -> float:
    vals = np.array([f(z) for z in path])
    if np.any(vals == 0) or not np.all(np.isfinite(vals)):
        raise ValueError("zero or non-finite sample on winding path")
    args = np.angle(vals)
    d = np.diff(args)
    d = (d + math.pi) % (2.0 * math.pi) - math.pi
    return float(d.sum() / (2.0 * math.pi))


def _sector_cell_path(r0: float, r1: float, a0: float, a1: float,
                      per_edge: int = 14) -> np.ndarray:
    ts = np.linspace(0.0, 1.0, per_edge, endpoint=False)
    seg1 = r0 + (r1 - r0) * ts
    arc1 = r1 * np.exp(1j * (a0 + (a1 - a0) * ts))
    seg2 = r1 - (r1 - r0) * ts
    arc2 = r0 * np.exp(1j * (a1 - (a1 - a0) * ts))
    path = np.concatenate([
        seg1 * cmath.exp(1j * a0), arc1,
        seg2 * cmath.exp(1j * a1), arc2,
    ])
    return np.concatenate([path, path[:1]])


def _newton_on_derivative(f: Callable, z0: complex, h_rel: float = 1e-5,
                          iters: int = 12) -> complex:
    z = z0
    for _ in range(iters):
        h = h_rel * max(1.0, abs(z))
        fp = f(z + h)
        fm = f(z - h)
        fc = f(z)
        d1 = (fp - fm) / (2.0 * h)
        d2 = (fp - 2.0 * fc + fm) / h**2
        if d2 == 0:
            break
        step = d1 / d2
        z = z - step
        if abs(step) < 1e-12 * max(1.0, abs(z)):
            break
    return z


def locate_bound_states(t00: Callable, a: float = 1.0,
                        radius: Optional[float] = None,
                        r_min: float = 0.01,
                        sector: SectorLabel = SectorLabel.OMEGA0_MINUS,
                        n_radial: int = 3, n_angular: int = 3) -> BoundStateSet:
    """Find double zeros of t00 inside the truncated lower-middle sector.

    Subdivides the annular sector r_min <= |lam| <= radius into cells,
    computes the winding of t00 around each, refines nonzero cells by
    Newton iteration on the numerical derivative (double zeros are
    simple zeros of it), and verifies multiplicity 2 on a small circle.

    The default radius is a/2: the disk where the constructive
    solvability bounds hold.  Pass a larger radius explicitly to search
    farther out.  The default angular split keeps both zero-carrying
    rays (60 and 120 degrees) interior to cells.
    """
    if sector is not SectorLabel.OMEGA0_MINUS:
        raise ValueError("only the lower-middle sector is supported")
    big_r = radius if radius is not None else 0.5 * a
    ang0, ang1 = math.radians(30.0), math.radians(150.0)
    cache: Dict[complex, complex] = {}

    def f(z: complex) -> complex:
        key = complex(round(z.real, 12), round(z.imag, 12))
        if key not in cache:
            cache[key] = t00(z)
        return cache[key]

    radii = np.linspace(r_min, big_r, n_radial + 1)
    angles = np.linspace(ang0, ang1, n_angular + 1)
    flags: List[str] = []
    zeros: List[complex] = []
    total_winding = 0
    for ir in range(n_radial):
        for ia in range(n_angular):
            path = _sector_cell_path(radii[ir], radii[ir + 1],
                                     angles[ia], angles[ia + 1])
            try:
                wind = _winding_on_path(f, path)
            except ValueError:
                flags.append(
                    f"cell({ir},{ia}): zero on contour, subdividing skipped"
                )
                continue
            wi = int(round(wind))
            if abs(wind - wi) > 0.25:
                flags.append(f"cell({ir},{ia}): non-integer winding {wind:.2f}")
                continue
            total_winding += wi
            if wi == 0:
                continue
            if wi % 2 != 0:
                flags.append(f"cell({ir},{ia}): odd winding {wi}")
            found = _refine_cell(f, radii[ir], radii[ir + 1],
                                 angles[ia], angles[ia + 1], wi)
            zeros.extend(found)

    mus: List[float] = []
    nus: List[float] = []
    mults: List[int] = []
    dedup: List[complex] = []
    for z in zeros:
        if any(abs(z - z2) < 1e-6 * max(1.0, abs(z2)) for z2 in dedup):
            continue
        dedup.append(z)
        r = abs(z)
        if (
            r < r_min * (1 + 1e-6)
            or r > big_r * (1 - 1e-6)
            or min(abs(cmath.phase(z) - ang0), abs(cmath.phase(z) - ang1))
            < 1e-6
        ):
            flags.append(f"zero {z:.6g} within 1e-6 of sector boundary")
        w = _winding_on_circle(f, z, max(1e-3, 1e-3 * r))
        if w != 2:
            flags.append(f"zero {z:.6g} has winding {w}, expected 2")
        ang = math.degrees(cmath.phase(z))
        if abs(ang - 120.0) < 1e-3:
            mus.append(r)
        elif abs(ang - 60.0) < 1e-3:
            nus.append(-r)
        else:
            flags.append(f"zero {z:.6g} off both rays (angle {ang:.4f} deg)")
            continue
        mults.append(w)
    expected = 2 * (len(mus) + len(nus))
    verified = total_winding == expected and all(m == 2 for m in mults)
    if total_winding != expected:
        flags.append(
            f"total sector winding {total_winding} != 2(N+M) = {expected}"
        )
    return BoundStateSet(
        mu=tuple(sorted(mus)),
        nu=tuple(sorted(nus, key=abs)),
        multiplicities=tuple(mults),
        winding_verified=verified,
        flags=tuple(flags),
    )


def _refine_cell(f: Callable, r0: float, r1: float, a0: float, a1: float,
                 winding: int) -> List[complex]:
    """Newton-refine the zeros of a cell with nonzero winding.

    Double zeros are simple zeros of the derivative, but so are the
    saddles between neighboring zeros, and Newton started at the cell
    center can drift to one of those.  Seeds therefore start on any
    zero-carrying ray crossing the cell (three radii each) before the
    center, and a candidate only counts if a tiny circle around it
    actually winds.
    """
    seeds: List[complex] = []
    rads = (0.25 * r0 + 0.75 * r1, 0.5 * (r0 + r1), 0.75 * r0 + 0.25 * r1)
    for ray_ang in (math.radians(120.0), math.radians(60.0)):
        if a0 < ray_ang < a1:
            seeds.extend(r * cmath.exp(1j * ray_ang) for r in rads)
    seeds.append(0.5 * (r0 + r1) * cmath.exp(0.5j * (a0 + a1)))
    found: List[complex] = []
    acc = 0
    for z0 in seeds:
        if acc >= winding:
            break
        z = _newton_on_derivative(f, z0)
        if not np.isfinite(z):
            continue
        if any(abs(z - z2) < 1e-8 * max(1.0, abs(z2)) for z2 in found):
            continue
        try:
            w = _winding_on_circle(f, z, max(1e-4, 1e-3 * abs(z)))
        except ValueError:
            continue
        if w < 1:
            continue
        found.append(z)
        acc += w
    return found
