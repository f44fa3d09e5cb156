"""Cube-root geometry of the spectral plane and the third-order exponential basis.

The whole solver is organized around the three cube roots of unity
``zeta_k = exp(2*pi*i*k/3)``.  Two ingredients live here:

* the fundamental system ``s_p`` of the model equation ``y''' = y``,

      s_p(z) = (1/3) * sum_k zeta_k**(-p) * exp(z*zeta_k),   p = 0, 1, 2,

  which plays the role sin/cos play for second order.  All Volterra
  kernels downstream are built from these three functions.
* the partition of the punctured lambda-plane into six 60-degree slices,
  the six boundary rays, and the 120-degree holomorphy sectors
  ``Omega_k`` / ``Omega_k^-`` assembled from them.

Angles are measured counterclockwise from the positive real axis.  The
sector layout (degrees):

    Omega_0 = (210, 330)   central ray 270    Omega_0^- = (30, 150)
    Omega_1 = (90, 210)    central ray 150    Omega_1^- = (270, 30)
    Omega_2 = (330, 90)    central ray 30     Omega_2^- = (150, 270)

Outgoing rays ``l_k`` rotated by i sit at 90/210/330 degrees (k=0,1,2);
their opposites ("hatted" rays) at 270/30/150 degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

SQRT3 = math.sqrt(3.0)

_ZETA1 = complex(-0.5, SQRT3 / 2.0)
_ZETA2 = complex(-0.5, -SQRT3 / 2.0)


@dataclass(frozen=True)
class UnityRoots:
    """The cube roots of unity as a fixed, immutable triple."""

    zeta0: complex = 1.0 + 0.0j
    zeta1: complex = _ZETA1
    zeta2: complex = _ZETA2

    def as_array(self) -> np.ndarray:
        return np.array([self.zeta0, self.zeta1, self.zeta2])

    def power(self, k: int, p: int) -> complex:
        """zeta_k**p without float exponentiation (exact table lookup)."""
        return self.as_array()[(k * p) % 3]


ROOTS = UnityRoots()
ZETA = ROOTS.as_array()
ZETA1 = ROOTS.zeta1
ZETA2 = ROOTS.zeta2


def sp_eval(p: int, z):
    """Evaluate s_p(z) by direct three-term summation.

    Parameters
    ----------
    p : int
        Index in 0..2.
    z : complex scalar or ndarray

    Returns
    -------
    complex scalar or ndarray matching the shape of ``z``.
    """
    if p not in (0, 1, 2):
        raise ValueError(f"s_p index must be 0, 1 or 2, got {p}")
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for k in range(3):
        acc = acc + ZETA[(-k * p) % 3] * np.exp(z * ZETA[k])
    out = acc / 3.0
    return out[()] if out.ndim == 0 else out


def sp_all(z):
    """All three s_p at once, sharing the exponential evaluations."""
    z = np.asarray(z, dtype=complex)
    ez = [np.exp(z * ZETA[k]) for k in range(3)]
    vals = []
    for p in range(3):
        acc = np.zeros_like(z)
        for k in range(3):
            acc = acc + ZETA[(-k * p) % 3] * ez[k]
        vals.append(acc / 3.0)
    if np.asarray(z).ndim == 0:
        return tuple(v[()] for v in vals)
    return tuple(vals)


class SectorLabel(Enum):
    """Disjoint labels covering the punctured plane.

    Exact boundary directions get ray labels; everything else gets the
    canonical sector of its open 60-degree slice.
    """

    OMEGA0 = "omega0"
    OMEGA1 = "omega1"
    OMEGA2 = "omega2"
    OMEGA0_MINUS = "omega0_minus"
    OMEGA1_MINUS = "omega1_minus"
    OMEGA2_MINUS = "omega2_minus"
    RAY_L0 = "ray_l_zeta0"        # 90 degrees
    RAY_L1 = "ray_l_zeta1"        # 210
    RAY_L2 = "ray_l_zeta2"        # 330
    RAY_LHAT0 = "ray_lhat_zeta0"  # 270
    RAY_LHAT1 = "ray_lhat_zeta1"  # 30
    RAY_LHAT2 = "ray_lhat_zeta2"  # 150
    ORIGIN = "origin"


_RAY_ANGLES = {
    90.0: SectorLabel.RAY_L0,
    210.0: SectorLabel.RAY_L1,
    330.0: SectorLabel.RAY_L2,
    270.0: SectorLabel.RAY_LHAT0,
    30.0: SectorLabel.RAY_LHAT1,
    150.0: SectorLabel.RAY_LHAT2,
}

# Canonical owner of each open slice (lower edge angle -> label).  The
# 120-degree sectors overlap as point sets; classification needs one
# deterministic choice per slice.
_SLICE_OWNER = {
    30.0: SectorLabel.OMEGA0_MINUS,
    90.0: SectorLabel.OMEGA0_MINUS,
    150.0: SectorLabel.OMEGA2_MINUS,
    210.0: SectorLabel.OMEGA0,
    270.0: SectorLabel.OMEGA0,
    330.0: SectorLabel.OMEGA2,
}

_RAY_TOL = 1e-12  # radians; classification snap for exact boundary directions


def classify_sector(lam: complex) -> SectorLabel:
    """Assign the unique label of a nonzero spectral point.

    Raises
    ------
    ValueError
        If ``lam`` is zero (the origin is excluded from the domain).
    """
    lam = complex(lam)
    if lam == 0:
        raise ValueError("lambda = 0 has no sector (punctured plane)")
    ang = math.degrees(math.atan2(lam.imag, lam.real)) % 360.0
    for ray_ang, label in _RAY_ANGLES.items():
        d = abs(ang - ray_ang)
        d = min(d, 360.0 - d)
        if math.radians(d) <= _RAY_TOL:
            return label
    lower = (math.floor((ang - 30.0) / 60.0) * 60.0 + 30.0) % 360.0
    return _SLICE_OWNER[lower]


_OMEGA_ARCS = {0: (210.0, 330.0), 1: (90.0, 210.0), 2: (330.0, 90.0)}
_OMEGA_CENTER = {0: 270.0, 1: 150.0, 2: 30.0}


def _in_arc(ang: float, lo: float, hi: float) -> bool:
    if lo < hi:
        return lo < ang < hi
    return ang > lo or ang < hi


def omega_contains(k: int, lam: complex, minus: bool = False,
                   closed: bool = False) -> bool:
    """Membership test for the (overlapping) sector Omega_k or Omega_k^-.

    The open sector always includes its own central ray.  With
    ``closed=True`` both edge rays are included as well, which is the
    admissibility region of the Volterra marching solver.
    """
    lam = complex(lam)
    if lam == 0:
        return False
    ang = math.degrees(math.atan2(lam.imag, lam.real)) % 360.0
    lo, hi = _OMEGA_ARCS[k]
    if minus:
        lo, hi = (lo + 180.0) % 360.0, (hi + 180.0) % 360.0
    if _in_arc(ang, lo, hi):
        return True
    tol = math.degrees(_RAY_TOL)
    if closed:
        dlo = min(abs(ang - lo), 360.0 - abs(ang - lo))
        dhi = min(abs(ang - hi), 360.0 - abs(ang - hi))
        if dlo <= tol or dhi <= tol:
            return True
    center = (_OMEGA_CENTER[k] + (180.0 if minus else 0.0)) % 360.0
    d = min(abs(ang - center), 360.0 - abs(ang - center))
    return d <= tol


def ray_point(label: SectorLabel, radius: float) -> complex:
    """A point at the given radius on one of the six boundary rays."""
    angles = {v: k for k, v in _RAY_ANGLES.items()}
    if label not in angles:
        raise ValueError(f"{label} is not a ray label")
    th = math.radians(angles[label])
    return radius * complex(math.cos(th), math.sin(th))


def involute(f_of_conj: complex) -> complex:
    """The plus-involution on values: f_plus(lam) = conj(f(conj(lam)))."""
    return np.conj(f_of_conj)
