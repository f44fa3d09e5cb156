"""Command-line front end.

Four subcommands: ``direct`` sweeps scattering data of a potential CSV,
``inverse`` recovers potentials from scattering files, ``reflectionless``
writes the closed-form fixture for one bound scale per sign, ``verify``
runs a quick invariant suite and writes a report.

File formats (UTF-8, LF, deterministic 17-significant-digit decimals):

* potential CSV: header ``x,p,dp,q`` (or ``x,p,q``; dp then filled by
  finite differences), one node per row;
* scattering.csv: header ``ray,tau,...`` with re/im pairs of r0, s1,
  s2 and the dual triple; rows grouped by ray label
  (zeta1_out, zeta2_out, zeta0_in, zeta1_in, zeta2_in);
* bound_states.csv: ``family,scale,multiplicity,winding_verified``;
* recovered_potentials.csv: ``x,re_P,im_P,re_Q,im_Q,p,q`` with the
  right-tail channel on x >= 0 and the left-tail channel on x < 0.

Exit codes: 0 success, 2 malformed input (message carries the line
number), 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from scipy.interpolate import CubicSpline

from .inverse_left import _wrap_mirror, recover_left
from .inverse_right import (
    RayDataRight,
    _trapz_weights,
    build_collocation,
    collect_ray_data,
    jump_kernels_right,
    recover_right,
    solve_marchenko_right,
)
from .jost import (
    PotentialPair,
    SolverConvergenceError,
    SolverDomainError,
    gaussian_pair,
    jost_left,
    jost_right,
    zero_potential,
)
from .numerics import RealGrid, gregory_grid
from .reflectionless import (
    ReflectionlessParams,
    closed_form,
    psi0_closed,
    reflectionless_potentials,
)
from .rootsys import sp_all
from .scatter import (
    BoundStateSet,
    locate_bound_states,
    scattering_coefficients,
    t00_at,
    transition_matrix,
    unitarity_residual,
)

__all__ = ["RunConfig", "run_cli", "main"]

_FMT = "%.17g"

_RAYS = ("zeta1_out", "zeta2_out", "zeta0_in", "zeta1_in", "zeta2_in")

_SCATTER_COLS = (
    "ray", "tau",
    "re_r0", "im_r0", "re_s1", "im_s1", "re_s2", "im_s2",
    "re_r0_dual", "im_r0_dual", "re_s1_dual", "im_s1_dual",
    "re_s2_dual", "im_s2_dual",
)


class CliInputError(Exception):
    """Malformed input file or configuration; exits with code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Run parameters shared by the subcommands.

    The decay-rate/window invariant exp(-a * X_max) <= 1e-6 is a hard
    requirement (truncating the axis earlier poisons every tail
    integral); pushing it below 1e-12 only warns, since that wastes
    nodes without hurting correctness.
    """

    potential_file: str = ""
    a: float = 1.0
    X_max: float = 14.0
    T_max: float = 0.0
    n_x: int = 701
    n_tau: int = 160
    lambda_ray_angle: float = math.radians(85.0)
    fit_lambda_min: float = 4.0
    fit_lambda_count: int = 10
    tolerances: Dict[str, float] = field(default_factory=dict)
    output_dir: str = "."

    def t_max_effective(self) -> float:
        return self.T_max if self.T_max > 0 else 40.0 * max(1.0, self.a)

    def validate(self) -> None:
        if self.n_x < 8 or self.n_tau < 8:
            raise CliInputError("grid sizes n_x and n_tau must be at least 8")
        if self.a <= 0 or self.X_max <= 0:
            raise CliInputError("a and X_max must be positive")
        tail = math.exp(-self.a * self.X_max)
        if tail > 1e-6:
            raise CliInputError(
                "exp(-a*X_max) = %.3g exceeds 1e-6; enlarge X_max" % tail
            )
        if tail < 1e-12:
            print(
                "warning: exp(-a*X_max) = %.3g; X_max is larger than "
                "useful" % tail,
                file=sys.stderr,
            )


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliInputError("config file: %s" % exc) from exc
        known = {f for f in RunConfig.__dataclass_fields__}
        bad = set(raw) - known
        if bad:
            raise CliInputError(
                "config file: unknown keys %s" % ", ".join(sorted(bad))
            )
        cfg = replace(cfg, **raw)
    overrides = {}
    for name in ("a", "X_max", "T_max", "n_x", "n_tau", "output_dir"):
        flag = name.replace("_", "-").lower()
        val = getattr(args, name.lower(), None)
        if val is not None:
            overrides[name] = val
    if getattr(args, "tol", None):
        tols = dict(cfg.tolerances)
        for item in args.tol:
            if "=" not in item:
                raise CliInputError(
                    "--tol expects name=value, got %r" % item
                )
            key, _, sval = item.partition("=")
            try:
                tols[key.strip()] = float(sval)
            except ValueError as exc:
                raise CliInputError(
                    "--tol %s: %r is not a number" % (key, sval)
                ) from exc
        overrides["tolerances"] = tols
    cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


def _threads() -> int:
    raw = os.environ.get("TRIOSCATTER_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


# --------------------------------------------------------------------------
# file formats


def _fmt(v: float) -> str:
    return _FMT % v


def read_potential_csv(path: str) -> Tuple[np.ndarray, ...]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CliInputError("%s: %s" % (path, exc)) from exc
    if not lines:
        raise CliInputError("%s: empty file" % path)
    header = [h.strip() for h in lines[0].split(",")]
    if header == ["x", "p", "dp", "q"]:
        with_dp = True
    elif header == ["x", "p", "q"]:
        with_dp = False
    else:
        raise CliInputError(
            "%s: line 1: header must be x,p,dp,q or x,p,q" % path
        )
    want = 4 if with_dp else 3
    rows = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != want:
            raise CliInputError(
                "%s: line %d: expected %d fields, got %d"
                % (path, ln, want, len(parts))
            )
        try:
            rows.append([float(v) for v in parts])
        except ValueError as exc:
            raise CliInputError(
                "%s: line %d: non-numeric field (%s)" % (path, ln, exc)
            ) from exc
    if len(rows) < 8:
        raise CliInputError("%s: fewer than 8 usable rows" % path)
    arr = np.asarray(rows, dtype=float)
    x = arr[:, 0]
    if np.any(np.diff(x) <= 0):
        bad = int(np.nonzero(np.diff(x) <= 0)[0][0]) + 3
        raise CliInputError(
            "%s: line %d: x values must be strictly increasing" % (path, bad)
        )
    p = arr[:, 1]
    if with_dp:
        dp, q = arr[:, 2], arr[:, 3]
        # Loose sanity gate only: catches swapped columns or sign flips
        # while tolerating coarse sampling.
        fd = (p[2:] - p[:-2]) / (x[2:] - x[:-2])
        scale = max(float(np.max(np.abs(dp))), 1e-300)
        bad = np.abs(fd - dp[1:-1]) > 0.2 * scale + 1e-12
        if np.any(bad):
            ln = int(np.nonzero(bad)[0][0]) + 3
            raise CliInputError(
                "%s: line %d: dp column inconsistent with p" % (path, ln)
            )
    else:
        q = arr[:, 2]
        dp = np.gradient(p, x, edge_order=2)
    return x, p, dp, q


def _resample_potential(
    x: np.ndarray, p: np.ndarray, dp: np.ndarray, q: np.ndarray,
    cfg: RunConfig,
) -> PotentialPair:
    """Cubic-spline resample onto the run grid, zero outside the data.

    dp is rebuilt from the resampled p with the same interior stencil
    the consistency gate uses, so resampling can never trip it; the
    supplied dp column only seeded the read-time sanity check.
    """
    g = gregory_grid(-cfg.X_max, cfg.X_max, cfg.n_x)
    xs = g.nodes
    inside = (xs >= x[0]) & (xs <= x[-1])
    csp = CubicSpline(x, p)
    csq = CubicSpline(x, q)
    pi = np.where(inside, csp(xs), 0.0)
    qi = np.where(inside, csq(xs), 0.0)
    dpi = np.where(inside, csp(xs, 1), 0.0)
    h = g.spacing()
    dpi[2:-2] = (pi[:-4] - 8 * pi[1:-3] + 8 * pi[3:-1] - pi[4:]) / (12 * h)
    return PotentialPair(g, pi, dpi, qi, cfg.a)


def write_potential_csv(
    path: str, x: np.ndarray, p: np.ndarray, dp: np.ndarray, q: np.ndarray
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,p,dp,q\n")
        for row in zip(x, p, dp, q):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_scattering_csv(path: str, data: RayDataRight) -> None:
    tau = data.tau
    nan = np.full(tau.size, np.nan)

    def cols(ray: str):
        z = nan
        if ray == "zeta1_out":
            return 1.0 / data.t00_ray1, data.s1, z, z, z, z
        if ray == "zeta2_out":
            return 1.0 / data.t00_ray2, z, data.s2, z, z, z
        if ray == "zeta0_in":
            return 1.0 / data.t00_up, z, z, 1.0 / data.t00_up_dual, z, z
        if ray == "zeta1_in":
            return z, z, z, 1.0 / data.t00_ray1_dual, data.s1_dual, z
        return z, z, z, 1.0 / data.t00_ray2_dual, z, data.s2_dual

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(_SCATTER_COLS) + "\n")
        for ray in _RAYS:
            r0, s1, s2, r0d, s1d, s2d = cols(ray)
            for i, t in enumerate(tau):
                vals = [
                    np.real(r0[i]), np.imag(r0[i]),
                    np.real(s1[i]), np.imag(s1[i]),
                    np.real(s2[i]), np.imag(s2[i]),
                    np.real(r0d[i]), np.imag(r0d[i]),
                    np.real(s1d[i]), np.imag(s1d[i]),
                    np.real(s2d[i]), np.imag(s2d[i]),
                ]
                fh.write(
                    ray + "," + _fmt(t) + ","
                    + ",".join(_fmt(v) for v in vals) + "\n"
                )


def read_scattering_csv(path: str, a: float) -> RayDataRight:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CliInputError("%s: %s" % (path, exc)) from exc
    if not lines or lines[0] != ",".join(_SCATTER_COLS):
        raise CliInputError("%s: line 1: unexpected header" % path)
    per_ray: Dict[str, List[List[float]]] = {r: [] for r in _RAYS}
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(_SCATTER_COLS):
            raise CliInputError(
                "%s: line %d: expected %d fields, got %d"
                % (path, ln, len(_SCATTER_COLS), len(parts))
            )
        ray = parts[0]
        if ray not in per_ray:
            raise CliInputError(
                "%s: line %d: unknown ray label %r" % (path, ln, ray)
            )
        try:
            per_ray[ray].append([float(v) for v in parts[1:]])
        except ValueError as exc:
            raise CliInputError(
                "%s: line %d: non-numeric field (%s)" % (path, ln, exc)
            ) from exc
    sizes = {r: len(v) for r, v in per_ray.items()}
    if len(set(sizes.values())) != 1 or 0 in sizes.values():
        raise CliInputError(
            "%s: ray groups have unequal sizes %s" % (path, sizes)
        )
    grp = {r: np.asarray(v, dtype=float) for r, v in per_ray.items()}
    tau = grp["zeta1_out"][:, 0]
    for r in _RAYS[1:]:
        if not np.array_equal(grp[r][:, 0], tau):
            raise CliInputError(
                "%s: tau grids differ between ray groups" % path
            )
    if np.any(np.diff(tau) <= 0):
        raise CliInputError("%s: tau must be strictly increasing" % path)

    def cplx(ray: str, lo: int) -> np.ndarray:
        block = grp[ray]
        return block[:, 1 + lo] + 1j * block[:, 2 + lo]

    s1 = cplx("zeta1_out", 2)
    s2 = cplx("zeta2_out", 4)
    s1d = cplx("zeta1_in", 8)
    s2d = cplx("zeta2_in", 10)
    return RayDataRight(
        tau_grid=RealGrid(tau, _trapz_weights(tau)),
        s1=s1, s2=s2, s1_dual=s1d, s2_dual=s2d,
        t00_ray1=1.0 / cplx("zeta1_out", 0),
        t00_ray2=1.0 / cplx("zeta2_out", 0),
        t00_up=1.0 / cplx("zeta0_in", 0),
        t00_ray1_dual=1.0 / cplx("zeta1_in", 6),
        t00_ray2_dual=1.0 / cplx("zeta2_in", 6),
        t00_up_dual=1.0 / cplx("zeta0_in", 6),
        a=a,
    )


def write_bound_csv(path: str, bs: Optional[BoundStateSet]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("family,scale,multiplicity,winding_verified\n")
        if bs is None:
            return
        for scale in bs.mu:
            fh.write(
                "mu,%s,2,%d\n" % (_fmt(scale), int(bs.winding_verified))
            )
        for scale in bs.nu:
            fh.write(
                "nu,%s,2,%d\n" % (_fmt(scale), int(bs.winding_verified))
            )


def read_bound_csv(path: str) -> Optional[BoundStateSet]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CliInputError("%s: %s" % (path, exc)) from exc
    if not lines or lines[0] != "family,scale,multiplicity,winding_verified":
        raise CliInputError("%s: line 1: unexpected header" % path)
    mu: List[float] = []
    nu: List[float] = []
    verified = True
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise CliInputError(
                "%s: line %d: expected 4 fields" % (path, ln)
            )
        fam = parts[0]
        try:
            scale = float(parts[1])
            mult = int(parts[2])
            ver = bool(int(parts[3]))
        except ValueError as exc:
            raise CliInputError(
                "%s: line %d: bad numeric field (%s)" % (path, ln, exc)
            ) from exc
        if mult != 2:
            raise CliInputError(
                "%s: line %d: only multiplicity 2 supported" % (path, ln)
            )
        verified = verified and ver
        if fam == "mu":
            if scale <= 0:
                raise CliInputError(
                    "%s: line %d: mu scales must be positive" % (path, ln)
                )
            mu.append(scale)
        elif fam == "nu":
            if scale >= 0:
                raise CliInputError(
                    "%s: line %d: nu scales must be negative" % (path, ln)
                )
            nu.append(scale)
        else:
            raise CliInputError(
                "%s: line %d: family must be mu or nu" % (path, ln)
            )
    if not mu and not nu:
        return None
    return BoundStateSet(
        mu=tuple(sorted(mu)), nu=tuple(sorted(nu)),
        multiplicities=(2,) * (len(mu) + len(nu)),
        winding_verified=verified,
    )


def write_recovered_csv(
    path: str, xs: np.ndarray, P: np.ndarray, Q: np.ndarray,
    p: np.ndarray, q: np.ndarray,
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,re_P,im_P,re_Q,im_Q,p,q\n")
        for i, x in enumerate(xs):
            fh.write(
                ",".join(
                    _fmt(v)
                    for v in (
                        x, P[i].real, P[i].imag, Q[i].real, Q[i].imag,
                        p[i], q[i],
                    )
                )
                + "\n"
            )


# --------------------------------------------------------------------------
# subcommands


def _cmd_direct(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    pot_path = args.potential or cfg.potential_file
    if not pot_path:
        raise CliInputError("direct: no potential file given")
    x, p, dp, q = read_potential_csv(pot_path)
    pot = _resample_potential(x, p, dp, q, cfg)
    data = collect_ray_data(
        pot, t_max=cfg.t_max_effective(), n_tau=cfg.n_tau
    )
    if args.skip_bound:
        bs = None
    else:
        bs = locate_bound_states(lambda lam: t00_at(lam, pot), a=cfg.a)
        if bs.count == 0:
            bs = None
    os.makedirs(cfg.output_dir, exist_ok=True)
    write_scattering_csv(
        os.path.join(cfg.output_dir, "scattering.csv"), data
    )
    write_bound_csv(os.path.join(cfg.output_dir, "bound_states.csv"), bs)
    print(
        "direct: %d tau nodes, %d bound states -> %s"
        % (data.tau.size, 0 if bs is None else bs.count, cfg.output_dir)
    )
    return 0


def _parse_xgrid(spec: str) -> np.ndarray:
    try:
        lo, hi, step = (float(v) for v in spec.split(":"))
    except ValueError as exc:
        raise CliInputError(
            "--x-grid expects min:max:step, got %r" % spec
        ) from exc
    if step <= 0 or hi < lo:
        raise CliInputError("--x-grid: need step > 0 and max >= min")
    n = int(round((hi - lo) / step))
    return lo + step * np.arange(n + 1)


def _cmd_inverse(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    indir = args.data_dir or cfg.output_dir
    data = read_scattering_csv(
        os.path.join(indir, "scattering.csv"), cfg.a
    )
    bs = read_bound_csv(os.path.join(indir, "bound_states.csv"))
    xs = _parse_xgrid(args.x_grid)
    table = None
    if not data.is_reflectionless():
        table = build_collocation(data.tau_grid)

    def solve_at(xv: float):
        return solve_marchenko_right(
            jump_kernels_right(data, xv), bound=bs, table=table
        )

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sols = list(pool.map(solve_at, xs))
    else:
        sols = [solve_at(xv) for xv in xs]
    right = recover_right(sols)
    left = recover_left([_wrap_mirror(s.mirror) for s in sols])
    pick = xs >= 0.0
    P = np.where(pick, right.P, left.P)
    Q = np.where(pick, right.Q, left.Q)
    p_out = np.where(pick, right.p, left.p)
    q_out = np.where(pick, right.q, left.q)
    os.makedirs(cfg.output_dir, exist_ok=True)
    write_recovered_csv(
        os.path.join(cfg.output_dir, "recovered_potentials.csv"),
        xs, P, Q, p_out, q_out,
    )
    print(
        "inverse: %d points solved on [%g, %g] -> %s"
        % (xs.size, xs[0], xs[-1], cfg.output_dir)
    )
    return 0


def _cmd_reflectionless(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    params = ReflectionlessParams(args.mu1, args.nu1)
    g = gregory_grid(-cfg.X_max, cfg.X_max, cfg.n_x)
    rec = reflectionless_potentials(params, g.nodes)
    dp = np.gradient(rec.p, g.nodes, edge_order=2)
    os.makedirs(cfg.output_dir, exist_ok=True)
    write_potential_csv(
        os.path.join(cfg.output_dir, "potential.csv"),
        g.nodes, rec.p, dp, rec.q,
    )
    tau = np.linspace(
        cfg.t_max_effective() / cfg.n_tau, cfg.t_max_effective(), cfg.n_tau
    )
    zeros = np.zeros(tau.size, dtype=complex)
    ones = np.ones(tau.size, dtype=complex)
    data = RayDataRight(
        tau_grid=RealGrid(tau, _trapz_weights(tau)),
        s1=zeros.copy(), s2=zeros.copy(),
        s1_dual=zeros.copy(), s2_dual=zeros.copy(),
        t00_ray1=ones.copy(), t00_ray2=ones.copy(), t00_up=ones.copy(),
        t00_ray1_dual=ones.copy(), t00_ray2_dual=ones.copy(),
        t00_up_dual=ones.copy(), a=cfg.a,
    )
    write_scattering_csv(
        os.path.join(cfg.output_dir, "scattering.csv"), data
    )
    bs = BoundStateSet(
        mu=(params.mu1,), nu=(params.nu1,), multiplicities=(2, 2),
        winding_verified=False,
    )
    write_bound_csv(os.path.join(cfg.output_dir, "bound_states.csv"), bs)
    print(
        "reflectionless: planted scales (%g, %g) -> %s"
        % (params.mu1, params.nu1, cfg.output_dir)
    )
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    lines: List[str] = []
    ok_all = True

    def check(name: str, ok: bool, detail: str) -> None:
        nonlocal ok_all
        ok_all = ok_all and ok
        lines.append("%-34s %s  %s" % (name, "PASS" if ok else "FAIL", detail))

    rng = np.random.default_rng(11)
    z = (rng.uniform(-5, 5, 50) + 1j * rng.uniform(-5, 5, 50))
    s0, s1v, s2v = sp_all(z)
    cubic = s0**3 + s1v**3 + s2v**3 - 3 * s0 * s1v * s2v
    worst = float(np.max(np.abs(cubic - 1.0)))
    worst = max(worst, float(np.max(np.abs(s0 + s1v + s2v - np.exp(z)))
                             / np.max(np.abs(np.exp(z)))))
    check("special-function identities", worst < 1e-10, "max %.2e" % worst)

    zp = zero_potential(a=1.0, x_max=10.0, n=401)
    dev = 0.0
    sdev = 0.0
    for lam in (0.15, 0.3, 0.45):
        tm = transition_matrix(
            lam, jost_left(lam, zp), jost_right(lam, zp)
        )
        dev = max(dev, float(np.max(np.abs(tm.t - np.eye(3)))))
        r0, s1, s2, r0d, s1d, s2d = scattering_coefficients(tm)
        sdev = max(sdev, abs(s1), abs(s2))
    check("zero-potential identity", dev < 1e-10, "max |T - I| %.2e" % dev)
    check("zero-potential reflection", sdev < 1e-10, "max |s| %.2e" % sdev)

    pot = gaussian_pair(0.2, 0.15, a=1.0, x_max=10.0, n=601, q_shift=0.3)
    udev = 0.0
    for lam in (0.25, 0.45):
        tm = transition_matrix(
            lam, jost_left(lam, pot), jost_right(lam, pot)
        )
        udev = max(udev, unitarity_residual(tm))
    check("unitarity residual", udev < 1e-6, "max %.2e" % udev)

    t1 = t00_at(0.3j, pot)
    t2 = t00_at(0.3j, pot)
    check(
        "t00 determinism", abs(t1 - t2) < 1e-14, "|delta| %.2e" % abs(t1 - t2)
    )

    pr = ReflectionlessParams(1.0, -1.0)
    det, r1, r1h = closed_form(pr, 0.0)
    fixture_ok = (
        abs(det - (-101.0 / 144.0)) < 1e-12
        and abs(r1h - np.conj(r1)) < 1e-12
    )
    check(
        "reflectionless fixture", fixture_ok,
        "det %.12g" % det.real,
    )
    big = psi0_closed(pr, 60.0j + 1.0, 0.7)
    check(
        "closed-form normalization", abs(big - 1.0) < 1e-2,
        "|psi0(60i)-1| %.2e" % abs(big - 1.0),
    )

    os.makedirs(cfg.output_dir, exist_ok=True)
    report = os.path.join(cfg.output_dir, "report.txt")
    with open(report, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print("\n".join(lines))
    print("verify: %s" % ("all checks passed" if ok_all else "FAILURES"))
    return 0 if ok_all else 1


# --------------------------------------------------------------------------
# argument parsing


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON file with RunConfig fields")
    sp.add_argument("--a", type=float, help="decay rate of the potential")
    sp.add_argument("--x-max", dest="x_max", type=float)
    sp.add_argument("--t-max", dest="t_max", type=float)
    sp.add_argument("--n-x", dest="n_x", type=int)
    sp.add_argument("--n-tau", dest="n_tau", type=int)
    sp.add_argument("--output-dir", dest="output_dir")
    sp.add_argument(
        "--tol", action="append", metavar="NAME=VALUE",
        help="override a named tolerance (repeatable)",
    )


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="trioscatter",
        description="Direct and inverse scattering on the line.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("direct", help="sweep scattering data of a potential")
    d.add_argument("potential", nargs="?", help="potential CSV (x,p,dp,q)")
    d.add_argument(
        "--skip-bound", action="store_true",
        help="skip the bound-state search",
    )
    _add_common(d)
    d.set_defaults(func=_cmd_direct)

    i = sub.add_parser("inverse", help="recover potentials from data files")
    i.add_argument(
        "--data-dir", help="directory holding scattering.csv and "
        "bound_states.csv (default: output dir)",
    )
    i.add_argument(
        "--x-grid", default="-3:3:0.15",
        help="recovery grid as min:max:step (default -3:3:0.15)",
    )
    _add_common(i)
    i.set_defaults(func=_cmd_inverse)

    r = sub.add_parser(
        "reflectionless", help="write the closed-form fixture files"
    )
    r.add_argument("--mu1", type=float, required=True)
    r.add_argument("--nu1", type=float, required=True)
    _add_common(r)
    r.set_defaults(func=_cmd_reflectionless)

    v = sub.add_parser("verify", help="run the invariant suite")
    _add_common(v)
    v.set_defaults(func=_cmd_verify)
    return ap


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except CliInputError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (SolverDomainError, SolverConvergenceError) as exc:
        print("solver failure: %s" % exc, file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run_cli())
