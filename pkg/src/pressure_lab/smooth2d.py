"""Orbit and cocycle computations for 2D maps.

QR-reorthogonalized cocycle products give Lyapunov exponents; forward and
backward pushes of generic vectors estimate the invariant splitting; a
batched Newton search on f^n(x) = x (with toral lifting) enumerates
periodic orbits, which feed the periodic-orbit pressure estimators.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import (
    DegenerateMap,
    DegenerateSplitting,
    EmptyClassWarning,
    IncompleteOrbitSetWarning,
    MissingDirection,
    NumericalOverflow,
    ValidationError,
)
from .maps import SmoothMap2D

__all__ = [
    "PotentialSpec",
    "SplittingEstimate",
    "PeriodicOrbit",
    "lyapunov_exponents",
    "oseledets_directions",
    "domination_check",
    "geometric_potential",
    "eigenvalue_potential",
    "find_periodic_orbits",
    "orbit_pressure_estimate",
    "constrained_pressure_estimate",
    "birkhoff_average",
    "orbit_f_exponent",
    "cat_fixed_point_count",
]

ORBIT_RESIDUAL_TOL = 1e-10
DIRECTION_HORIZON = 100
SEED_GRID_CAP = 512
CAT_TOP_EIGENVALUE = (3.0 + np.sqrt(5.0)) / 2.0


# -- potentials -------------------------------------------------------------


@dataclass(frozen=True)
class PotentialSpec:
    """Potential given as a constant, a function, a grid, or a cocycle formula.

    Pointwise kinds (constant, function, grid, eigenvalue) can be evaluated
    at arbitrary points; the geometric kind (-log of the derivative's growth
    on the dominating direction) is only defined along splittings or
    periodic orbits, where the multiplier eigendata gives it exactly.
    """

    kind: str
    value: float = 0.0
    fn: Callable | None = None
    grid_values: np.ndarray | None = None
    k: int = 1
    label: str = ""

    @classmethod
    def constant(cls, c: float) -> "PotentialSpec":
        return cls(kind="constant", value=float(c), label=f"const:{float(c)!r}")

    @classmethod
    def function(cls, fn: Callable, label: str = "") -> "PotentialSpec":
        return cls(kind="function", fn=fn, label=label or f"fn:{id(fn)}")

    @classmethod
    def grid(cls, values) -> "PotentialSpec":
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise ValidationError("grid potential must be a 2-d array")
        return cls(kind="grid", grid_values=values, label=f"grid:{id(values)}")

    @classmethod
    def geometric(cls) -> "PotentialSpec":
        return cls(kind="geometric", label="geometric")

    @classmethod
    def eigenvalue(cls, k: int = 1) -> "PotentialSpec":
        return cls(kind="eigenvalue", k=int(k), label=f"eigenvalue:{k}")

    @property
    def pointwise(self) -> bool:
        return self.kind in ("constant", "function", "grid", "eigenvalue")

    def value_at(self, m: SmoothMap2D, x: float, y: float) -> float:
        if self.kind == "constant":
            return self.value
        if self.kind == "function":
            return float(self.fn(x, y))
        if self.kind == "grid":
            return _bilinear_periodic(self.grid_values, x, y)
        if self.kind == "eigenvalue":
            return eigenvalue_potential(m, self.k, (x, y))
        raise ValidationError(
            "geometric potential has no pointwise value; use geometric_potential "
            "with a SplittingEstimate or evaluate along a periodic orbit"
        )


def as_potential(p) -> PotentialSpec:
    if isinstance(p, PotentialSpec):
        return p
    if callable(p):
        return PotentialSpec.function(p)
    if isinstance(p, (int, float)):
        return PotentialSpec.constant(float(p))
    raise ValidationError(f"cannot interpret {p!r} as a potential")


def _bilinear_periodic(values: np.ndarray, x: float, y: float) -> float:
    ny, nx = values.shape
    fx, fy = (x % 1.0) * nx, (y % 1.0) * ny
    i0, j0 = int(fx) % nx, int(fy) % ny
    i1, j1 = (i0 + 1) % nx, (j0 + 1) % ny
    sx, sy = fx - int(fx), fy - int(fy)
    v00, v10 = values[j0, i0], values[j0, i1]
    v01, v11 = values[j1, i0], values[j1, i1]
    return float((1 - sx) * (1 - sy) * v00 + sx * (1 - sy) * v10 + (1 - sx) * sy * v01 + sx * sy * v11)


# -- cocycle basics ---------------------------------------------------------


def _qr_step(M: np.ndarray):
    """2x2 QR with positive diagonal; returns (Q, r11, r22)."""
    r11 = float(np.hypot(M[0, 0], M[1, 0]))
    if not np.isfinite(r11) or r11 == 0.0:
        raise NumericalOverflow("cocycle column norm left the representable range")
    q1 = M[:, 0] / r11
    r12 = float(q1 @ M[:, 1])
    v = M[:, 1] - r12 * q1
    r22 = float(np.hypot(v[0], v[1]))
    if not np.isfinite(r22) or r22 == 0.0:
        raise NumericalOverflow("cocycle became numerically singular")
    return np.column_stack([q1, v / r22]), r11, r22


def lyapunov_exponents(m: SmoothMap2D, x0: Sequence[float], n: int) -> tuple[float, float]:
    """Lyapunov exponents along the orbit of x0, by QR-reorthogonalized products.

    Re-orthogonalization happens every step, so 2x2 cocycles cannot overflow
    between strides for any built-in map.
    """
    if n < 100:
        raise ValidationError("lyapunov_exponents needs n >= 100")
    x, y = float(x0[0]), float(x0[1])
    if not (np.isfinite(x) and np.isfinite(y)):
        raise ValidationError("starting point must be finite")
    Q = np.eye(2)
    s1 = s2 = 0.0
    for _ in range(n):
        J = np.asarray(m.jacobian_fn(x, y), dtype=float)
        Q, r11, r22 = _qr_step(J @ Q)
        s1 += np.log(r11)
        s2 += np.log(r22)
        x, y = m.map_fn(x, y)
        x, y = float(x), float(y)
    l1, l2 = s1 / n, s2 / n
    return (l1, l2) if l1 >= l2 else (l2, l1)


# -- splittings -------------------------------------------------------------


@dataclass(frozen=True)
class SplittingEstimate:
    """Estimated invariant directions E (sub-dominated) and F (dominating)."""

    points: np.ndarray
    e_dirs: np.ndarray
    f_dirs: np.ndarray
    k_dom: int | None
    equivariance_residual: float
    domain: str = "torus"

    def lookup(self, x: float, y: float, tol: float = 1e-9) -> int:
        d = self.points - np.array([x, y])
        if self.domain == "torus":
            d = d - np.round(d)
        idx = int(np.argmin(np.max(np.abs(d), axis=1)))
        if np.max(np.abs(d[idx])) > tol:
            raise MissingDirection(f"point ({x}, {y}) is not covered by the splitting")
        return idx


def _push_forward(m: SmoothMap2D, pts: np.ndarray, v0: np.ndarray) -> np.ndarray:
    out = np.empty_like(pts)
    v = v0 / np.linalg.norm(v0)
    for i in range(len(pts)):
        out[i] = v
        if i + 1 < len(pts):
            J = np.asarray(m.jacobian_fn(pts[i, 0], pts[i, 1]), dtype=float)
            w = J @ v
            nw = np.linalg.norm(w)
            if nw == 0 or not np.isfinite(nw):
                raise DegenerateSplitting("forward push hit a singular derivative")
            v = w / nw
    return out


def _pull_back(m: SmoothMap2D, pts: np.ndarray, w_end: np.ndarray) -> np.ndarray:
    out = np.empty_like(pts)
    w = w_end / np.linalg.norm(w_end)
    out[-1] = w
    for i in range(len(pts) - 2, -1, -1):
        J = np.asarray(m.jacobian_fn(pts[i, 0], pts[i, 1]), dtype=float)
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        if abs(det) < 1e-300:
            raise DegenerateSplitting("backward push hit a singular derivative")
        Jinv = np.array([[J[1, 1], -J[0, 1]], [-J[1, 0], J[0, 0]]]) / det
        v = Jinv @ w
        w = v / np.linalg.norm(v)
        out[i] = w
    return out


def oseledets_directions(m: SmoothMap2D, orbit: np.ndarray) -> SplittingEstimate:
    """Estimate the dominating direction F (forward push) and E (backward push).

    When the map has an inverse, the orbit is extended 100 steps on both
    sides so every requested point gets a full alignment horizon; otherwise
    the pushes run along the supplied orbit and accuracy is best away from
    its ends. Raises DegenerateSplitting when the cocycle shows no gap.
    """
    orbit = np.asarray(orbit, dtype=float)
    if orbit.ndim != 2 or orbit.shape[1] != 2:
        raise ValidationError("orbit must be an (m, 2) array")
    if len(orbit) < 200:
        raise ValidationError("oseledets_directions needs an orbit of length >= 200")

    # Singular-value gap of the full-orbit cocycle product.
    Q = np.eye(2)
    s1 = s2 = 0.0
    for i in range(len(orbit) - 1):
        J = np.asarray(m.jacobian_fn(orbit[i, 0], orbit[i, 1]), dtype=float)
        Q, r11, r22 = _qr_step(J @ Q)
        s1 += np.log(r11)
        s2 += np.log(r22)
    if abs(s1 - s2) < np.log(1.01):
        raise DegenerateSplitting(
            "top/bottom singular values of the cocycle stay within ratio 1.01"
        )

    pre: list[np.ndarray] = []
    post: list[np.ndarray] = []
    if m.inverse_fn is not None:
        x, y = orbit[0]
        for _ in range(DIRECTION_HORIZON):
            x, y = m.inverse_fn(x, y)
            pre.append(np.array([float(x), float(y)]))
        pre.reverse()
    x, y = orbit[-1]
    for _ in range(DIRECTION_HORIZON):
        x, y = m.map_fn(x, y)
        post.append(np.array([float(x), float(y)]))
    full = np.vstack([np.array(pre).reshape(-1, 2), orbit, np.array(post).reshape(-1, 2)])
    lo, hi = len(pre), len(pre) + len(orbit)

    f_full = _push_forward(m, full, np.array([0.6, 0.8]))
    e_full = _pull_back(m, full, np.array([0.8, -0.6]))
    f_dirs, e_dirs = f_full[lo:hi], e_full[lo:hi]

    resid = 0.0
    for i in range(len(orbit) - 1):
        J = np.asarray(m.jacobian_fn(orbit[i, 0], orbit[i, 1]), dtype=float)
        for dirs in (f_dirs, e_dirs):
            w = J @ dirs[i]
            w = w / np.linalg.norm(w)
            resid = max(resid, abs(w[0] * dirs[i + 1][1] - w[1] * dirs[i + 1][0]))

    est = SplittingEstimate(
        points=orbit,
        e_dirs=e_dirs,
        f_dirs=f_dirs,
        k_dom=None,
        equivariance_residual=resid,
        domain=m.domain,
    )
    for k in range(1, 13):
        _, verdict = domination_check(m, est, k)
        if verdict:
            return replace(est, k_dom=k)
    return est


def _k_step_jacobians(m: SmoothMap2D, pts: np.ndarray, k: int) -> np.ndarray:
    """Batched Df^k at each point of an (M, 2) array."""
    pos = pts.copy()
    D = np.broadcast_to(np.eye(2), (len(pts), 2, 2)).copy()
    for _ in range(k):
        J = np.asarray(m.jacobian_fn(pos[:, 0], pos[:, 1]), dtype=float)
        D = J @ D
        x, y = m.map_fn(pos[:, 0], pos[:, 1])
        pos = np.stack([np.asarray(x, float), np.asarray(y, float)], axis=1)
    return D


def domination_check(m: SmoothMap2D, splitting: SplittingEstimate, k: int):
    """Pointwise test ||Df^k u|| / ||Df^k w|| < 1/2 for u in E, w in F.

    Returns (per-point boolean array, global verdict).
    """
    if k < 1:
        raise ValidationError("domination time k must be >= 1")
    D = _k_step_jacobians(m, splitting.points, k)
    du = np.einsum("nij,nj->ni", D, splitting.e_dirs)
    dw = np.einsum("nij,nj->ni", D, splitting.f_dirs)
    num = np.linalg.norm(du, axis=1)
    den = np.maximum(np.linalg.norm(dw, axis=1), 1e-300)
    per_point = (num / den) < 0.5
    return per_point, bool(per_point.all())


def geometric_potential(m: SmoothMap2D, splitting: SplittingEstimate, x: Sequence[float]) -> float:
    """-log of the derivative growth along the dominating direction at x."""
    idx = splitting.lookup(float(x[0]), float(x[1]))
    J = np.asarray(m.jacobian_fn(*splitting.points[idx]), dtype=float)
    return float(-np.log(np.linalg.norm(J @ splitting.f_dirs[idx])))


def eigenvalue_potential(m: SmoothMap2D, k: int, x: Sequence[float]) -> float:
    """-(1/k) log of the largest eigenvalue modulus of Df^k at x.

    A complex pair forces both moduli to sqrt(|det|), which is the value
    used; a real pair uses the larger modulus.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    pt = np.array([[float(x[0]), float(x[1])]])
    M = _k_step_jacobians(m, pt, k)[0]
    return -_log_top_eigenvalue_modulus(M) / k


def _log_top_eigenvalue_modulus(M: np.ndarray) -> float:
    tr = M[0, 0] + M[1, 1]
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    disc = tr * tr - 4.0 * det
    if disc < 0.0:
        return 0.5 * np.log(abs(det))
    r = np.sqrt(disc)
    return float(np.log(max(abs((tr + r) / 2.0), abs((tr - r) / 2.0))))


# -- periodic orbits --------------------------------------------------------


@dataclass(frozen=True)
class PeriodicOrbit:
    """Primitive periodic orbit with its derivative multiplier."""

    period: int
    points: np.ndarray
    multiplier_matrix: np.ndarray
    birkhoff_cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def base_point(self) -> tuple[float, float]:
        return float(self.points[0, 0]), float(self.points[0, 1])


def orbit_f_exponent(orbit: PeriodicOrbit) -> float:
    """Per-step exponent of the orbit's dominating direction."""
    return _log_top_eigenvalue_modulus(orbit.multiplier_matrix) / orbit.period


def orbit_average(potential, m: SmoothMap2D, orbit: PeriodicOrbit) -> float:
    """Birkhoff average of the potential over one period, cached per potential."""
    spec = as_potential(potential)
    key = spec.label
    if key in orbit.birkhoff_cache:
        return orbit.birkhoff_cache[key]
    if spec.kind == "geometric":
        avg = -orbit_f_exponent(orbit)
    else:
        avg = float(np.mean([spec.value_at(m, px, py) for px, py in orbit.points]))
    orbit.birkhoff_cache[key] = avg
    return avg


def cat_fixed_point_count(n: int) -> int:
    """Exact number of fixed points of the n-th iterate of the cat map."""
    lam = CAT_TOP_EIGENVALUE
    return int(round(lam**n + lam**-n - 2.0))


def default_seed_grid(n: int, seed: int = 42) -> np.ndarray:
    """Uniform m x m grid (m = 4 * 2^n, capped) plus a uniform random copy.

    A purely structured grid can alias against the lattice of periodic
    points of a linear map (whole orbits fall between the Newton basins the
    grid reaches); the fixed-seed uniform supplement removes that aliasing
    while keeping the search deterministic.
    """
    m = min(4 * 2**n, SEED_GRID_CAP)
    axis = (np.arange(m) + 0.5) / m
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    rng = np.random.default_rng(seed)
    return np.vstack([grid, rng.random((m * m, 2))])


def _dedup_keys(pts: np.ndarray, toral: bool) -> np.ndarray:
    scaled = np.round(pts * 1e8).astype(np.int64)
    if toral:
        scaled %= 10**8
    return scaled[..., 0] * np.int64(10**9) + scaled[..., 1]


def find_periodic_orbits(
    m: SmoothMap2D,
    n: int,
    seeds: np.ndarray | None = None,
    residual_tol: float = ORBIT_RESIDUAL_TOL,
    max_newton: int = 60,
    seed: int = 42,
) -> list[PeriodicOrbit]:
    """All periodic orbits whose period divides n, by Newton on f^n(x) = x.

    Seeds default to a uniform grid sized 4 * 2**n per axis (capped at 512)
    plus a jittered copy drawn with the given seed. Diverging or
    Newton-singular seeds are dropped; if every seed is singular at the
    first sweep the map is rejected as degenerate. Orbits are deduplicated
    by their lexicographically smallest point and returned in that
    canonical order.
    """
    if n < 1:
        raise ValidationError("period must be >= 1")
    if seeds is None:
        seeds = default_seed_grid(n, seed)
    seeds = np.asarray(seeds, dtype=float).reshape(-1, 2)
    toral = m.domain == "torus"

    z = seeds.copy()
    roots: list[np.ndarray] = []
    first_sweep = True
    for _ in range(max_newton):
        if len(z) == 0:
            break
        pos = z.copy()
        D = np.broadcast_to(np.eye(2), (len(z), 2, 2)).copy()
        for _ in range(n):
            J = np.asarray(m.jacobian_fn(pos[:, 0], pos[:, 1]), dtype=float)
            D = J @ D
            x, y = m.map_fn(pos[:, 0], pos[:, 1])
            pos = np.stack([np.asarray(x, float), np.asarray(y, float)], axis=1)
        R = pos - z
        if toral:
            R -= np.round(R)
        resid = np.abs(R).max(axis=1)

        A = D - np.eye(2)
        det = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
        singular = np.abs(det) < 1e-9
        if first_sweep and singular.all():
            raise DegenerateMap("Newton matrix singular at every seed")
        first_sweep = False

        # a root known to machine precision still has residual ~ eps * |Df^n|
        amp = np.abs(D).sum(axis=2).max(axis=1)
        done = (resid <= 1e-13 * np.maximum(1.0, amp)) & ~singular
        if done.any():
            roots.append(z[done])
        keep = ~done & ~singular
        z, R, A, det = z[keep], R[keep], A[keep], det[keep]
        if len(z) == 0:
            break
        dx = -(A[:, 1, 1] * R[:, 0] - A[:, 0, 1] * R[:, 1]) / det
        dy = -(-A[:, 1, 0] * R[:, 0] + A[:, 0, 0] * R[:, 1]) / det
        # wrapped displacements are at most 1/2 per axis, but (Df^n - I)^-1
        # can amplify toward ~1 along weakly hyperbolic directions
        step_ok = np.maximum(np.abs(dx), np.abs(dy)) <= 1.5
        z = z[step_ok] + np.column_stack([dx[step_ok], dy[step_ok]])
        if toral:
            z %= 1.0
        else:
            inside = (z[:, 0] > -0.05) & (z[:, 0] < 1.05) & (z[:, 1] > -0.05) & (z[:, 1] < 1.05)
            z = z[inside]

    if not roots:
        return []
    pts = np.vstack(roots)
    if not toral:
        ok = (pts[:, 0] >= -1e-9) & (pts[:, 0] <= 1 + 1e-9) & (pts[:, 1] >= -1e-9) & (pts[:, 1] <= 1 + 1e-9)
        pts = np.clip(pts[ok], 0.0, 1.0)
    if len(pts) == 0:
        return []

    # Canonical representative per orbit: lexicographically smallest point.
    traj = np.empty((n, len(pts), 2))
    cur = pts.copy()
    for s in range(n):
        traj[s] = cur
        x, y = m.map_fn(cur[:, 0], cur[:, 1])
        cur = np.stack([np.asarray(x, float), np.asarray(y, float)], axis=1)
    keys = _dedup_keys(traj, toral)
    canon_s = keys.argmin(axis=0)
    canon_keys = keys.min(axis=0)
    _, first = np.unique(canon_keys, return_index=True)

    orbits = []
    for idx in first:
        p0 = traj[canon_s[idx], idx]
        orbit = _assemble_orbit(m, p0, n, residual_tol)
        if orbit is not None:
            orbits.append(orbit)
    orbits.sort(key=lambda o: (round(o.points[0, 0] * 1e8), round(o.points[0, 1] * 1e8)))
    return orbits


def _assemble_orbit(m: SmoothMap2D, p0: np.ndarray, n: int, residual_tol: float) -> PeriodicOrbit | None:
    toral = m.domain == "torus"

    def wrap1(v: float) -> float:
        return v - round(v)

    px, py = float(p0[0]), float(p0[1])
    period = n
    for d in sorted(k for k in range(1, n + 1) if n % k == 0):
        x, y = px, py
        for _ in range(d):
            x, y = m.map_fn(x, y)
            x, y = float(x), float(y)
        dx, dy = x - px, y - py
        if toral:
            dx, dy = wrap1(dx), wrap1(dy)
        if max(abs(dx), abs(dy)) <= 1e-8:
            period = d
            break

    # Polish on the primitive period.
    for _ in range(6):
        x, y = px, py
        D = np.eye(2)
        for _ in range(period):
            J = np.asarray(m.jacobian_fn(x, y), dtype=float)
            D = J @ D
            x, y = m.map_fn(x, y)
            x, y = float(x), float(y)
        rx, ry = x - px, y - py
        if toral:
            rx, ry = wrap1(rx), wrap1(ry)
        if max(abs(rx), abs(ry)) < max(1e-14, 1e-15 * float(np.abs(D).sum())):
            break
        a, b, cc, d2 = D[0, 0] - 1.0, D[0, 1], D[1, 0], D[1, 1] - 1.0
        det = a * d2 - b * cc
        if abs(det) < 1e-12:
            break
        px -= (d2 * rx - b * ry) / det
        py -= (-cc * rx + a * ry) / det
        if toral:
            px, py = px % 1.0, py % 1.0

    points = np.empty((period, 2))
    mult = np.eye(2)
    x, y = px, py
    for s in range(period):
        points[s] = (x, y)
        J = np.asarray(m.jacobian_fn(x, y), dtype=float)
        mult = J @ mult
        x, y = m.map_fn(x, y)
        x, y = float(x), float(y)
    if m.distance((x, y), (px, py)) > residual_tol:
        return None
    return PeriodicOrbit(period=period, points=points, multiplier_matrix=mult)


# -- periodic-orbit pressure estimators --------------------------------------


def _orbit_terms(m, potential, t: float, n: int, orbits: Sequence[PeriodicOrbit]) -> np.ndarray:
    return np.array(
        [np.log(o.period) + t * n * orbit_average(potential, m, o) for o in orbits]
    )


def _check_completeness(m: SmoothMap2D, n: int, orbits: Sequence[PeriodicOrbit]) -> None:
    if m.name != "cat":
        return
    found = sum(o.period for o in orbits)
    expected = cat_fixed_point_count(n)
    if found != expected:
        warnings.warn(
            f"orbit set incomplete: found {found} fixed points of f^{n}, trace formula expects {expected}",
            IncompleteOrbitSetWarning,
            stacklevel=3,
        )


def orbit_pressure_estimate(
    m: SmoothMap2D,
    potential,
    t: float,
    n: int,
    orbits: Sequence[PeriodicOrbit] | None = None,
) -> float:
    """Pressure estimate (1/n) log sum over Fix(f^n) of exp(t * S_n phi).

    Each primitive orbit of period d | n contributes d fixed points, all
    with the same n-step Birkhoff sum.
    """
    if orbits is None:
        orbits = find_periodic_orbits(m, n)
        _check_completeness(m, n, orbits)
    if not orbits:
        raise ValidationError("no periodic orbits available for the estimator")
    return float(logsumexp(_orbit_terms(m, potential, t, n, orbits)) / n)


def constrained_pressure_estimate(
    m: SmoothMap2D,
    potential,
    t: float,
    n: int,
    sign: str,
    orbits: Sequence[PeriodicOrbit] | None = None,
) -> float:
    """Estimator restricted to orbits with positive (+) or non-positive (-) F-exponent.

    Returns -inf (with a warning) when the requested class is empty, so
    max(P+, P-) over a one-sided orbit set reproduces the unconstrained
    estimate exactly.
    """
    if sign not in ("+", "-"):
        raise ValidationError("sign must be '+' or '-'")
    if orbits is None:
        orbits = find_periodic_orbits(m, n)
        _check_completeness(m, n, orbits)
    if sign == "+":
        chosen = [o for o in orbits if orbit_f_exponent(o) > 0]
    else:
        chosen = [o for o in orbits if orbit_f_exponent(o) <= 0]
    if not chosen:
        warnings.warn(f"no orbit in the '{sign}' class", EmptyClassWarning, stacklevel=2)
        return float("-inf")
    return float(logsumexp(_orbit_terms(m, potential, t, n, chosen)) / n)


def birkhoff_average(m: SmoothMap2D, potential, x0: Sequence[float], n: int) -> float:
    """Time average (1/n) sum_{i<n} phi(f^i(x0)) for a pointwise potential."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    spec = as_potential(potential)
    if not spec.pointwise:
        raise ValidationError("birkhoff_average needs a pointwise potential")
    x, y = float(x0[0]), float(x0[1])
    total = 0.0
    for _ in range(n):
        total += spec.value_at(m, x, y)
        x, y = m.map_fn(x, y)
        x, y = float(x), float(y)
    return total / n
