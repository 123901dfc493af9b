"""Built-in 2D maps with Jacobians.

Every map works on the unit torus or the unit square, accepts scalar or
array coordinates (numpy broadcasting), and returns Jacobians of shape
``(..., 2, 2)``. Maps are immutable records; orbit and cocycle routines
live in :mod:`pressure_lab.smooth2d`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import UnknownMap, ValidationError

__all__ = ["SmoothMap2D", "get_map", "list_maps", "BUILTIN_MAPS"]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SmoothMap2D:
    """A 2D map with Jacobian evaluation on the unit torus or unit square."""

    name: str
    map_fn: Callable
    jacobian_fn: Callable
    parameters: dict = field(default_factory=dict)
    invertible: bool = True
    area_preserving: bool = False
    domain: str = "torus"  # "torus" | "square"
    inverse_fn: Callable | None = None

    def __call__(self, x, y):
        return self.map_fn(x, y)

    def jacobian(self, x, y) -> np.ndarray:
        return self.jacobian_fn(x, y)

    def orbit(self, x0: float, y0: float, n: int) -> np.ndarray:
        """Itinerary ``[z, f(z), ..., f^{n-1}(z)]`` as an (n, 2) array."""
        pts = np.empty((n, 2))
        x, y = float(x0), float(y0)
        for i in range(n):
            pts[i, 0], pts[i, 1] = x, y
            x, y = self.map_fn(x, y)
        return pts

    def wrap_displacement(self, d: np.ndarray) -> np.ndarray:
        """Shortest displacement representative; mod-1 reduction on the torus."""
        d = np.asarray(d, dtype=float)
        if self.domain == "torus":
            return d - np.round(d)
        return d

    def distance(self, p, q) -> float:
        d = self.wrap_displacement(np.asarray(p, float) - np.asarray(q, float))
        return float(np.max(np.abs(d)))


def _stack_jac(j11, j12, j21, j22) -> np.ndarray:
    j11, j12, j21, j22 = np.broadcast_arrays(
        np.asarray(j11, float), np.asarray(j12, float),
        np.asarray(j21, float), np.asarray(j22, float),
    )
    top = np.stack([j11, j12], axis=-1)
    bot = np.stack([j21, j22], axis=-1)
    return np.stack([top, bot], axis=-2)


def _constant_jac(matrix: np.ndarray) -> Callable:
    matrix = np.asarray(matrix, dtype=float)
    matrix.setflags(write=False)

    def jac(x, y):
        # read-only broadcast view; cheap for large batches
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(matrix, x.shape + (2, 2))

    return jac


def make_cat_map() -> SmoothMap2D:
    """Hyperbolic toral automorphism with matrix [[2, 1], [1, 1]]."""

    def fwd(x, y):
        return (2 * x + y) % 1.0, (x + y) % 1.0

    def inv(x, y):
        return (x - y) % 1.0, (-x + 2 * y) % 1.0

    return SmoothMap2D(
        name="cat",
        map_fn=fwd,
        jacobian_fn=_constant_jac([[2.0, 1.0], [1.0, 1.0]]),
        invertible=True,
        area_preserving=True,
        domain="torus",
        inverse_fn=inv,
    )


def make_identity_map() -> SmoothMap2D:
    def fwd(x, y):
        return np.asarray(x, float) % 1.0, np.asarray(y, float) % 1.0

    return SmoothMap2D(
        name="identity",
        map_fn=fwd,
        jacobian_fn=_constant_jac(np.eye(2)),
        invertible=True,
        area_preserving=True,
        domain="torus",
        inverse_fn=fwd,
    )


def make_linear_map(a: float = 2.0, b: float = 0.0, c: float = 0.0, d: float = 0.5) -> SmoothMap2D:
    """Linear map (x, y) -> (a x + b y, c x + d y) mod 1; diag(2, 1/2) by default."""
    det = a * d - b * c
    if det == 0:
        raise ValidationError("linear map must have nonzero determinant")

    def fwd(x, y):
        return (a * x + b * y) % 1.0, (c * x + d * y) % 1.0

    return SmoothMap2D(
        name="linear",
        map_fn=fwd,
        jacobian_fn=_constant_jac([[a, b], [c, d]]),
        parameters={"a": a, "b": b, "c": c, "d": d},
        invertible=False,
        area_preserving=bool(abs(abs(det) - 1.0) < 1e-12),
        domain="torus",
    )


def make_standard_map(k: float = 0.5) -> SmoothMap2D:
    """Area-preserving kicked-rotor family on the unit torus.

    Elliptic fixed point at (1/2, 0) for 0 < k < 4, hyperbolic at (0, 0).
    """

    def fwd(x, y):
        kick = (k / TWO_PI) * np.sin(TWO_PI * np.asarray(x, float))
        y_new = (np.asarray(y, float) + kick) % 1.0
        x_new = (np.asarray(x, float) + y_new) % 1.0
        return x_new, y_new

    def inv(x, y):
        x_old = (np.asarray(x, float) - np.asarray(y, float)) % 1.0
        y_old = (np.asarray(y, float) - (k / TWO_PI) * np.sin(TWO_PI * x_old)) % 1.0
        return x_old, y_old

    def jac(x, y):
        c = k * np.cos(TWO_PI * np.asarray(x, float))
        one = np.ones_like(c)
        return _stack_jac(1.0 + c, one, c, one)

    return SmoothMap2D(
        name="standard",
        map_fn=fwd,
        jacobian_fn=jac,
        parameters={"k": k},
        invertible=True,
        area_preserving=True,
        domain="torus",
        inverse_fn=inv,
    )


def make_product_map(alpha: float = 0.6180339887498949) -> SmoothMap2D:
    """Doubling in x times rigid rotation by alpha in y; non-invertible."""

    def fwd(x, y):
        return (2.0 * np.asarray(x, float)) % 1.0, (np.asarray(y, float) + alpha) % 1.0

    return SmoothMap2D(
        name="product",
        map_fn=fwd,
        jacobian_fn=_constant_jac([[2.0, 0.0], [0.0, 1.0]]),
        parameters={"alpha": alpha},
        invertible=False,
        area_preserving=False,
        domain="torus",
    )


def make_rotation_map(theta: float = 0.7853981633974483) -> SmoothMap2D:
    """Rigid rotation about the square center, wrapped mod 1."""
    ct, st = np.cos(theta), np.sin(theta)

    def fwd(x, y):
        u = np.asarray(x, float) - 0.5
        v = np.asarray(y, float) - 0.5
        return (0.5 + ct * u - st * v) % 1.0, (0.5 + st * u + ct * v) % 1.0

    def inv(x, y):
        u = np.asarray(x, float) - 0.5
        v = np.asarray(y, float) - 0.5
        return (0.5 + ct * u + st * v) % 1.0, (0.5 - st * u + ct * v) % 1.0

    return SmoothMap2D(
        name="rotation",
        map_fn=fwd,
        jacobian_fn=_constant_jac([[ct, -st], [st, ct]]),
        parameters={"theta": theta},
        invertible=True,
        area_preserving=True,
        domain="torus",
        inverse_fn=inv,
    )


def make_two_sinks_map(eps: float = 0.05, contraction: float = 0.5) -> SmoothMap2D:
    """Square diffeomorphism with attracting fixed points at (1/4, 1/2) and (3/4, 1/2).

    The horizontal dynamics x -> x + eps*sin(4 pi x) fixes {0, 1/4, 1/2, 3/4, 1},
    attracting at the quarter points; the vertical direction contracts to 1/2.
    """
    if not 0 < eps < 1.0 / (4.0 * np.pi):
        raise ValidationError("eps must lie in (0, 1/(4 pi)) to keep the map a diffeomorphism")
    if not 0 < contraction < 1:
        raise ValidationError("contraction must lie in (0, 1)")

    def fwd(x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        return x + eps * np.sin(4 * np.pi * x), 0.5 + contraction * (y - 0.5)

    def jac(x, y):
        gx = 1.0 + 4 * np.pi * eps * np.cos(4 * np.pi * np.asarray(x, float))
        zero = np.zeros_like(gx)
        return _stack_jac(gx, zero, zero, contraction + zero)

    return SmoothMap2D(
        name="two_sinks",
        map_fn=fwd,
        jacobian_fn=jac,
        parameters={"eps": eps, "contraction": contraction},
        invertible=True,
        area_preserving=False,
        domain="square",
    )


def make_hybrid_map(lambda_f: float = -0.3, eps: float = 0.1) -> SmoothMap2D:
    """Square map with a single sink whose weak contraction rate is exp(lambda_f).

    Fixed points: saddles at x in {0, 1} and one sink at (1/2, 1/2). The
    vertical contraction exp(lambda_f) is weaker than the horizontal one,
    so the sink's dominating direction carries exponent lambda_f exactly.
    """
    if lambda_f >= 0:
        raise ValidationError("lambda_f must be negative")
    if not 0 < eps < 1.0 / (2.0 * np.pi):
        raise ValidationError("eps must lie in (0, 1/(2 pi))")
    rate = float(np.exp(lambda_f))
    if 1.0 - 2 * np.pi * eps >= rate:
        raise ValidationError("horizontal contraction must be stronger than exp(lambda_f)")

    def fwd(x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        return x + eps * np.sin(TWO_PI * x), 0.5 + rate * (y - 0.5)

    def jac(x, y):
        gx = 1.0 + TWO_PI * eps * np.cos(TWO_PI * np.asarray(x, float))
        zero = np.zeros_like(gx)
        return _stack_jac(gx, zero, zero, rate + zero)

    return SmoothMap2D(
        name="hybrid",
        map_fn=fwd,
        jacobian_fn=jac,
        parameters={"lambda_f": lambda_f, "eps": eps},
        invertible=True,
        area_preserving=False,
        domain="square",
    )


BUILTIN_MAPS = {
    "cat": make_cat_map,
    "identity": make_identity_map,
    "linear": make_linear_map,
    "diag": make_linear_map,
    "standard": make_standard_map,
    "product": make_product_map,
    "rotation": make_rotation_map,
    "two_sinks": make_two_sinks_map,
    "hybrid": make_hybrid_map,
}


def get_map(name: str, **params) -> SmoothMap2D:
    """Look up a built-in map by name and build it with the given parameters."""
    try:
        factory = BUILTIN_MAPS[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_MAPS))
        raise UnknownMap(f"unknown map '{name}'; built-ins: {known}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for map '{name}': {exc}") from None


def list_maps() -> list[str]:
    return sorted(BUILTIN_MAPS)
