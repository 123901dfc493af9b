"""Exact thermodynamic formalism for finite-state weighted transition graphs.

Pressure of a finite irreducible model is the log of the leading
eigenvalue of the weight matrix ``B(t) = adjacency * exp(t * potential)``;
the equilibrium measure is the associated Markov (Parry-type) measure
built from the Perron eigendata. All logarithms are natural, so entropy
and pressure are reported in nats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import (
    NoConvergence,
    NonIrreducible,
    SupportMismatch,
    ValidationError,
)

__all__ = [
    "MarkovModel",
    "MarkovMeasure",
    "PerronData",
    "perron_root",
    "pressure",
    "equilibrium_measure",
    "markov_entropy",
    "integral_of_potential",
    "pressure_derivative",
    "load_model",
    "save_model",
    "loads_model",
    "dumps_model",
    "random_irreducible_model",
    "random_measure_on",
]

PERRON_TOL = 1e-12
PERRON_MAX_ITER = 10**6


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def is_strongly_connected(adjacency: np.ndarray) -> bool:
    """Check that every state is reachable from every other state."""
    a = np.asarray(adjacency) > 0
    n = a.shape[0]
    if n == 1:
        return bool(a[0, 0])

    def reach_from_zero(mat: np.ndarray) -> np.ndarray:
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        frontier = seen.copy()
        while frontier.any():
            nxt = mat[frontier].any(axis=0) & ~seen
            seen |= nxt
            frontier = nxt
        return seen

    return bool(reach_from_zero(a).all() and reach_from_zero(a.T).all())


@dataclass(frozen=True)
class MarkovModel:
    """Finite weighted transition graph carrying a potential on its edges.

    ``adjacency`` is an n x n 0/1 matrix; ``edge_potential`` holds the value
    of the potential on edge i -> j and is only meaningful where the
    adjacency is 1. Reducible graphs are rejected unless ``allow_reducible``
    is set, in which case the model may only be consumed piece-by-piece by
    composite scenarios.
    """

    n: int
    adjacency: np.ndarray
    edge_potential: np.ndarray
    reducible: bool = False

    def __init__(self, adjacency, edge_potential=None, *, allow_reducible: bool = False):
        adjacency = np.asarray(adjacency, dtype=float)
        if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
            raise ValidationError("adjacency must be a square matrix")
        n = adjacency.shape[0]
        if n < 1:
            raise ValidationError("model needs at least one state")
        vals = np.unique(adjacency)
        if not np.all(np.isin(vals, (0.0, 1.0))):
            raise ValidationError("adjacency entries must be 0 or 1")
        if edge_potential is None:
            edge_potential = np.zeros((n, n))
        edge_potential = np.asarray(edge_potential, dtype=float)
        if edge_potential.shape != (n, n):
            raise ValidationError("edge_potential shape must match adjacency")
        if not np.all(np.isfinite(edge_potential[adjacency > 0])):
            raise ValidationError("edge_potential must be finite on allowed edges")
        if np.any(adjacency.sum(axis=1) < 1):
            raise ValidationError("every state needs at least one outgoing edge")

        irreducible = is_strongly_connected(adjacency)
        if not irreducible and not allow_reducible:
            raise NonIrreducible(
                "adjacency is not strongly connected; pass allow_reducible=True "
                "to build a piece-only model"
            )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "adjacency", _freeze(adjacency))
        object.__setattr__(self, "edge_potential", _freeze(np.where(adjacency > 0, edge_potential, 0.0)))
        object.__setattr__(self, "reducible", not irreducible)

    def transposed(self) -> "MarkovModel":
        """Model with every edge reversed, carrying the same potential values."""
        return MarkovModel(self.adjacency.T, self.edge_potential.T)

    def weight_matrix(self, t: float) -> np.ndarray:
        """Raw transfer weights ``adjacency * exp(t * potential)``."""
        return np.where(self.adjacency > 0, np.exp(t * self.edge_potential), 0.0)


@dataclass(frozen=True)
class MarkovMeasure:
    """Stationary Markov measure: row-stochastic transitions plus stationary vector."""

    transition: np.ndarray
    stationary: np.ndarray

    ROW_TOL = 1e-12
    STATIONARY_TOL = 1e-10

    def __init__(self, transition, stationary):
        transition = np.asarray(transition, dtype=float)
        stationary = np.asarray(stationary, dtype=float)
        n = transition.shape[0]
        if transition.shape != (n, n) or stationary.shape != (n,):
            raise ValidationError("transition must be n x n and stationary length n")
        if np.any(transition < -1e-15) or np.any(stationary < -1e-15):
            raise ValidationError("probabilities must be nonnegative")
        if np.max(np.abs(transition.sum(axis=1) - 1.0)) > self.ROW_TOL:
            raise ValidationError("transition rows must sum to 1 within 1e-12")
        if abs(stationary.sum() - 1.0) > self.ROW_TOL:
            raise ValidationError("stationary vector must sum to 1 within 1e-12")
        residual = np.max(np.abs(stationary @ transition - stationary))
        if residual > self.STATIONARY_TOL:
            raise ValidationError(
                f"stationarity residual {residual:.3e} exceeds 1e-10"
            )
        object.__setattr__(self, "transition", _freeze(np.clip(transition, 0.0, None)))
        object.__setattr__(self, "stationary", _freeze(np.clip(stationary, 0.0, None)))

    @property
    def n(self) -> int:
        return self.transition.shape[0]

    @classmethod
    def from_transition(cls, transition) -> "MarkovMeasure":
        """Build a measure from a row-stochastic matrix, solving for stationarity."""
        transition = np.asarray(transition, dtype=float)
        data = perron_root(transition.T)
        return cls(transition, data.right_vec)


@dataclass(frozen=True)
class PerronData:
    """Leading eigenvalue with positive left/right eigenvectors (sum-1 normalized)."""

    rho: float
    right_vec: np.ndarray
    left_vec: np.ndarray
    residual: float
    iterations: int = field(default=0, compare=False)


def _power_iterate(B: np.ndarray, tol: float, max_iter: int) -> tuple[float, np.ndarray, float, int]:
    """Power iteration on B + I (the shift handles periodic graphs)."""
    n = B.shape[0]
    v = np.full(n, 1.0 / n)
    rho = 0.0
    resid = np.inf
    for it in range(1, max_iter + 1):
        z = B @ v
        rho = float(v @ z) / float(v @ v)
        resid = float(np.max(np.abs(z - rho * v)))
        if resid <= tol * max(1.0, abs(rho)):
            return rho, v, resid, it
        w = z + v
        s = w.sum()
        if not np.isfinite(s) or s <= 0:
            raise NoConvergence("power iteration produced a non-positive iterate")
        v = w / s
    raise NoConvergence(
        f"power iteration residual {resid:.3e} after {max_iter} iterations"
    )


def perron_root(B, tol: float = PERRON_TOL, max_iter: int = PERRON_MAX_ITER) -> PerronData:
    """Leading eigenvalue and positive eigenvectors of a nonnegative irreducible matrix.

    Deterministic: all-ones start vector, Rayleigh-quotient eigenvalue
    estimate, stop when the infinity-norm residual drops below
    ``tol * max(1, rho)``.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValidationError("matrix must be square")
    if np.any(B < 0):
        raise ValidationError("matrix must be nonnegative")
    if not is_strongly_connected(B > 0):
        raise NonIrreducible("matrix is not irreducible")
    _, right, _, it_r = _power_iterate(B, tol, max_iter)
    _, left, _, it_l = _power_iterate(B.T, tol, max_iter)
    # Two-sided Rayleigh quotient: its error is quadratic in the vector
    # residuals, so rho is far tighter than the stopping tolerance.
    rho = float(left @ (B @ right)) / float(left @ right)
    res_r = float(np.max(np.abs(B @ right - rho * right)))
    res_l = float(np.max(np.abs(left @ B - rho * left)))
    return PerronData(
        rho=rho,
        right_vec=_freeze(right),
        left_vec=_freeze(left),
        residual=max(res_r, res_l),
        iterations=max(it_r, it_l),
    )


def _require_irreducible(model: MarkovModel) -> None:
    if model.reducible:
        raise NonIrreducible("operation requires an irreducible model")


def _scaled_weights(model: MarkovModel, t: float) -> tuple[np.ndarray, float]:
    """Weights exp(t*phi - shift) with the shift returned, to avoid overflow.

    Underflowed edges are floored at 1e-300 so the sparsity pattern (and the
    irreducibility check) survives extreme parameters.
    """
    mask = model.adjacency > 0
    expo = t * model.edge_potential
    shift = float(np.max(expo[mask]))
    B = np.where(mask, np.maximum(np.exp(expo - shift), 1e-300), 0.0)
    return B, shift


def pressure(model: MarkovModel, t: float) -> float:
    """log of the leading eigenvalue of ``adjacency * exp(t * potential)``.

    At t = 0 this is the topological entropy of the underlying subshift.
    """
    _require_irreducible(model)
    B, shift = _scaled_weights(model, t)
    return float(np.log(perron_root(B).rho) + shift)


def equilibrium_measure(model: MarkovModel, t: float) -> MarkovMeasure:
    """Parry-type Markov measure attaining the pressure supremum at parameter t."""
    _require_irreducible(model)
    B, _ = _scaled_weights(model, t)
    data = perron_root(B)
    r = data.right_vec
    transition = B * r[None, :] / (data.rho * r[:, None])
    transition /= transition.sum(axis=1, keepdims=True)
    stat = data.left_vec * r
    stat /= stat.sum()
    return MarkovMeasure(transition, stat)


def markov_entropy(measure: MarkovMeasure) -> float:
    """Entropy rate ``-sum_i pi_i sum_j P_ij log P_ij`` (0 log 0 = 0)."""
    P = measure.transition
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(P > 0, P * np.log(P), 0.0)
    return float(-measure.stationary @ plogp.sum(axis=1))


def integral_of_potential(measure: MarkovMeasure, model: MarkovModel) -> float:
    """Average of the edge potential under the stationary edge distribution."""
    P = measure.transition
    forbidden = (model.adjacency == 0) & (P > 1e-15)
    if forbidden.any():
        i, j = np.argwhere(forbidden)[0]
        raise SupportMismatch(f"measure places mass on forbidden edge {i}->{j}")
    edge_freq = measure.stationary[:, None] * P
    return float(np.sum(edge_freq * model.edge_potential))


def pressure_derivative(model: MarkovModel, t: float) -> float:
    """dP/dt, computed as the equilibrium average of the potential."""
    return integral_of_potential(equilibrium_measure(model, t), model)


# -- model files ----------------------------------------------------------
#
# Plain-text format:
#     markov n=<N>
#     <N rows of 0/1 adjacency, space separated>
#     <N rows of edge potentials; '.' marks a forbidden edge>


def dumps_model(model: MarkovModel) -> str:
    lines = [f"markov n={model.n}"]
    for row in model.adjacency:
        lines.append(" ".join(str(int(v)) for v in row))
    for i in range(model.n):
        cells = []
        for j in range(model.n):
            if model.adjacency[i, j] > 0:
                cells.append(repr(float(model.edge_potential[i, j])))
            else:
                cells.append(".")
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"


def loads_model(text: str, *, allow_reducible: bool = False) -> MarkovModel:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("markov"):
        raise ValidationError("model file must start with 'markov n=<N>'")
    header = lines[0].split()
    try:
        n = int(dict(part.split("=") for part in header[1:])["n"])
    except (ValueError, KeyError, IndexError):
        raise ValidationError("malformed model header; expected 'markov n=<N>'") from None
    if len(lines) != 1 + 2 * n:
        raise ValidationError(
            f"expected {2 * n} data rows after the header, found {len(lines) - 1}"
        )
    adjacency = np.zeros((n, n))
    potential = np.zeros((n, n))
    for i in range(n):
        cells = lines[1 + i].split()
        if len(cells) != n:
            raise ValidationError(f"adjacency row {i} has {len(cells)} entries, expected {n}")
        adjacency[i] = [float(c) for c in cells]
    for i in range(n):
        cells = lines[1 + n + i].split()
        if len(cells) != n:
            raise ValidationError(f"potential row {i} has {len(cells)} entries, expected {n}")
        for j, cell in enumerate(cells):
            if cell == ".":
                if adjacency[i, j] != 0:
                    raise ValidationError(f"edge {i}->{j} is allowed but has no potential value")
                continue
            if adjacency[i, j] == 0:
                raise ValidationError(
                    f"edge {i}->{j} is forbidden; write its potential entry as '.'"
                )
            potential[i, j] = float(cell)
    return MarkovModel(adjacency, potential, allow_reducible=allow_reducible)


def save_model(model: MarkovModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))


def load_model(path, *, allow_reducible: bool = False) -> MarkovModel:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_model(fh.read(), allow_reducible=allow_reducible)


# -- random instances (tests, acceptance sweeps) ---------------------------


def random_irreducible_model(
    n: int,
    rng: np.random.Generator,
    extra_edge_prob: float = 0.5,
    potential_range: tuple[float, float] = (-2.0, 2.0),
) -> MarkovModel:
    """Random irreducible model: a guaranteed n-cycle plus random extra edges."""
    adjacency = np.zeros((n, n))
    for i in range(n):
        adjacency[i, (i + 1) % n] = 1.0
    adjacency = np.maximum(adjacency, rng.random((n, n)) < extra_edge_prob)
    lo, hi = potential_range
    potential = rng.uniform(lo, hi, size=(n, n))
    return MarkovModel(adjacency, potential)


def random_measure_on(model: MarkovModel, rng: np.random.Generator) -> MarkovMeasure:
    """Random Markov measure supported exactly on the model's allowed edges."""
    weights = np.where(model.adjacency > 0, rng.uniform(0.1, 1.0, size=model.adjacency.shape), 0.0)
    transition = weights / weights.sum(axis=1, keepdims=True)
    return MarkovMeasure.from_transition(transition)


def finite_difference(fn, t: float, h: float = 1e-4) -> float:
    """Central finite difference, the independent check for pressure_derivative."""
    return (fn(t + h) - fn(t - h)) / (2.0 * h)
