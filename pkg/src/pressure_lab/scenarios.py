"""Composite dynamical scenarios with predicted pressure branches.

Each scenario is a disjoint union of pieces (symbolic graphs, periodic
sinks, an intermittent interval piece); by the variational principle for a
disjoint union, its pressure is the maximum of the piece pressures, so the
predicted curve is the upper envelope of per-piece affine branches. All
kink locations are validated against the exact envelope oracle.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from . import markov
from .analysis import AffineBranch, Envelope, PressureCurve, upper_envelope
from .errors import (
    InvalidEntropy,
    NoConvergence,
    OrderingViolated,
    RationalAlpha,
    TruncationTooCoarse,
    UnknownScenario,
    ValidationError,
)
from .maps import SmoothMap2D, make_hybrid_map, make_product_map, make_two_sinks_map
from .markov import MarkovModel, perron_root
from .smooth2d import PotentialSpec, orbit_pressure_estimate

__all__ = [
    "Piece",
    "MarkovPiece",
    "SinkPiece",
    "NeutralPiece",
    "ProductPiece",
    "SmoothPiece",
    "CompositeScenario",
    "build_two_sinks",
    "build_axiom_a",
    "build_multi_attractor",
    "build_product_example",
    "build_neutral",
    "build_hybrid",
    "composite_pressure",
    "parse_scenario_text",
    "parse_scenario_file",
    "random_piecewise_linear_markov",
]

LOG2 = math.log(2.0)


# -- pieces -----------------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    """One invariant piece of a composite scenario.

    ``lambda_f_min``/``lambda_f_max`` bound the per-measure exponent of the
    dominating direction on the piece (None when not meaningful). The
    branch tuples are the piece's exact affine pressure contributions,
    when it has them.
    """

    label: str
    lambda_f_min: float | None = None
    lambda_f_max: float | None = None

    def pressure(self, t: float) -> float:
        raise NotImplementedError

    def branches(self) -> tuple[AffineBranch, ...] | None:
        return None

    def minus_branches(self) -> tuple[AffineBranch, ...]:
        """Branches of measures on the piece with non-positive F-exponent."""
        return ()

    def plus_branches(self) -> tuple[AffineBranch, ...]:
        if self.lambda_f_min is not None and self.lambda_f_min > 0:
            return self.branches() or ()
        return ()


@dataclass(frozen=True)
class MarkovPiece(Piece):
    """Symbolic piece: irreducible graph, optional tuned base weights, a potential."""

    model: MarkovModel = None
    log_weights: np.ndarray | None = None
    exact_branches: tuple[AffineBranch, ...] | None = None

    def pressure(self, t: float) -> float:
        if self.log_weights is None:
            return markov.pressure(self.model, t)
        mask = self.model.adjacency > 0
        expo = self.log_weights + t * self.model.edge_potential
        shift = float(np.max(expo[mask]))
        B = np.where(mask, np.exp(expo - shift), 0.0)
        return float(np.log(perron_root(B).rho) + shift)

    def branches(self):
        return self.exact_branches

    def minus_branches(self):
        if self.lambda_f_max is not None and self.lambda_f_max <= 0:
            return self.branches() or ()
        return ()


@dataclass(frozen=True)
class SinkPiece(Piece):
    """Periodic attractor: zero entropy, pressure branch t * value."""

    value: float = 0.0

    def pressure(self, t: float) -> float:
        return t * self.value

    def branches(self):
        return (AffineBranch(self.value, 0.0),)

    def minus_branches(self):
        if self.lambda_f_max is not None and self.lambda_f_max <= 0:
            return (AffineBranch(self.value, 0.0),)
        return ()


@dataclass(frozen=True)
class NeutralPiece(Piece):
    """Interval piece with a neutral fixed point, truncated to N renewal states.

    The induced (first-return) partition of x -> x + x^(1+alpha) mod 1
    yields a renewal graph whose loop weights are interval-length ratios;
    its pressure solves a scalar characteristic equation, which equals the
    log Perron root of the N-state chain exactly.
    """

    alpha: float = 0.5
    truncation: int = 0
    loop_log_weights: np.ndarray = None
    interval_lengths: np.ndarray = None
    return_lengths: np.ndarray = None
    unassigned_mass: float = 0.0
    map_fn: Callable = None
    deriv_fn: Callable = None

    def pressure(self, t: float) -> float:
        ell = self.loop_log_weights
        steps = np.arange(1, len(ell) + 1, dtype=float)

        def g(p: float) -> float:
            return float(logsumexp(t * ell - steps * p))

        lo, hi = -2.0, 2.0
        while g(hi) > 0.0:
            hi *= 2.0
            if hi > 256.0:
                raise NoConvergence("renewal pressure bracket failed (upper)")
        while g(lo) < 0.0:
            lo *= 2.0
            if lo < -256.0:
                raise NoConvergence("renewal pressure bracket failed (lower)")
        return float(brentq(g, lo, hi, xtol=1e-13))

    def minus_branches(self):
        # The neutral fixed point carries zero entropy and zero potential.
        return (AffineBranch(0.0, 0.0),)

    def to_markov_model(self) -> MarkovModel:
        """Dense renewal chain with the geometric (log-slope) edge potential."""
        n = self.truncation
        lenA, lenC = self.interval_lengths, self.return_lengths
        adjacency = np.zeros((n, n))
        potential = np.zeros((n, n))
        adjacency[0, :] = 1.0
        potential[0, :] = np.log(lenC) - np.log(lenA)
        for i in range(1, n):
            adjacency[i, i - 1] = 1.0
            potential[i, i - 1] = math.log(lenA[i]) - math.log(lenA[i - 1])
        return MarkovModel(adjacency, potential)


@dataclass(frozen=True)
class ProductPiece(Piece):
    """Doubling-map piece at dyadic refinement level L with a reduced potential."""

    level: int = 8
    phi: np.ndarray = None

    def pressure(self, t: float) -> float:
        size = 2**self.level
        expo = t * self.phi
        shift = float(np.max(expo))
        w = np.exp(expo - shift)
        j1 = (2 * np.arange(size)) % size
        j2 = (2 * np.arange(size) + 1) % size
        v = np.full(size, 1.0 / size)
        for _ in range(10**6):
            bv = w * (v[j1] + v[j2])
            rho = float(v @ bv) / float(v @ v)
            if float(np.max(np.abs(bv - rho * v))) <= 1e-12 * max(1.0, rho):
                return float(np.log(rho) + shift)
            nv = bv + v
            v = nv / nv.sum()
        raise NoConvergence("transfer power iteration failed on the product piece")

    def branches(self):
        span = float(np.max(self.phi) - np.min(self.phi))
        if span <= 1e-12:
            return (AffineBranch(float(np.mean(self.phi)), LOG2),)
        return None

    def to_markov_model(self) -> MarkovModel:
        size = 2**self.level
        adjacency = np.zeros((size, size))
        potential = np.zeros((size, size))
        for i in range(size):
            for j in ((2 * i) % size, (2 * i + 1) % size):
                adjacency[i, j] = 1.0
                potential[i, j] = self.phi[i]
        return MarkovModel(adjacency, potential)


@dataclass(frozen=True)
class SmoothPiece(Piece):
    """Smooth-map piece whose pressure comes from the periodic-orbit estimator."""

    map2d: SmoothMap2D = None
    potential: PotentialSpec = None
    period: int = 6

    def pressure(self, t: float) -> float:
        return orbit_pressure_estimate(self.map2d, self.potential, t, self.period)


# -- composite scenarios ------------------------------------------------------


@dataclass(frozen=True)
class CompositeScenario:
    """Disjoint union of pieces with predicted branches and kinks."""

    label: str
    pieces: tuple[Piece, ...]
    predicted_branches: tuple[AffineBranch, ...] | None = None
    predicted_constant: float | None = None
    predicted_kinks: tuple[float, ...] | None = None
    exact: bool = True
    expected_classification: str = "kink"
    demo_map: SmoothMap2D | None = None
    demo_potential: PotentialSpec | None = None
    metadata: dict = field(default_factory=dict)

    def envelope(self) -> Envelope | None:
        if self.predicted_branches is None and self.predicted_constant is None:
            return None
        return upper_envelope(self.predicted_branches or (), self.predicted_constant)

    def pressure(self, t: float) -> float:
        return max(piece.pressure(t) for piece in self.pieces)

    def sample_curve(
        self,
        t_min: float,
        t_max: float,
        steps: int,
        threads: int | None = None,
    ) -> PressureCurve:
        if not t_min < t_max:
            raise ValidationError("need t_min < t_max")
        if steps < 2:
            raise ValidationError("need at least 2 grid points")
        ts = np.linspace(t_min, t_max, steps)
        if threads and threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                values = list(pool.map(self.pressure, ts))
        else:
            values = [self.pressure(t) for t in ts]
        return PressureCurve(ts, np.array(values), value_tolerance=1e-9, source=self.label)

    def constrained_envelope(self, sign: str) -> Envelope:
        """Upper envelope over pieces whose measures fall in the +/- exponent class."""
        if sign not in ("+", "-"):
            raise ValidationError("sign must be '+' or '-'")
        branches: list[AffineBranch] = []
        for piece in self.pieces:
            branches.extend(piece.minus_branches() if sign == "-" else piece.plus_branches())
        if not branches:
            raise ValidationError(f"no piece contributes to the '{sign}' class")
        return upper_envelope(branches)

    @property
    def lambda_f_min(self) -> float | None:
        vals = [p.lambda_f_min for p in self.pieces if p.lambda_f_min is not None]
        return min(vals) if vals else None

    @property
    def lambda_f_max(self) -> float | None:
        vals = [p.lambda_f_max for p in self.pieces if p.lambda_f_max is not None]
        return max(vals) if vals else None


def composite_pressure(scenario: CompositeScenario, t: float) -> float:
    """Maximum of the piece pressures at parameter t."""
    return scenario.pressure(t)


# -- entropy realization -------------------------------------------------------


def _entropy_realization(
    h: float,
    potential_value: float,
    label: str,
    lambda_f_min: float | None = None,
    lambda_f_max: float | None = None,
) -> MarkovPiece:
    """Irreducible graph whose log Perron root equals h to 1e-12.

    h = log(m) for integer m >= 2 uses the full m-shift; any other h > 0
    uses a two-state loop graph with one tuned weight (found by root
    bisection on the closed-form spectral radius).
    """
    if not h > 0:
        raise InvalidEntropy(f"piece entropy must be positive, got {h}")
    lam = math.exp(h)
    m = round(lam)
    if m >= 2 and abs(lam - m) <= 1e-9:
        adjacency = np.ones((m, m))
        return MarkovPiece(
            label=label,
            lambda_f_min=lambda_f_min,
            lambda_f_max=lambda_f_max,
            model=MarkovModel(adjacency, potential_value * adjacency),
            log_weights=None,
            exact_branches=(AffineBranch(potential_value, h),),
        )

    def log_rho(w: float) -> float:
        return math.log((w + math.sqrt(w * w + 4.0)) / 2.0)

    w = brentq(lambda w: log_rho(w) - h, 1e-15, 2.0 * lam + 4.0, xtol=1e-15, rtol=8.9e-16)
    adjacency = np.array([[1.0, 1.0], [1.0, 0.0]])
    log_weights = np.array([[math.log(w), 0.0], [0.0, 0.0]])
    piece = MarkovPiece(
        label=label,
        lambda_f_min=lambda_f_min,
        lambda_f_max=lambda_f_max,
        model=MarkovModel(adjacency, potential_value * adjacency),
        log_weights=log_weights,
        exact_branches=(AffineBranch(potential_value, h),),
    )
    realized = piece.pressure(0.0)
    if abs(realized - h) > 1e-10:
        raise InvalidEntropy(f"could not realize entropy {h}: got {realized}")
    return piece


# -- builders -------------------------------------------------------------------


def _two_sinks_plateau_potential(eps: float = 0.05) -> PotentialSpec:
    """Plateau bumps: 1 on a disk around the first sink, 1/2 around the second."""
    r_inner, r_outer = 0.10, 0.15

    def smootherstep(s):
        s = np.clip(s, 0.0, 1.0)
        return s * s * s * (s * (6.0 * s - 15.0) + 10.0)

    def plateau(d):
        return smootherstep((r_outer - d) / (r_outer - r_inner))

    def phi(x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        d1 = np.hypot(x - 0.25, y - 0.5)
        d2 = np.hypot(x - 0.75, y - 0.5)
        return 1.0 * plateau(d1) + 0.5 * plateau(d2)

    return PotentialSpec.function(phi, label="two_sinks_plateau")


def build_two_sinks(chaotic_symbols: int = 2, period: int = 1) -> CompositeScenario:
    """Full shift (potential 0) plus two sinks with Birkhoff values 1 and 1/2.

    Predicted pressure max{log N, t, t/2} with a single kink at t = log N.
    Also carries a realized square diffeomorphism with the plateau-bump
    potential whose basin Birkhoff averages are 1, 1/2, and 0 (the sinks
    are realized as fixed points; the branch set does not depend on the
    period parameter).
    """
    n = int(chaotic_symbols)
    k = int(period)
    if n < 2:
        raise ValidationError("need at least 2 chaotic symbols")
    if k < 1:
        raise ValidationError("period must be >= 1")
    h = math.log(n)
    contraction = 0.5
    pieces = (
        _entropy_realization(h, 0.0, label=f"full-{n}-shift", lambda_f_min=h, lambda_f_max=h),
        SinkPiece(label="sink-1", value=1.0, lambda_f_min=math.log(contraction), lambda_f_max=math.log(contraction)),
        SinkPiece(label="sink-1/2", value=0.5, lambda_f_min=math.log(contraction), lambda_f_max=math.log(contraction)),
    )
    branches = (AffineBranch(0.0, h), AffineBranch(1.0, 0.0), AffineBranch(0.5, 0.0))
    env = upper_envelope(branches)
    return CompositeScenario(
        label=f"two_sinks(N={n})",
        pieces=pieces,
        predicted_branches=branches,
        predicted_kinks=tuple(env.breakpoints),
        exact=True,
        expected_classification="kink",
        demo_map=make_two_sinks_map(contraction=contraction),
        demo_potential=_two_sinks_plateau_potential(),
        metadata={"N": n, "period": k},
    )


def build_axiom_a(entropies: Sequence[float]) -> CompositeScenario:
    """Disjoint basic pieces: potential +1 on the first, -1 on the rest.

    Predicted branches {h1 + t} and {h_i - t}; single kink at
    (max_{i>=2} h_i - h1) / 2.
    """
    hs = [float(h) for h in entropies]
    if len(hs) < 2:
        raise ValidationError("axiom_a scenario needs at least 2 pieces")
    for h in hs:
        if h <= 0:
            raise InvalidEntropy(f"piece entropies must be positive, got {h}")
    pieces = [_entropy_realization(hs[0], 1.0, label="piece-1")]
    for i, h in enumerate(hs[1:], start=2):
        pieces.append(_entropy_realization(h, -1.0, label=f"piece-{i}"))
    branches = (AffineBranch(1.0, hs[0]),) + tuple(AffineBranch(-1.0, h) for h in hs[1:])
    env = upper_envelope(branches)
    kink_formula = (max(hs[1:]) - hs[0]) / 2.0
    if len(env.breakpoints) != 1 or abs(env.breakpoints[0] - kink_formula) > 1e-12:
        raise ValidationError("envelope oracle disagrees with the closed-form kink")
    return CompositeScenario(
        label=f"axiom_a({', '.join(f'{h:g}' for h in hs)})",
        pieces=tuple(pieces),
        predicted_branches=branches,
        predicted_kinks=tuple(env.breakpoints),
        exact=True,
        expected_classification="kink",
        metadata={"entropies": hs},
    )


def build_multi_attractor(entropies: Sequence[float], h_star: float) -> CompositeScenario:
    """k attractor pieces with potential value i on piece i, plus a residual piece.

    Requires h1 > ... > hk and increasing gaps
    h* - h1 < h1 - h2 < ... < h_{k-1} - h_k; the envelope of
    {h*, h_i + i t} then has exactly k breakpoints.
    """
    hs = [float(h) for h in entropies]
    h_star = float(h_star)
    if not hs:
        raise ValidationError("need at least one attractor entropy")
    if h_star <= 0:
        raise InvalidEntropy(f"h_star must be positive, got {h_star}")
    for h in hs:
        if h <= 0:
            raise InvalidEntropy(f"piece entropies must be positive, got {h}")
    for i in range(len(hs) - 1):
        if not hs[i] > hs[i + 1]:
            raise OrderingViolated(f"need h{i + 1} > h{i + 2}: {hs[i]} <= {hs[i + 1]}")
    gaps = [h_star - hs[0]] + [hs[i] - hs[i + 1] for i in range(len(hs) - 1)]
    for i in range(len(gaps) - 1):
        if not gaps[i] < gaps[i + 1]:
            raise OrderingViolated(
                f"gap condition fails at position {i}: {gaps[i]} >= {gaps[i + 1]}"
            )
    pieces = [_entropy_realization(h_star, 0.0, label="residual")]
    for i, h in enumerate(hs, start=1):
        pieces.append(_entropy_realization(h, float(i), label=f"attractor-{i}"))
    branches = tuple(AffineBranch(float(i), h) for i, h in enumerate(hs, start=1))
    env = upper_envelope(branches, constant=h_star)
    return CompositeScenario(
        label=f"multi_attractor(k={len(hs)})",
        pieces=tuple(pieces),
        predicted_branches=branches,
        predicted_constant=h_star,
        predicted_kinks=tuple(env.breakpoints),
        exact=True,
        expected_classification="kink",
        metadata={"entropies": hs, "h_star": h_star},
    )


def check_irrational(alpha: float, max_denominator: int = 100, tol: float = 1e-12) -> None:
    """Reject alpha if a rational with denominator <= 100 matches it to 1e-12."""
    if not 0 < alpha < 1:
        raise ValidationError("alpha must lie in (0, 1)")
    approx = Fraction(alpha).limit_denominator(max_denominator)
    if abs(alpha - float(approx)) < tol:
        raise RationalAlpha(
            f"alpha = {alpha} is {approx} to within {tol}; need an irrational surrogate"
        )


GAUSS_NODES = 128


def _reduce_potential(phi_fn: Callable, level: int) -> np.ndarray:
    """Average phi(x, y) over y by Gauss-Legendre quadrature at cylinder midpoints."""
    size = 2**level
    xs = (np.arange(size) + 0.5) / size
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_NODES)
    ys = (nodes + 1.0) / 2.0
    ws = weights / 2.0
    try:
        vals = np.asarray(phi_fn(xs[:, None], ys[None, :]), dtype=float)
        if vals.shape != (size, GAUSS_NODES):
            raise ValueError
    except Exception:
        vals = np.array([[float(phi_fn(x, y)) for y in ys] for x in xs])
    return vals @ ws


def build_product_example(alpha: float, potential: Callable, level: int = 8) -> CompositeScenario:
    """Doubling-times-rotation product, reduced to a 1D model by y-averaging.

    The y-average of the potential drives a dyadic refinement of the
    doubling map at the given level; the scenario also exposes the 2D
    product map for Birkhoff cross-checks.
    """
    check_irrational(alpha)
    if not 2 <= level <= 16:
        raise ValidationError("refinement level must lie in [2, 16]")
    phi_tilde = _reduce_potential(potential, level)
    piece = ProductPiece(label=f"doubling-L{level}", level=level, phi=phi_tilde, lambda_f_min=LOG2, lambda_f_max=LOG2)
    branches = piece.branches()
    env = upper_envelope(branches) if branches else None
    return CompositeScenario(
        label=f"product(alpha={alpha:g})",
        pieces=(piece,),
        predicted_branches=branches,
        predicted_kinks=tuple(env.breakpoints) if env else None,
        exact=branches is not None,
        expected_classification="analytic_compatible" if branches else "unknown",
        demo_map=make_product_map(alpha),
        demo_potential=PotentialSpec.function(potential, label="product_potential"),
        metadata={"alpha": alpha, "level": level},
    )


def _induced_partition(alpha: float, n_states: int):
    """Backward orbit of the neutral map's branch point and its return intervals."""
    f_left = lambda y, target: y + y ** (1.0 + alpha) - target
    xstar = brentq(lambda x: f_left(x, 1.0), 0.0, 1.0, xtol=1e-15, rtol=8.9e-16)

    xs = np.empty(n_states + 1)
    xs[0] = 1.0
    xs[1] = xstar
    for n in range(1, n_states):
        target = xs[n]
        y = target
        for _ in range(200):
            step = f_left(y, target) / (1.0 + (1.0 + alpha) * y**alpha)
            y -= step
            if abs(step) < 1e-16 * max(1.0, abs(y)):
                break
        xs[n + 1] = y

    ys = np.empty(n_states + 1)
    for m1 in range(n_states + 1):
        ys[m1] = brentq(
            lambda y: y + y ** (1.0 + alpha) - 1.0 - xs[m1], xstar, 1.0, xtol=1e-15, rtol=8.9e-16
        )

    len_a = np.empty(n_states)
    len_a[0] = 1.0 - xstar
    len_a[1:] = xs[1:n_states] - xs[2 : n_states + 1]
    len_c = ys[:-1] - ys[1:]
    unassigned = float((ys[n_states] - xstar) / len_a[0])
    return len_a, len_c, unassigned


def build_neutral(alpha_mp: float, truncation: int = 4096) -> CompositeScenario:
    """Intermittent interval map x -> x + x^(1+alpha) mod 1 with potential -log f'.

    Truncated first-return (renewal) chain with N states; the predicted
    curve decreases from log 2 at t = 0 and freezes onto the 0 plateau at
    t = 1.
    """
    if not 0 < alpha_mp < 1:
        raise ValidationError("alpha_mp must lie in (0, 1)")
    if truncation < 256:
        raise ValidationError("truncation must be at least 256 states")
    len_a, len_c, unassigned = _induced_partition(alpha_mp, truncation)
    if unassigned > 1e-3:
        raise TruncationTooCoarse(
            f"induced partition leaves {unassigned:.3e} unassigned mass (> 1e-3); "
            "increase the truncation"
        )
    ell = np.log(len_c) - math.log(len_a[0])
    steps = np.arange(1, truncation + 1, dtype=float)
    lam_max = float(np.max(-ell / steps))

    def neutral_map(x):
        return (x + x ** (1.0 + alpha_mp)) % 1.0

    def neutral_deriv(x):
        return 1.0 + (1.0 + alpha_mp) * x**alpha_mp

    piece = NeutralPiece(
        label=f"neutral(alpha={alpha_mp:g})",
        lambda_f_min=0.0,
        lambda_f_max=lam_max,
        alpha=alpha_mp,
        truncation=truncation,
        loop_log_weights=ell,
        interval_lengths=len_a,
        return_lengths=len_c,
        unassigned_mass=unassigned,
        map_fn=neutral_map,
        deriv_fn=neutral_deriv,
    )
    return CompositeScenario(
        label=f"neutral(alpha={alpha_mp:g}, N={truncation})",
        pieces=(piece,),
        predicted_branches=None,
        predicted_kinks=None,
        exact=False,
        expected_classification="freezing",
        metadata={
            "alpha_mp": alpha_mp,
            "truncation": truncation,
            "expected_plateau": 0.0,
            "expected_t0": 1.0,
        },
    )


def build_hybrid(lambda_f: float = -0.3, entropy: float = LOG2) -> CompositeScenario:
    """Expanding symbolic piece plus one contracting point, geometric potential.

    The class of measures with non-positive F-exponent consists of the
    contracting fixed point alone, so the sign-restricted envelope is
    exactly -t * lambda_f.
    """
    if not lambda_f < 0:
        raise ValidationError("lambda_f must be negative")
    m = round(math.exp(entropy))
    if m < 2 or abs(math.exp(entropy) - m) > 1e-9:
        raise InvalidEntropy(
            "hybrid scenario realizes the expanding piece as a full shift; "
            "entropy must be log of an integer >= 2"
        )
    h = math.log(m)
    adjacency = np.ones((m, m))
    shift_piece = MarkovPiece(
        label=f"expanding-{m}-shift",
        lambda_f_min=h,
        lambda_f_max=h,
        model=MarkovModel(adjacency, -h * adjacency),
        exact_branches=(AffineBranch(-h, h),),
    )
    sink = SinkPiece(
        label="contracting-point",
        value=-lambda_f,
        lambda_f_min=lambda_f,
        lambda_f_max=lambda_f,
    )
    branches = (AffineBranch(-h, h), AffineBranch(-lambda_f, 0.0))
    env = upper_envelope(branches)
    return CompositeScenario(
        label=f"hybrid(lambda_f={lambda_f:g})",
        pieces=(shift_piece, sink),
        predicted_branches=branches,
        predicted_kinks=tuple(env.breakpoints),
        exact=True,
        expected_classification="kink",
        demo_map=make_hybrid_map(lambda_f),
        metadata={"lambda_f": lambda_f, "entropy": h},
    )


# -- scenario spec files ---------------------------------------------------------

PRODUCT_POTENTIALS: dict[str, Callable] = {
    "cos_y": lambda x, y: np.cos(2 * np.pi * y) + 0.0 * np.asarray(x, float),
    "cos_x": lambda x, y: np.cos(2 * np.pi * x) + 0.0 * np.asarray(y, float),
    "zero": lambda x, y: 0.0 * np.asarray(x, float) * np.asarray(y, float),
}


def parse_scenario_text(text: str) -> CompositeScenario:
    """Build a scenario from 'key = value' lines (see the README for keys)."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"scenario file line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    kind = entries.pop("scenario", None)
    if kind is None:
        raise ValidationError("scenario file needs a 'scenario = <kind>' line")

    def pop_float(key: str, default: float | None = None) -> float:
        raw = entries.pop(key, None)
        if raw is None:
            if default is None:
                raise ValidationError(f"scenario '{kind}' needs key '{key}'")
            return default
        try:
            return float(raw)
        except ValueError:
            raise ValidationError(f"key '{key}' must be a number, got {raw!r}") from None

    def pop_int(key: str, default: int | None = None) -> int:
        return int(pop_float(key, None if default is None else float(default)))

    if kind == "two_sinks":
        scenario = build_two_sinks(pop_int("N", 2), pop_int("period", 1))
    elif kind == "axiom_a":
        raw = entries.pop("entropies", None)
        if raw is None:
            raise ValidationError("axiom_a scenario needs 'entropies = h1, h2, ...'")
        scenario = build_axiom_a([float(v) for v in raw.split(",")])
    elif kind == "multi_attractor":
        raw = entries.pop("entropies", None)
        if raw is None:
            raise ValidationError("multi_attractor scenario needs 'entropies = h1, h2, ...'")
        scenario = build_multi_attractor([float(v) for v in raw.split(",")], pop_float("h_star"))
    elif kind == "product":
        name = entries.pop("potential", "cos_y")
        if name == "const":
            c = pop_float("value", 0.0)
            phi = lambda x, y: c + 0.0 * np.asarray(x, float)
        elif name in PRODUCT_POTENTIALS:
            phi = PRODUCT_POTENTIALS[name]
        else:
            raise ValidationError(
                f"unknown product potential {name!r}; choose from "
                f"{sorted(PRODUCT_POTENTIALS) + ['const']}"
            )
        scenario = build_product_example(pop_float("alpha"), phi, pop_int("level", 8))
    elif kind == "neutral":
        scenario = build_neutral(pop_float("alpha_mp"), pop_int("truncation", 4096))
    elif kind == "hybrid":
        scenario = build_hybrid(pop_float("lambda_f", -0.3), pop_float("entropy", LOG2))
    else:
        raise UnknownScenario(f"unknown scenario kind {kind!r}")

    if entries:
        raise ValidationError(f"unused scenario keys: {sorted(entries)}")
    return scenario


def parse_scenario_file(path) -> CompositeScenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario_text(fh.read())


# -- piecewise-linear Markov realizations ----------------------------------------


def random_piecewise_linear_markov(
    n: int, rng: np.random.Generator
) -> tuple[MarkovModel, np.ndarray]:
    """Random expanding piecewise-linear Markov interval map as a weighted model.

    Interval lengths are drawn in [1, 2] (then normalized) and every state
    has at least two successors, so all slopes s_i = |f(I_i)| / |I_i| are
    >= 1. The model's edge potential is -log s_i (the geometric potential);
    returns (model, slopes).
    """
    if n < 2:
        raise ValidationError("need at least 2 states")
    adjacency = np.zeros((n, n))
    for i in range(n):
        adjacency[i, (i + 1) % n] = 1.0
        extra = rng.integers(0, n)
        if extra == (i + 1) % n:
            extra = (extra + 1) % n
        adjacency[i, extra] = 1.0
    adjacency = np.maximum(adjacency, rng.random((n, n)) < 0.3)
    lengths = rng.uniform(1.0, 2.0, size=n)
    lengths /= lengths.sum()
    slopes = (adjacency @ lengths) / lengths
    potential = np.broadcast_to(-np.log(slopes)[:, None], (n, n)).copy()
    return MarkovModel(adjacency, potential), slopes
