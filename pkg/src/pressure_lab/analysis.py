"""Curve-level analysis of pressure functions.

Convex upper envelopes of affine branches are built in exact rational
arithmetic (binary floats convert exactly to fractions), so breakpoints
carry no rounding error beyond the final float conversion. Kink and
freezing detectors work on sampled curves and never claim analyticity:
a curve with no detected transition is only ever "analytic_compatible".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import CurveNotConvex, MalformedCurve, ValidationError

__all__ = [
    "AffineBranch",
    "PressureCurve",
    "Envelope",
    "Kink",
    "Freezing",
    "TransitionReport",
    "upper_envelope",
    "detect_kinks",
    "detect_freezing",
    "classify",
    "analyze_curve",
    "legendre_transform",
    "write_curve_csv",
    "read_curve_csv",
    "report_to_json",
]

DEFAULT_SLOPE_GAP_THRESHOLD = 0.1
DEFAULT_GRID_POINTS = 1001
BREAKPOINT_MERGE_SPACING = 1e-10


@dataclass(frozen=True)
class AffineBranch:
    """One candidate line h + a*t: slope a is a potential average, intercept h an entropy."""

    slope: float
    intercept: float

    def value(self, t):
        return self.intercept + self.slope * np.asarray(t, dtype=float)


@dataclass(frozen=True)
class PressureCurve:
    """Sampled pressure function on a strictly increasing parameter grid."""

    ts: np.ndarray
    values: np.ndarray
    value_tolerance: float = 1e-9
    source: str = ""

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if ts.ndim != 1 or ts.shape != values.shape:
            raise ValidationError("ts and values must be 1-d arrays of equal length")
        if ts.size < 2:
            raise ValidationError("curve needs at least two grid points")
        if np.any(np.diff(ts) <= 0):
            raise MalformedCurve("t grid must be strictly increasing")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.ts.size

    def convexity_defect(self) -> float:
        """Worst excess of an interior sample above the chord of its neighbors."""
        t, p = self.ts, self.values
        lam = (t[1:-1] - t[:-2]) / (t[2:] - t[:-2])
        chord = p[:-2] + lam * (p[2:] - p[:-2])
        return float(np.max(p[1:-1] - chord)) if len(p) > 2 else 0.0

    def convexity_tolerance(self) -> float:
        return max(10.0 * self.value_tolerance, 1e-9)


@dataclass(frozen=True)
class Kink:
    t: float
    left_slope: float
    right_slope: float
    gap: float


@dataclass(frozen=True)
class Freezing:
    t0: float
    value: float


@dataclass(frozen=True)
class TransitionReport:
    kinks: tuple[Kink, ...]
    freezing: Freezing | None
    classification: str


class Envelope:
    """Convex upper envelope of affine branches, with exact breakpoints."""

    def __init__(self, active: list[AffineBranch], breakpoints: list[float], branches: list[AffineBranch]):
        self.active = active
        self.breakpoints = breakpoints
        self.branches = branches

    def value(self, t):
        t = np.asarray(t, dtype=float)
        stacked = np.stack([b.value(t) for b in self.branches])
        return stacked.max(axis=0) if t.ndim else float(stacked.max())

    def kink_points(self) -> list[Kink]:
        out = []
        for i, t in enumerate(self.breakpoints):
            a, b = self.active[i].slope, self.active[i + 1].slope
            out.append(Kink(t=t, left_slope=a, right_slope=b, gap=b - a))
        return out

    def curve(self, t_min: float, t_max: float, steps: int, source: str = "envelope") -> PressureCurve:
        ts = np.linspace(t_min, t_max, steps)
        return PressureCurve(ts, self.value(ts), value_tolerance=1e-12, source=source)


def upper_envelope(branches: Iterable[AffineBranch], constant: float | None = None) -> Envelope:
    """Upper envelope of lines plus an optional constant branch.

    Crossings are computed with exact rational arithmetic on the float
    inputs; breakpoints closer than 1e-10 are merged.
    """
    all_branches = list(branches)
    if constant is not None:
        all_branches.append(AffineBranch(0.0, float(constant)))
    if not all_branches:
        raise ValidationError("need at least one branch or a constant")

    # Keep only the highest intercept per slope, then sort by slope.
    by_slope: dict[Fraction, Fraction] = {}
    for b in all_branches:
        a, h = Fraction(b.slope), Fraction(b.intercept)
        if a not in by_slope or h > by_slope[a]:
            by_slope[a] = h
    lines = sorted(by_slope.items())

    # Incremental hull over increasing slopes: stack holds (slope, intercept,
    # start) where start is the exact parameter at which the line takes over.
    stack: list[tuple[Fraction, Fraction, Fraction | None]] = []
    for a, h in lines:
        start: Fraction | None = None
        while stack:
            a0, h0, s0 = stack[-1]
            cross = (h0 - h) / (a - a0)
            if s0 is not None and cross <= s0:
                stack.pop()
                continue
            start = cross
            break
        if not stack:
            start = None
        stack.append((a, h, start))

    active = [AffineBranch(float(a), float(h)) for a, h, _ in stack]
    raw_breaks = [float(s) for _, _, s in stack if s is not None]

    # Merge breakpoints that land within the dedupe spacing.
    breakpoints: list[float] = []
    merged_active = [active[0]]
    for i, t in enumerate(raw_breaks):
        if breakpoints and t - breakpoints[-1] < BREAKPOINT_MERGE_SPACING:
            merged_active[-1] = active[i + 1]
            continue
        breakpoints.append(t)
        merged_active.append(active[i + 1])

    return Envelope(merged_active, breakpoints, all_branches)


def _one_sided_slopes(ts: np.ndarray, ps: np.ndarray, window: int):
    """Left/right secant slopes over ``window`` adjacent grid cells."""
    n = ts.size
    idx = np.arange(window, n - window)
    left = (ps[idx] - ps[idx - window]) / (ts[idx] - ts[idx - window])
    right = (ps[idx + window] - ps[idx]) / (ts[idx + window] - ts[idx])
    return idx, left, right


def detect_kinks(
    curve: PressureCurve,
    slope_gap_threshold: float = DEFAULT_SLOPE_GAP_THRESHOLD,
    window: int = 3,
) -> list[Kink]:
    """Locate one-sided slope gaps above the threshold.

    Slopes are estimated by secants spanning ``window`` grid cells on each
    side; contiguous above-threshold runs are reported as a single kink at
    the gap maximum, with the pure (run-edge) secants as the one-sided
    slopes. On envelope-generated curves this recovers true breakpoints
    within one grid step.
    """
    if len(curve) < 2 * window + 1 or len(curve) < 5:
        raise ValidationError("curve too short for kink detection")
    defect = curve.convexity_defect()
    if defect > curve.convexity_tolerance():
        raise CurveNotConvex(
            f"convexity defect {defect:.3e} exceeds tolerance "
            f"{curve.convexity_tolerance():.3e}; upstream values are suspect"
        )
    idx, left, right = _one_sided_slopes(curve.ts, curve.values, window)
    gaps = right - left
    above = gaps > slope_gap_threshold

    kinks: list[Kink] = []
    i = 0
    while i < above.size:
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < above.size and above[j + 1]:
            j += 1
        k = i + int(np.argmax(gaps[i : j + 1]))
        left_slope = float(left[i])
        right_slope = float(right[j])
        kinks.append(
            Kink(
                t=float(curve.ts[idx[k]]),
                left_slope=left_slope,
                right_slope=right_slope,
                gap=right_slope - left_slope,
            )
        )
        i = j + 1
    return kinks


def detect_freezing(
    curve: PressureCurve,
    plateau_value: float = 0.0,
    band: float = 0.02,
) -> Freezing | None:
    """First grid parameter after which the curve sticks to the plateau.

    Returns the smallest grid t0 such that every later sample stays within
    ``band`` of the plateau while some earlier sample exceeds it; if the
    whole curve lies in the band the first grid point is returned.
    """
    within = np.abs(curve.values - plateau_value) <= band
    if not within[-1]:
        return None
    outside = np.nonzero(~within)[0]
    i0 = int(outside[-1]) + 1 if outside.size else 0
    if i0 > 0 and not np.any(curve.values[:i0] > plateau_value + band):
        return None
    return Freezing(t0=float(curve.ts[i0]), value=float(np.mean(curve.values[i0:])))


def classify(
    curve: PressureCurve,
    kinks: Sequence[Kink],
    freezing: Freezing | None,
    window: int = 3,
) -> str:
    """Phase-transition classification of a sampled curve.

    A kink sitting at the freezing onset is part of the freezing transition
    (the slope break onto the plateau), so it does not additionally count
    as a separate kink.
    """
    if freezing is not None:
        step = float(np.max(np.diff(curve.ts)))
        onset_window = (2 * window + 1) * step
        separate = [k for k in kinks if abs(k.t - freezing.t0) > onset_window]
        return "kink_and_freezing" if separate else "freezing"
    if kinks:
        return "kink"
    return "analytic_compatible"


def analyze_curve(
    curve: PressureCurve,
    slope_gap_threshold: float = DEFAULT_SLOPE_GAP_THRESHOLD,
    plateau_value: float = 0.0,
    band: float = 0.02,
    window: int = 3,
) -> TransitionReport:
    """Run both detectors and classify."""
    kinks = detect_kinks(curve, slope_gap_threshold, window)
    freezing = detect_freezing(curve, plateau_value, band)
    return TransitionReport(
        kinks=tuple(kinks),
        freezing=freezing,
        classification=classify(curve, kinks, freezing, window),
    )


def legendre_transform(curve: PressureCurve, alpha_grid) -> np.ndarray:
    """Entropy-spectrum samples E(alpha) = inf_t (P(t) - t*alpha) over the grid."""
    alpha = np.atleast_1d(np.asarray(alpha_grid, dtype=float))
    vals = curve.values[None, :] - alpha[:, None] * curve.ts[None, :]
    return vals.min(axis=1)


# -- curve CSV and report JSON ---------------------------------------------


def write_curve_csv(curve: PressureCurve, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,pressure\n")
        for t, p in zip(curve.ts, curve.values):
            fh.write(f"{t:.17g},{p:.17g}\n")


def read_curve_csv(path, value_tolerance: float = 1e-9) -> PressureCurve:
    ts: list[float] = []
    ps: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header.replace(" ", "") != "t,pressure":
            raise MalformedCurve("expected header 't,pressure'", line=1)
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != 2:
                raise MalformedCurve("expected two comma-separated columns", line=lineno)
            try:
                t, p = float(cells[0]), float(cells[1])
            except ValueError:
                raise MalformedCurve("could not parse numeric row", line=lineno) from None
            if ts and t <= ts[-1]:
                raise MalformedCurve("t column must be strictly increasing", line=lineno)
            ts.append(t)
            ps.append(p)
    if len(ts) < 2:
        raise MalformedCurve("curve needs at least two rows")
    return PressureCurve(np.array(ts), np.array(ps), value_tolerance=value_tolerance, source=str(path))


def report_to_json(report: TransitionReport) -> str:
    payload = {
        "kinks": [
            {
                "t": k.t,
                "left_slope": k.left_slope,
                "right_slope": k.right_slope,
                "gap": k.gap,
            }
            for k in report.kinks
        ],
        "freezing": (
            {"t0": report.freezing.t0, "value": report.freezing.value}
            if report.freezing is not None
            else None
        ),
        "classification": report.classification,
    }
    return json.dumps(payload, indent=2, sort_keys=True)
