"""Reproduction registry: every headline numerical claim as a checkable recipe.

Each claim runs a self-contained computation, compares against its stated
expectation at a pinned tolerance, and reports one line per sub-check.
The CLI `reproduce` command and the acceptance test suite both run these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import markov
from .analysis import analyze_curve, detect_freezing, detect_kinks
from .errors import UnknownClaim
from .maps import get_map
from .scenarios import (
    build_axiom_a,
    build_hybrid,
    build_multi_attractor,
    build_neutral,
    build_product_example,
    build_two_sinks,
    random_piecewise_linear_markov,
)
from .smooth2d import (
    cat_fixed_point_count,
    domination_check,
    eigenvalue_potential,
    find_periodic_orbits,
    lyapunov_exponents,
    orbit_pressure_estimate,
    oseledets_directions,
)

LOG2 = math.log(2.0)
LOG3 = math.log(3.0)
CAT_EXPONENT = math.log((3.0 + math.sqrt(5.0)) / 2.0)
GOLDEN_CONJUGATE = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class ClaimResult:
    claim_id: str
    passed: bool
    lines: list[str] = field(default_factory=list)


class _Checker:
    def __init__(self, claim_id: str):
        self.result = ClaimResult(claim_id, True)

    def check(self, ok: bool, text: str) -> None:
        self.result.passed &= bool(ok)
        self.result.lines.append(f"[{'ok' if ok else 'FAIL'}] {text}")


def _two_sinks_kink(c: _Checker) -> None:
    scenario = build_two_sinks(2)
    curve = scenario.sample_curve(-1.0, 2.0, 1001)
    step = 3.0 / 1000.0
    expected = np.maximum(LOG2, curve.ts)
    err = float(np.max(np.abs(curve.values - expected)))
    c.check(err <= 1e-9, f"curve vs max(log 2, t): max error {err:.3e} <= 1e-9")
    kinks = detect_kinks(curve)
    c.check(len(kinks) == 1, f"exactly one kink detected (got {len(kinks)})")
    if kinks:
        c.check(
            abs(kinks[0].t - LOG2) <= step,
            f"kink at {kinks[0].t:.6f}, expected {LOG2:.6f} within one grid step {step:.4f}",
        )


def _axiom_a_kink(c: _Checker) -> None:
    scenario = build_axiom_a([LOG2, LOG3])
    curve = scenario.sample_curve(-1.0, 2.0, 1001)
    step = 3.0 / 1000.0
    expected = np.maximum(LOG2 + curve.ts, LOG3 - curve.ts)
    err = float(np.max(np.abs(curve.values - expected)))
    c.check(err <= 1e-9, f"curve vs max(log2 + t, log3 - t): max error {err:.3e} <= 1e-9")
    kinks = detect_kinks(curve)
    t_star = (LOG3 - LOG2) / 2.0
    c.check(len(kinks) == 1, f"exactly one kink detected (got {len(kinks)})")
    if kinks:
        c.check(
            abs(kinks[0].t - t_star) <= step,
            f"kink at {kinks[0].t:.6f}, expected {t_star:.6f} within one grid step",
        )


def _multi_attractor_kinks(c: _Checker) -> None:
    scenario = build_multi_attractor([1.0, 0.7, 0.3], 1.1)
    oracle = list(scenario.predicted_kinks)
    c.check(
        len(oracle) == 3 and max(abs(a - b) for a, b in zip(oracle, [0.1, 0.3, 0.4])) <= 1e-12,
        f"envelope oracle breakpoints {oracle} match {{0.1, 0.3, 0.4}}",
    )
    curve = scenario.sample_curve(-2.0, 3.0, 1001)
    step = 5.0 / 1000.0
    env = scenario.envelope()
    err = float(np.max(np.abs(curve.values - env.value(curve.ts))))
    c.check(err <= 1e-9, f"curve vs predicted envelope: max error {err:.3e} <= 1e-9")
    kinks = detect_kinks(curve)
    c.check(len(kinks) == 3, f"exactly 3 kinks detected (got {len(kinks)})")
    if len(kinks) == 3:
        worst = max(abs(k.t - b) for k, b in zip(kinks, oracle))
        c.check(worst <= step, f"kink locations within one grid step (worst {worst:.4f})")


def _variational_principle(c: _Checker) -> None:
    rng = np.random.default_rng(42)
    ts = [-2.0, -0.5, 0.0, 1.0, 2.0]
    worst_ineq = -np.inf
    worst_eq = 0.0
    for _ in range(200):
        model = markov.random_irreducible_model(int(rng.integers(2, 6)), rng)
        pressures = {t: markov.pressure(model, t) for t in ts}
        for t in ts:
            mu = markov.equilibrium_measure(model, t)
            gap = abs(
                markov.markov_entropy(mu)
                + t * markov.integral_of_potential(mu, model)
                - pressures[t]
            )
            worst_eq = max(worst_eq, gap)
        for _ in range(20):
            nu = markov.random_measure_on(model, rng)
            h = markov.markov_entropy(nu)
            integral = markov.integral_of_potential(nu, model)
            for t in ts:
                worst_ineq = max(worst_ineq, h + t * integral - pressures[t])
    c.check(
        worst_ineq <= 1e-8,
        f"variational inequality: worst excess {worst_ineq:.3e} <= 1e-8 "
        "(200 models x 20 measures x 5 t-values)",
    )
    c.check(worst_eq <= 1e-8, f"equilibrium equality: worst gap {worst_eq:.3e} <= 1e-8")


def _derivative_check(c: _Checker) -> None:
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(50):
        model = markov.random_irreducible_model(int(rng.integers(2, 6)), rng)
        for t in np.linspace(-2.0, 2.0, 101):
            analytic = markov.pressure_derivative(model, t)
            fd = markov.finite_difference(lambda s: markov.pressure(model, s), t)
            worst = max(worst, abs(analytic - fd))
    c.check(worst <= 1e-5, f"|dP/dt - central difference|: worst {worst:.3e} <= 1e-5 (50 models)")


def _cat_lyapunov(c: _Checker) -> None:
    cat = get_map("cat")
    l1, l2 = lyapunov_exponents(cat, (0.12345, 0.6789), 10**4)
    c.check(abs(l1 - CAT_EXPONENT) <= 1e-4, f"lambda1 = {l1:.6f} vs {CAT_EXPONENT:.6f} +- 1e-4")
    c.check(abs(l1 + l2) <= 1e-6, f"lambda1 + lambda2 = {l1 + l2:.2e} within 1e-6")
    splitting = oseledets_directions(cat, cat.orbit(0.12345, 0.6789, 400))
    _, verdict = domination_check(cat, splitting, 2)
    c.check(verdict, "domination ratio < 1/2 at every orbit point for k = 2")


def _cat_orbit_pressure(c: _Checker) -> None:
    cat = get_map("cat")
    all_match = True
    for n in range(1, 9):
        orbits = find_periodic_orbits(cat, n)
        found = sum(o.period for o in orbits)
        expected = cat_fixed_point_count(n)
        if found != expected:
            all_match = False
        c.check(found == expected, f"n={n}: {found} fixed points of f^n (trace formula: {expected})")
    if all_match:
        est = orbit_pressure_estimate(cat, 0.0, 1.0, 8)
        c.check(
            abs(est - CAT_EXPONENT) <= 0.05,
            f"zero-potential estimate at n=8: {est:.6f} within 0.05 of {CAT_EXPONENT:.4f}",
        )


def _neutral_freezing(c: _Checker) -> None:
    scenario = build_neutral(0.5, 4096)
    p0 = scenario.pressure(0.0)
    c.check(abs(p0 - LOG2) <= 0.02, f"P(0) = {p0:.6f} vs log 2 within 0.02")
    p12 = scenario.pressure(1.2)
    c.check(-0.02 <= p12 <= 0.02, f"P(1.2) = {p12:.6f} inside [-0.02, 0.02]")
    curve = scenario.sample_curve(0.0, 1.5, 151)
    freezing = detect_freezing(curve, plateau_value=0.0, band=0.02)
    c.check(freezing is not None, "freezing plateau detected")
    if freezing:
        c.check(
            abs(freezing.t0 - 1.0) <= 0.05,
            f"freezing onset t0 = {freezing.t0:.3f} within 1.0 +- 0.05",
        )


def _hybrid_pminus(c: _Checker) -> None:
    scenario = build_hybrid(lambda_f=-0.3)
    env = scenario.constrained_envelope("-")
    ts = np.linspace(0.0, 2.0, 201)
    err = float(np.max(np.abs(env.value(ts) - 0.3 * ts)))
    c.check(err <= 1e-9, f"sign-restricted envelope vs 0.3 t on [0, 2]: max error {err:.3e} <= 1e-9")
    c.check(
        scenario.lambda_f_min == -0.3,
        f"scenario lambda_F minimum {scenario.lambda_f_min} equals -0.3",
    )


def _standard_map_potential(c: _Checker) -> None:
    smap = get_map("standard", k=0.5)
    rng = np.random.default_rng(42)
    pts = rng.random((10**4, 2))
    worst = max(eigenvalue_potential(smap, 1, p) for p in pts)
    c.check(worst <= 1e-12, f"potential <= 1e-12 at 10^4 sampled points (max {worst:.3e})")
    elliptic = eigenvalue_potential(smap, 1, (0.5, 0.0))
    c.check(abs(elliptic) <= 1e-10, f"potential at the elliptic fixed point: {elliptic:.3e} within 1e-10")


def _product_analytic(c: _Checker) -> None:
    scenario = build_product_example(
        GOLDEN_CONJUGATE, lambda x, y: np.cos(2 * np.pi * y) + 0.0 * np.asarray(x, float)
    )
    phi = scenario.pieces[0].phi
    c.check(
        float(np.max(np.abs(phi))) <= 1e-10,
        f"reduced potential is 0 within 1e-10 (max {float(np.max(np.abs(phi))):.3e})",
    )
    curve = scenario.sample_curve(-1.0, 2.0, 301)
    err = float(np.max(np.abs(curve.values - LOG2)))
    c.check(err <= 1e-9, f"curve constant log 2: max deviation {err:.3e}")
    report = analyze_curve(curve)
    c.check(
        report.classification == "analytic_compatible" and not report.kinks,
        f"classification {report.classification!r} with {len(report.kinks)} kinks",
    )


def _margulis_ruelle(c: _Checker) -> None:
    rng = np.random.default_rng(7)
    worst = -np.inf
    for _ in range(10):
        model, _slopes = random_piecewise_linear_markov(int(rng.integers(3, 7)), rng)
        for t in np.linspace(-2.0, 2.0, 11):
            mu = markov.equilibrium_measure(model, t)
            h = markov.markov_entropy(mu)
            # potential is -log|f'|, so the expansion integral is its negative
            expansion = -markov.integral_of_potential(mu, model)
            worst = max(worst, h - expansion)
    c.check(
        worst <= 1e-8,
        f"h_mu <= integral of log|f'|: worst excess {worst:.3e} <= 1e-8 "
        "(10 maps x 11 t-values)",
    )


CLAIMS = {
    "thmA-case1": ("two-sinks pressure max{log 2, t} with one kink at log 2", _two_sinks_kink),
    "thmA-case2": ("non-transitive pieces: kink at (log 3 - log 2)/2", _axiom_a_kink),
    "propD-k3": ("three attractors: exactly 3 kinks at envelope breakpoints", _multi_attractor_kinks),
    "vp-equality": ("variational inequality and equilibrium equality", _variational_principle),
    "derivative-check": ("pressure derivative matches finite differences", _derivative_check),
    "cat-lyapunov": ("cat map exponents and domination at k = 2", _cat_lyapunov),
    "cat-orbit-pressure": ("periodic-orbit counts and entropy estimate", _cat_orbit_pressure),
    "thmB-freezing": ("intermittent scenario freezes onto 0 at t = 1", _neutral_freezing),
    "thmB-pminus": ("sign-restricted envelope equals -t lambda_min", _hybrid_pminus),
    "thmE-potential": ("largest-eigenvalue potential is nonpositive, 0 at elliptic point", _standard_map_potential),
    "example1-analytic": ("product scenario stays analytic-compatible", _product_analytic),
    "margulis-ruelle": ("entropy bounded by expansion for equilibrium states", _margulis_ruelle),
}


def list_claims() -> list[tuple[str, str]]:
    return [(cid, desc) for cid, (desc, _) in CLAIMS.items()]


def run_claim(claim_id: str) -> ClaimResult:
    if claim_id not in CLAIMS:
        known = ", ".join(CLAIMS)
        raise UnknownClaim(f"unknown claim '{claim_id}'; known claims: {known}")
    checker = _Checker(claim_id)
    CLAIMS[claim_id][1](checker)
    return checker.result
