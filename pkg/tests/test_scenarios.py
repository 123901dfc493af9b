"""Tests for composite scenarios against their exact envelope oracles."""

import math

import numpy as np
import pytest

from pressure_lab import markov
from pressure_lab.analysis import analyze_curve, detect_freezing, detect_kinks, upper_envelope
from pressure_lab.errors import (
    InvalidEntropy,
    OrderingViolated,
    RationalAlpha,
    TruncationTooCoarse,
    UnknownScenario,
    ValidationError,
)
from pressure_lab.scenarios import (
    build_axiom_a,
    build_hybrid,
    build_multi_attractor,
    build_neutral,
    build_product_example,
    build_two_sinks,
    composite_pressure,
    parse_scenario_text,
    random_piecewise_linear_markov,
)

LOG2 = math.log(2.0)
LOG3 = math.log(3.0)
LOG5 = math.log(5.0)
IRRATIONAL = (math.sqrt(5.0) - 1.0) / 2.0


def assert_curve_matches_envelope(scenario, t_min=-2.0, t_max=3.0, steps=1001, tol=1e-9):
    env = scenario.envelope()
    curve = scenario.sample_curve(t_min, t_max, steps)
    err = float(np.max(np.abs(curve.values - env.value(curve.ts))))
    assert err <= tol, f"{scenario.label}: curve deviates from envelope by {err:.3e}"
    return curve


class TestTwoSinks:
    def test_predicted_structure(self):
        s = build_two_sinks(2)
        assert s.predicted_kinks == (pytest.approx(LOG2, abs=1e-15),)
        slopes = sorted(b.slope for b in s.predicted_branches)
        assert slopes == [0.0, 0.5, 1.0]

    def test_curve_and_kink(self):
        s = build_two_sinks(2)
        curve = assert_curve_matches_envelope(s, -1.0, 2.0, 1001)
        kinks = detect_kinks(curve)
        assert len(kinks) == 1
        assert abs(kinks[0].t - LOG2) <= 3.0 / 1000.0

    def test_entropy_at_zero(self):
        assert composite_pressure(build_two_sinks(2), 0.0) == pytest.approx(LOG2, abs=1e-12)

    def test_three_symbols_sink_dominates(self):
        assert composite_pressure(build_two_sinks(3), 2.0) == pytest.approx(2.0, abs=1e-12)

    def test_half_sink_never_wins(self):
        s = build_two_sinks(2)
        env = s.envelope()
        assert all(abs(b.slope - 0.5) > 1e-12 for b in env.active)

    def test_demo_map_realizes_birkhoff_limits(self):
        from pressure_lab.smooth2d import birkhoff_average

        s = build_two_sinks(2)
        n = 10**5
        a1 = birkhoff_average(s.demo_map, s.demo_potential, (0.3, 0.5), n)
        a2 = birkhoff_average(s.demo_map, s.demo_potential, (0.7, 0.45), n)
        assert a1 == pytest.approx(1.0, abs=1e-4)
        assert a2 == pytest.approx(0.5, abs=1e-4)

    def test_validation(self):
        with pytest.raises(ValidationError):
            build_two_sinks(1)
        with pytest.raises(ValidationError):
            build_two_sinks(2, period=0)


class TestAxiomA:
    def test_two_piece_kink(self):
        s = build_axiom_a([LOG2, LOG3])
        assert s.predicted_kinks == (pytest.approx((LOG3 - LOG2) / 2.0, abs=1e-15),)
        assert_curve_matches_envelope(s, -1.0, 2.0, 1001)

    def test_equal_entropies_kink_at_zero(self):
        s = build_axiom_a([LOG2, LOG2])
        assert s.predicted_kinks == (pytest.approx(0.0, abs=1e-15),)

    def test_third_piece_shadowed(self):
        s = build_axiom_a([LOG2, LOG3, LOG5])
        assert s.predicted_kinks == (pytest.approx((LOG5 - LOG2) / 2.0, abs=1e-14),)
        env = s.envelope()
        assert len(env.active) == 2  # the log3 branch never attains the envelope
        assert_curve_matches_envelope(s)

    def test_non_integer_entropies_exact(self):
        s = build_axiom_a([0.8, 0.55])
        curve = s.sample_curve(-1.0, 1.0, 101)
        expected = np.maximum(0.8 + curve.ts, 0.55 - curve.ts)
        assert np.max(np.abs(curve.values - expected)) <= 1e-9

    def test_invalid_entropy(self):
        with pytest.raises(InvalidEntropy):
            build_axiom_a([LOG2, -0.1])
        with pytest.raises(ValidationError):
            build_axiom_a([LOG2])


class TestMultiAttractor:
    def test_single_attractor(self):
        s = build_multi_attractor([LOG2], LOG3)
        assert s.predicted_kinks == (pytest.approx(LOG3 - LOG2, abs=1e-15),)
        assert_curve_matches_envelope(s)

    def test_two_attractors(self):
        s = build_multi_attractor([1.0, 0.5], 1.2)
        assert s.predicted_kinks == (pytest.approx(0.2), pytest.approx(0.5))
        assert_curve_matches_envelope(s)

    def test_k3_acceptance_geometry(self):
        s = build_multi_attractor([1.0, 0.7, 0.3], 1.1)
        assert len(s.predicted_kinks) == 3
        curve = assert_curve_matches_envelope(s)
        kinks = detect_kinks(curve)
        assert len(kinks) == 3

    def test_kink_count_formula_one_to_five(self):
        # gaps g_i = 0.1 * (i + 1) strictly increase, so every branch attains
        for k in range(1, 6):
            hs = [2.0]
            for i in range(1, k):
                hs.append(hs[-1] - 0.1 * (i + 1))
            h_star = hs[0] + 0.05
            s = build_multi_attractor(hs, h_star)
            assert len(s.predicted_kinks) == k
            formula = sorted([h_star - hs[0]] + [hs[i] - hs[i + 1] for i in range(k - 1)])
            assert np.allclose(s.predicted_kinks, formula, atol=1e-12)
            curve = s.sample_curve(-2.0, 3.0, 1001)
            assert len(detect_kinks(curve)) == k

    def test_negative_first_kink_counted(self):
        # h* < h1 puts the first breakpoint at negative t; still exactly k kinks
        s = build_multi_attractor([1.0, 0.5], 0.9)
        assert s.predicted_kinks[0] == pytest.approx(-0.1, abs=1e-14)
        assert len(s.predicted_kinks) == 2

    def test_ordering_violations(self):
        with pytest.raises(OrderingViolated):
            build_multi_attractor([1.0, 1.0], 1.1)
        with pytest.raises(OrderingViolated, match="gap"):
            build_multi_attractor([1.0, 0.5, 0.3], 1.1)  # gaps 0.5 > 0.2 fail
        with pytest.raises(InvalidEntropy):
            build_multi_attractor([1.0, 0.5], -0.2)


class TestProductExample:
    def test_y_independent_potential_reduces_exactly(self):
        g = lambda x: np.cos(2 * np.pi * x)
        s = build_product_example(IRRATIONAL, lambda x, y: g(x) + 0.0 * np.asarray(y), level=6)
        piece = s.pieces[0]
        size = 2**6
        mids = (np.arange(size) + 0.5) / size
        assert np.max(np.abs(piece.phi - g(mids))) <= 1e-10

    def test_constant_potential_linear_pressure(self):
        c = -0.35
        s = build_product_example(IRRATIONAL, lambda x, y: c + 0.0 * np.asarray(x), level=6)
        for t in (-1.0, 0.0, 2.0):
            assert s.pressure(t) == pytest.approx(LOG2 + t * c, abs=1e-11)

    def test_cos_y_averages_to_zero(self):
        s = build_product_example(IRRATIONAL, lambda x, y: np.cos(2 * np.pi * y) + 0.0 * np.asarray(x))
        assert np.max(np.abs(s.pieces[0].phi)) <= 1e-10
        curve = s.sample_curve(-1.0, 2.0, 201)
        assert np.max(np.abs(curve.values - LOG2)) <= 1e-9
        assert analyze_curve(curve).classification == "analytic_compatible"

    def test_rational_alpha_rejected(self):
        for alpha in (0.5, 0.75, 1.0 / 3.0):
            with pytest.raises(RationalAlpha):
                build_product_example(alpha, lambda x, y: 0.0 * np.asarray(x))

    def test_sparse_matches_dense_transfer(self):
        s = build_product_example(
            IRRATIONAL, lambda x, y: np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y) + 0.1, level=6
        )
        piece = s.pieces[0]
        model = piece.to_markov_model()
        for t in (-1.0, 0.7):
            assert piece.pressure(t) == pytest.approx(markov.pressure(model, t), abs=1e-9)

    def test_lebesgue_birkhoff_lower_bound(self):
        # Float iteration of the doubling coordinate collapses to 0 within 53
        # steps (left shifts exhaust the mantissa), so run the x-orbit in
        # exact integer arithmetic on an odd-denominator rational.
        phi = lambda x, y: np.cos(2 * np.pi * np.asarray(x)) + 0.0 * np.asarray(y)
        s = build_product_example(IRRATIONAL, phi, level=8)
        q = 3**25
        state = 2 * (q // 7) + 1
        n = 200000
        total = 0.0
        for _ in range(n):
            total += math.cos(2 * math.pi * state / q)
            state = (2 * state) % q
        avg = total / n
        # Lebesgue measure is ergodic with entropy log 2 for the product
        assert abs(avg) <= 0.02
        assert LOG2 + avg <= s.pressure(1.0) + 0.01

    def test_rotation_side_birkhoff(self):
        from pressure_lab.smooth2d import birkhoff_average

        phi = lambda x, y: np.cos(2 * np.pi * np.asarray(y)) + 0.0 * np.asarray(x)
        s = build_product_example(IRRATIONAL, phi, level=6)
        avg = birkhoff_average(s.demo_map, phi, (0.2137, 0.5411), 100000)
        assert abs(avg) <= 1e-3  # unique ergodic average of the rotation factor
        assert LOG2 + avg <= s.pressure(1.0) + 0.01


class TestNeutral:
    @pytest.fixture(scope="class")
    def scenario(self):
        return build_neutral(0.5, 4096)

    def test_entropy_at_zero(self, scenario):
        assert scenario.pressure(0.0) == pytest.approx(LOG2, abs=0.02)

    def test_plateau_past_one(self, scenario):
        assert -0.02 <= scenario.pressure(1.2) <= 0.02

    def test_negative_parameter_exceeds_entropy(self, scenario):
        assert scenario.pressure(-1.0) >= LOG2

    def test_curve_shape_and_freezing(self, scenario):
        curve = scenario.sample_curve(0.0, 2.0, 201)
        values = curve.values
        assert np.min(values) >= -0.02
        assert np.all(np.diff(values) <= 1e-12)  # nonincreasing for t >= 0
        assert np.max(values[curve.ts >= 1.1]) <= 0.02
        freezing = detect_freezing(curve, 0.0, 0.02)
        assert freezing is not None and abs(freezing.t0 - 1.0) <= 0.05

    def test_classification_freezing(self, scenario):
        curve = scenario.sample_curve(0.0, 1.5, 151)
        assert analyze_curve(curve).classification == "freezing"

    def test_truncation_mass_check(self):
        with pytest.raises(TruncationTooCoarse):
            build_neutral(0.95, 256)

    def test_preconditions(self):
        with pytest.raises(ValidationError):
            build_neutral(0.5, 128)
        with pytest.raises(ValidationError):
            build_neutral(1.5, 1024)

    def test_renewal_equals_dense_perron(self):
        piece = build_neutral(0.5, 256).pieces[0]
        model = piece.to_markov_model()
        for t in (0.0, 0.5, 0.9):
            assert piece.pressure(t) == pytest.approx(markov.pressure(model, t), abs=5e-10)

    def test_interval_map_data_consistent(self):
        piece = build_neutral(0.5, 512).pieces[0]
        # slopes of the induced piecewise-linear realization are expanding
        ratios = piece.interval_lengths[:-1] / piece.interval_lengths[1:]
        assert np.all(ratios >= 1.0)
        assert piece.deriv_fn(0.0) == 1.0  # neutral fixed point
        assert piece.map_fn(0.0) == 0.0

    def test_margulis_ruelle_on_renewal_chain(self):
        model = build_neutral(0.5, 256).pieces[0].to_markov_model()
        for t in (0.0, 0.5, 1.0):
            mu = markov.equilibrium_measure(model, t)
            h = markov.markov_entropy(mu)
            expansion = -markov.integral_of_potential(mu, model)
            assert h <= expansion + 1e-8


class TestHybrid:
    def test_minus_envelope_matches_claim(self):
        s = build_hybrid(lambda_f=-0.3)
        env = s.constrained_envelope("-")
        ts = np.linspace(0.0, 2.0, 201)
        assert np.max(np.abs(env.value(ts) - 0.3 * ts)) <= 1e-9

    def test_scenario_lambda_bounds(self):
        s = build_hybrid(lambda_f=-0.3)
        assert s.lambda_f_min == -0.3
        assert s.lambda_f_max == pytest.approx(LOG2)

    def test_full_envelope_and_kink(self):
        s = build_hybrid(lambda_f=-0.3)
        curve = assert_curve_matches_envelope(s, -1.0, 2.0, 1001)
        kinks = detect_kinks(curve)
        t_star = LOG2 / (LOG2 + 0.3)
        assert len(kinks) == 1
        assert abs(kinks[0].t - t_star) <= 3.0 / 1000.0

    def test_plus_envelope_is_expanding_piece(self):
        s = build_hybrid(lambda_f=-0.3)
        env = s.constrained_envelope("+")
        assert env.value(0.0) == pytest.approx(LOG2, abs=1e-15)
        assert env.value(1.0) == pytest.approx(0.0, abs=1e-15)

    def test_validation(self):
        with pytest.raises(ValidationError):
            build_hybrid(lambda_f=0.1)
        with pytest.raises(InvalidEntropy):
            build_hybrid(lambda_f=-0.3, entropy=0.9)


class TestMargulisRuellePL:
    def test_random_instances(self):
        rng = np.random.default_rng(7)
        for _ in range(3):
            model, slopes = random_piecewise_linear_markov(int(rng.integers(3, 6)), rng)
            assert np.all(slopes >= 1.0)
            for t in np.linspace(-2.0, 2.0, 5):
                mu = markov.equilibrium_measure(model, t)
                h = markov.markov_entropy(mu)
                expansion = -markov.integral_of_potential(mu, model)
                assert h <= expansion + 1e-8


class TestScenarioFiles:
    def test_each_kind_parses(self):
        cases = [
            "scenario = two_sinks\nN = 3\n",
            "scenario = axiom_a\nentropies = 0.69314718055994531, 1.0986122886681098\n",
            "scenario = multi_attractor\nentropies = 1.0, 0.7, 0.3\nh_star = 1.1\n",
            f"scenario = product\nalpha = {IRRATIONAL}\npotential = cos_y\nlevel = 6\n",
            "scenario = neutral\nalpha_mp = 0.5\ntruncation = 512\n",
            "scenario = hybrid\nlambda_f = -0.3\n",
        ]
        labels = []
        for text in cases:
            labels.append(parse_scenario_text(text).label)
        assert len(set(labels)) == len(labels)

    def test_comments_and_spacing(self):
        s = parse_scenario_text("# a comment\nscenario = two_sinks\n\nN = 2  # inline\n")
        assert "two_sinks" in s.label

    def test_unknown_kind(self):
        with pytest.raises(UnknownScenario):
            parse_scenario_text("scenario = nosuch\n")

    def test_missing_required_key(self):
        with pytest.raises(ValidationError):
            parse_scenario_text("scenario = multi_attractor\nentropies = 1.0\n")

    def test_unused_keys_rejected(self):
        with pytest.raises(ValidationError, match="unused"):
            parse_scenario_text("scenario = two_sinks\nN = 2\nbogus = 7\n")

    def test_const_product_potential(self):
        s = parse_scenario_text(
            f"scenario = product\nalpha = {IRRATIONAL}\npotential = const\nvalue = 0.25\nlevel = 6\n"
        )
        assert s.pressure(1.0) == pytest.approx(LOG2 + 0.25, abs=1e-11)


class TestEnvelopeAgreementSweep:
    def test_all_exact_scenarios(self):
        scenarios = [
            build_two_sinks(2),
            build_two_sinks(3),
            build_axiom_a([LOG2, LOG3]),
            build_axiom_a([0.8, 0.55, 0.9]),
            build_multi_attractor([1.0, 0.7, 0.3], 1.1),
            build_hybrid(-0.3),
        ]
        for s in scenarios:
            curve = assert_curve_matches_envelope(s)
            kinks = detect_kinks(curve)
            in_range = [b for b in s.predicted_kinks if -1.9 < b < 2.9]
            assert len(kinks) == len(in_range), s.label
            step = 5.0 / 1000.0
            for k, b in zip(kinks, in_range):
                assert abs(k.t - b) <= step, s.label
