"""Tests for the finite-state pressure core.

Derived expectations come from independent oracles: direct numpy
eigen-decompositions, word counting, closed-form Gibbs weights, and a
long seeded chain simulation. Frozen constants are stated next to the
oracle that produced them.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pressure_lab import markov
from pressure_lab.errors import (
    NoConvergence,
    NonIrreducible,
    SupportMismatch,
    ValidationError,
)
from pressure_lab.markov import (
    MarkovMeasure,
    MarkovModel,
    dumps_model,
    equilibrium_measure,
    finite_difference,
    integral_of_potential,
    loads_model,
    markov_entropy,
    perron_root,
    pressure,
    pressure_derivative,
    random_irreducible_model,
    random_measure_on,
)

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0  # positive root of x^2 - x - 1
LOG2 = math.log(2.0)

FULL_2 = MarkovModel(np.ones((2, 2)))
GOLDEN_MODEL = MarkovModel(np.array([[1.0, 1.0], [1.0, 0.0]]))


def target_potential(values):
    """Edge potential depending only on the target symbol."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    return np.tile(values, (n, 1))


class TestPerronRoot:
    def test_scalar_selfloop(self):
        data = perron_root(np.array([[3.7]]))
        assert data.rho == pytest.approx(3.7, abs=1e-12)
        assert data.right_vec[0] == 1.0

    def test_all_ones_matches_eigendecomposition(self):
        B = np.ones((2, 2))
        oracle = max(np.linalg.eigvals(B).real)
        data = perron_root(B)
        assert data.rho == pytest.approx(oracle, abs=1e-11)
        assert data.rho == pytest.approx(2.0, abs=1e-11)

    def test_golden_mean_matches_polynomial_root(self):
        oracle = max(np.roots([1.0, -1.0, -1.0]))
        data = perron_root(GOLDEN_MODEL.adjacency)
        assert data.rho == pytest.approx(oracle, abs=1e-11)
        assert data.rho == pytest.approx(1.6180339887498949, abs=1e-10)

    def test_eigendata_invariants(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            model = random_irreducible_model(int(rng.integers(2, 6)), rng)
            B = model.weight_matrix(0.7)
            data = perron_root(B)
            assert data.rho > 0
            assert np.all(data.right_vec > 0)
            assert np.all(data.left_vec > 0)
            assert data.right_vec.sum() == pytest.approx(1.0, abs=1e-12)
            assert data.left_vec.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.max(np.abs(B @ data.right_vec - data.rho * data.right_vec)) <= 1e-10
            assert np.max(np.abs(data.left_vec @ B - data.rho * data.left_vec)) <= 1e-10

    def test_periodic_matrix_converges(self):
        # plain power iteration oscillates on a 2-cycle; the shift handles it
        data = perron_root(np.array([[0.0, 2.0], [3.0, 0.0]]))
        assert data.rho == pytest.approx(math.sqrt(6.0), abs=1e-10)

    def test_not_irreducible(self):
        with pytest.raises(NonIrreducible):
            perron_root(np.array([[1.0, 0.0], [0.0, 1.0]]))

    def test_no_convergence_under_tiny_cap(self):
        # asymmetric, so the all-ones start is not the eigenvector, and the
        # spectral gap ~ 1e-9 defeats a 3-iteration cap
        B = np.array([[1.0, 1e-9], [2e-9, 1.0]])
        with pytest.raises(NoConvergence):
            perron_root(B, max_iter=3)

    def test_rejects_negative_entries(self):
        with pytest.raises(ValidationError):
            perron_root(np.array([[1.0, -0.5], [1.0, 1.0]]))


class TestPressure:
    def test_full_shift_zero_potential_word_count(self):
        # oracle: the number of admissible words of length n is exactly 2^n
        for n in (5, 9):
            words = float(np.sum(np.linalg.matrix_power(FULL_2.adjacency, n - 1)))
            assert words == 2.0**n
            assert math.log(words) / n == pytest.approx(LOG2, abs=1e-12)
        for t in (-1.5, 0.0, 2.0):
            assert pressure(FULL_2, t) == pytest.approx(LOG2, abs=1e-12)

    def test_constant_potential_shifts_linearly(self):
        a = -0.37
        model = MarkovModel(np.ones((2, 2)), a * np.ones((2, 2)))
        for t in (-2.0, 0.5, 3.0):
            assert pressure(model, t) == pytest.approx(LOG2 + t * a, abs=1e-11)

    def test_golden_mean_entropy(self):
        assert pressure(GOLDEN_MODEL, 0.0) == pytest.approx(math.log(GOLDEN), abs=1e-11)
        # slow oracle: word counts grow like Fibonacci numbers
        n = 30
        words = float(np.sum(np.linalg.matrix_power(GOLDEN_MODEL.adjacency, n - 1)))
        assert math.log(words) / n == pytest.approx(math.log(GOLDEN), abs=0.02)

    def test_reducible_model_rejected(self):
        adjacency = np.array([[1.0, 1.0], [0.0, 1.0]])
        model = MarkovModel(adjacency, allow_reducible=True)
        assert model.reducible
        with pytest.raises(NonIrreducible):
            pressure(model, 0.0)

    def test_large_parameter_is_overflow_safe(self):
        # rho = e^750 + e^-750, so log rho is exactly 750 in double precision
        model = MarkovModel(np.ones((2, 2)), target_potential([250.0, -250.0]))
        assert pressure(model, 3.0) == pytest.approx(750.0, abs=1e-9)


class TestEquilibriumMeasure:
    def test_full_shift_uniform(self):
        for t in (-1.0, 0.0, 2.5):
            mu = equilibrium_measure(FULL_2, t)
            assert np.allclose(mu.stationary, [0.5, 0.5], atol=1e-11)
            assert np.allclose(mu.transition, 0.5, atol=1e-11)

    def test_two_state_gibbs_closed_form(self):
        a, b = 0.8, -0.4
        model = MarkovModel(np.ones((2, 2)), target_potential([a, b]))
        mu = equilibrium_measure(model, 1.0)
        z = math.exp(a) + math.exp(b)
        assert np.allclose(mu.stationary, [math.exp(a) / z, math.exp(b) / z], atol=1e-10)

    def test_golden_mean_maximal_measure_against_eigen_oracle(self):
        # oracle: stationary = (left .* right) from a direct eigen-decomposition
        A = GOLDEN_MODEL.adjacency
        vals, right = np.linalg.eig(A)
        _, left = np.linalg.eig(A.T)
        i = int(np.argmax(vals.real))
        r = np.abs(right[:, i].real)
        l = np.abs(left[:, i].real)
        stationary_oracle = l * r / np.sum(l * r)
        mu = equilibrium_measure(GOLDEN_MODEL, 0.0)
        assert np.allclose(mu.stationary, stationary_oracle, atol=1e-10)
        # golden ratio closed form: pi proportional to (rho^2, 1)
        assert mu.stationary[0] / mu.stationary[1] == pytest.approx(GOLDEN**2, abs=1e-9)
        assert markov_entropy(mu) == pytest.approx(math.log(GOLDEN), abs=1e-10)

    def test_achieves_pressure(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            model = random_irreducible_model(int(rng.integers(2, 6)), rng)
            t = float(rng.uniform(-2, 2))
            mu = equilibrium_measure(model, t)
            lhs = markov_entropy(mu) + t * integral_of_potential(mu, model)
            assert lhs == pytest.approx(pressure(model, t), abs=1e-8)


class TestEntropy:
    def test_bernoulli_half(self):
        mu = MarkovMeasure(0.5 * np.ones((2, 2)), np.array([0.5, 0.5]))
        assert markov_entropy(mu) == pytest.approx(LOG2, abs=1e-14)

    def test_point_mass_on_self_loop(self):
        mu = MarkovMeasure(np.array([[1.0]]), np.array([1.0]))
        assert markov_entropy(mu) == 0.0

    def test_bernoulli_quarter(self):
        p = np.array([0.25, 0.75])
        oracle = float(-(p * np.log(p)).sum())
        mu = MarkovMeasure(np.tile(p, (2, 1)), p)
        assert markov_entropy(mu) == pytest.approx(oracle, abs=1e-14)
        assert oracle == pytest.approx(0.5623351446188083, abs=1e-15)

    def test_bounds(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            model = random_irreducible_model(4, rng)
            nu = random_measure_on(model, rng)
            h = markov_entropy(nu)
            assert -1e-12 <= h <= math.log(4) + 1e-12


class TestIntegralOfPotential:
    def test_constant(self):
        c = 1.7
        model = MarkovModel(np.ones((3, 3)), c * np.ones((3, 3)))
        rng = np.random.default_rng(11)
        nu = random_measure_on(model, rng)
        assert integral_of_potential(nu, model) == pytest.approx(c, abs=1e-12)

    def test_symmetric_half(self):
        model = MarkovModel(np.ones((2, 2)), target_potential([0.0, 1.0]))
        mu = equilibrium_measure(model, 0.0)
        assert integral_of_potential(mu, model) == pytest.approx(0.5, abs=1e-10)

    def test_golden_edge_frequency_against_simulation(self):
        # potential 1 on the 0->0 edge; equilibrium average = pi_0 P_00 = 1/sqrt(5)
        phi = np.zeros((2, 2))
        phi[0, 0] = 1.0
        model = MarkovModel(GOLDEN_MODEL.adjacency, phi)
        mu = equilibrium_measure(model, 0.0)
        value = integral_of_potential(mu, model)
        assert value == pytest.approx(1.0 / math.sqrt(5.0), abs=1e-9)

        # independent oracle: 10^6-step Birkhoff frequency of the 0->0 edge
        rng = np.random.default_rng(42)
        steps = 10**6
        uniforms = rng.random(steps)
        state, hits = 0, 0
        p00 = mu.transition[0, 0]
        for u in uniforms:
            if state == 0:
                nxt = 0 if u < p00 else 1
                hits += nxt == 0
            else:
                nxt = 0
            state = nxt
        assert hits / steps == pytest.approx(value, abs=5e-3)

    def test_support_mismatch(self):
        bad = MarkovMeasure(0.5 * np.ones((2, 2)), np.array([0.5, 0.5]))
        with pytest.raises(SupportMismatch):
            integral_of_potential(bad, GOLDEN_MODEL)

    def test_range_bounds(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            model = random_irreducible_model(3, rng)
            nu = random_measure_on(model, rng)
            val = integral_of_potential(nu, model)
            allowed = model.edge_potential[model.adjacency > 0]
            assert allowed.min() - 1e-12 <= val <= allowed.max() + 1e-12


class TestPressureDerivative:
    def test_constant_potential(self):
        c = -0.9
        model = MarkovModel(np.ones((2, 2)), c * np.ones((2, 2)))
        for t in (-1.0, 0.0, 2.0):
            assert pressure_derivative(model, t) == pytest.approx(c, abs=1e-10)

    def test_symmetric_at_zero(self):
        model = MarkovModel(np.ones((2, 2)), target_potential([0.0, 1.0]))
        assert pressure_derivative(model, 0.0) == pytest.approx(0.5, abs=1e-10)

    def test_zero_potential(self):
        for t in (-3.0, 0.0, 1.0):
            assert pressure_derivative(GOLDEN_MODEL, t) == pytest.approx(0.0, abs=1e-12)

    def test_matches_finite_difference(self):
        rng = np.random.default_rng(17)
        for _ in range(5):
            model = random_irreducible_model(int(rng.integers(2, 6)), rng)
            for t in np.linspace(-2.0, 2.0, 21):
                fd = finite_difference(lambda s: pressure(model, s), t)
                assert pressure_derivative(model, t) == pytest.approx(fd, abs=1e-5)


class TestVariationalPrinciple:
    @settings(max_examples=25, deadline=None)
    @given(
        n=st.integers(2, 4),
        seed=st.integers(0, 10**6),
        t=st.floats(-2.0, 2.0),
    )
    def test_markov_measures_never_beat_pressure(self, n, seed, t):
        rng = np.random.default_rng(seed)
        model = random_irreducible_model(n, rng)
        p = pressure(model, t)
        for _ in range(5):
            nu = random_measure_on(model, rng)
            lhs = markov_entropy(nu) + t * integral_of_potential(nu, model)
            assert lhs <= p + 1e-8

    def test_convexity_on_grid(self):
        rng = np.random.default_rng(23)
        ts = np.linspace(-2.0, 2.0, 41)
        for _ in range(5):
            model = random_irreducible_model(int(rng.integers(2, 6)), rng)
            values = np.array([pressure(model, t) for t in ts])
            midpoint_defect = values[1:-1] - 0.5 * (values[:-2] + values[2:])
            assert np.max(midpoint_defect) <= 1e-9

    def test_nonpositive_potential_monotone(self):
        rng = np.random.default_rng(29)
        for _ in range(5):
            model = random_irreducible_model(3, rng, potential_range=(-2.0, -0.1))
            ts = np.linspace(0.0, 3.0, 16)
            values = [pressure(model, t) for t in ts]
            assert all(a >= b - 1e-10 for a, b in zip(values, values[1:]))

    def test_transpose_invariance(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            model = random_irreducible_model(int(rng.integers(2, 6)), rng)
            flipped = model.transposed()
            for t in (-1.0, 0.4, 2.0):
                assert pressure(model, t) == pytest.approx(pressure(flipped, t), abs=1e-10)


class TestModelValidation:
    def test_adjacency_entries(self):
        with pytest.raises(ValidationError):
            MarkovModel(np.array([[0.5, 1.0], [1.0, 1.0]]))

    def test_dead_end_state(self):
        with pytest.raises(ValidationError):
            MarkovModel(np.array([[0.0, 1.0], [0.0, 0.0]]), allow_reducible=True)

    def test_nonfinite_potential_on_edge(self):
        phi = np.array([[np.inf, 0.0], [0.0, 0.0]])
        with pytest.raises(ValidationError):
            MarkovModel(np.ones((2, 2)), phi)

    def test_measure_row_sums(self):
        with pytest.raises(ValidationError):
            MarkovMeasure(np.array([[0.6, 0.6], [0.5, 0.5]]), np.array([0.5, 0.5]))

    def test_measure_stationarity(self):
        P = np.array([[0.9, 0.1], [0.1, 0.9]])
        with pytest.raises(ValidationError):
            MarkovMeasure(P, np.array([0.9, 0.1]))

    def test_immutability(self):
        with pytest.raises(ValueError):
            FULL_2.adjacency[0, 0] = 0.0


class TestModelFiles:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(37)
        model = random_irreducible_model(4, rng)
        text = dumps_model(model)
        back = loads_model(text)
        assert np.array_equal(back.adjacency, model.adjacency)
        assert np.allclose(back.edge_potential, model.edge_potential, atol=0)
        path = tmp_path / "model.txt"
        markov.save_model(model, path)
        assert np.array_equal(markov.load_model(path).adjacency, model.adjacency)

    def test_forbidden_edges_written_as_dot(self):
        text = dumps_model(GOLDEN_MODEL)
        lines = text.strip().splitlines()
        assert lines[0] == "markov n=2"
        assert lines[4].split() == ["0.0", "."]

    def test_bad_header(self):
        with pytest.raises(ValidationError, match="header"):
            loads_model("markov m=2\n1 1\n1 1\n0 0\n0 0\n")

    def test_wrong_row_count(self):
        with pytest.raises(ValidationError):
            loads_model("markov n=2\n1 1\n1 1\n0 0\n")

    def test_value_on_forbidden_edge(self):
        with pytest.raises(ValidationError):
            loads_model("markov n=2\n1 1\n1 0\n0 0\n0 1.5\n")
