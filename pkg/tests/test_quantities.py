import math

import mpmath
import numpy as np
import pytest

from coupledchains import (
    ParameterError,
    amplification,
    mismatch_floor_report,
    mismatch_rate,
    nonnullness,
    oscillation,
    oscillation_sum,
    quantity_report,
    random_model,
    stationary_law,
)
from coupledchains.model import build_channel_model
from conftest import CORPUS_PARAMS, NOISY, X_TABLE

from oracle import naive_oscillation


class TestMismatchRate:
    def test_reference_value(self, ref_model):
        kernel, law = ref_model
        rho = mismatch_rate(kernel, law)
        assert rho.value == pytest.approx(0.1, abs=1e-12)
        assert rho.stability_gap <= 1e-12

    def test_noiseless_is_zero(self, noiseless_model):
        kernel, law = noiseless_model
        rho = mismatch_rate(kernel, law)
        assert rho.value == pytest.approx(0.0, abs=1e-12)

    def test_construction_cap_on_corpus(self, corpus):
        for _, kernel, law in corpus:
            assert mismatch_rate(kernel, law).value <= 0.3 + 1e-12

    def test_channel_rho_is_max_offdiagonal_row_sum(self):
        emission = np.array([[0.85, 0.15], [0.05, 0.95]])
        kernel = build_channel_model(X_TABLE, emission)
        law = stationary_law(kernel)
        rho = mismatch_rate(kernel, law)
        assert rho.value == pytest.approx(0.15, abs=1e-12)

    def test_witness_reproduces_value(self, ref_model):
        from coupledchains import Slot, conditional_query, parse_pattern

        kernel, law = ref_model
        rho = mismatch_rate(kernel, law)
        pattern = parse_pattern(rho.witness["pattern"])
        a = rho.witness["a"]
        q = conditional_query(kernel, law, pattern, "Y0", extra=Slot.x_eq(a))
        assert 1.0 - float(q.probs[a]) == pytest.approx(rho.value, abs=0)


class TestNonnullness:
    def test_reference_value(self, ref_model):
        kernel, law = ref_model
        alpha = nonnullness(kernel, law)
        assert alpha.value == pytest.approx(0.3, abs=1e-12)
        assert alpha.stability_gap <= 1e-12

    def test_iid_uniform_hidden_chain(self):
        kernel = build_channel_model(np.full((2, 2), 0.5), NOISY)
        law = stationary_law(kernel)
        assert nonnullness(kernel, law).value == pytest.approx(0.5, abs=1e-12)

    def test_floor_bound_on_corpus(self, corpus):
        for _, kernel, law in corpus:
            assert nonnullness(kernel, law).value >= 0.05


class TestOscillation:
    def test_equal_depths_vanish(self, ref_model):
        kernel, law = ref_model
        for k in range(4):
            assert oscillation(kernel, law, k, k).value == 0.0

    def test_channel_oscillations_vanish(self, ref_model):
        kernel, law = ref_model
        assert oscillation(kernel, law, 1, 3).value == pytest.approx(0.0, abs=1e-12)
        assert oscillation(kernel, law, 2, 4).value == pytest.approx(0.0, abs=1e-12)

    def test_depth_zero_oscillation_of_channel(self, ref_model):
        # swapping the whole window moves the hidden conditional 0.7 <-> 0.3
        kernel, law = ref_model
        b0 = oscillation(kernel, law, 0, 2)
        assert b0.value == pytest.approx(math.log(0.7 / 0.3), abs=1e-12)

    def test_against_naive_double_loop(self):
        kernel = random_model(1, **CORPUS_PARAMS)
        law = stationary_law(kernel)
        value = oscillation(kernel, law, 1, 2).value
        assert value == pytest.approx(naive_oscillation(kernel, law.pi, 1, 2), abs=1e-12)
        value = oscillation(kernel, law, 0, 1).value
        assert value == pytest.approx(naive_oscillation(kernel, law.pi, 0, 1), abs=1e-12)

    def test_nonnegative_on_corpus(self, corpus):
        for _, kernel, law in corpus[:12]:
            for j, k in [(1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (3, 3)]:
                assert oscillation(kernel, law, j, k).value >= 0.0

    def test_markov_stabilization(self, corpus):
        for _, kernel, law in corpus[:12]:
            b12 = oscillation(kernel, law, 1, 2).value
            for k in (3, 4):
                assert oscillation(kernel, law, 1, k).value == pytest.approx(
                    b12, abs=1e-12
                )

    def test_bad_depths(self, ref_model):
        kernel, law = ref_model
        with pytest.raises(ParameterError):
            oscillation(kernel, law, 2, 1)


class TestOscillationSum:
    def test_single_term(self, corpus):
        _, kernel, law = corpus[0]
        assert oscillation_sum(kernel, law, 1, 3) == pytest.approx(
            oscillation(kernel, law, 1, 3).value, abs=0
        )

    def test_additivity(self):
        kernel = random_model(1, **CORPUS_PARAMS)
        law = stationary_law(kernel)
        total = oscillation_sum(kernel, law, 2, 3)
        parts = oscillation(kernel, law, 1, 3).value + oscillation(kernel, law, 2, 3).value
        assert total == pytest.approx(parts, abs=1e-15)

    def test_monotone_in_recent_depth(self, corpus):
        for _, kernel, law in corpus[:8]:
            cache = {}
            values = [
                oscillation_sum(kernel, law, j, 3, cache=cache) for j in range(4)
            ]
            assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))

    def test_channel_sums_vanish(self, ref_model):
        kernel, law = ref_model
        for j, k in [(1, 2), (2, 3), (3, 4)]:
            assert oscillation_sum(kernel, law, j, k) == pytest.approx(0.0, abs=1e-12)


class TestAmplification:
    def test_zero_sum_gives_two(self):
        assert amplification(0.3, 0.1, 0.0) == 2.0
        assert amplification(1.0, 0.0, 0.0) == 2.0

    def test_against_high_precision_evaluation(self):
        alpha, rho, gamma = 0.5, 0.1, 0.2
        with mpmath.workdps(50):
            eg = mpmath.e**gamma
            e2g = mpmath.e ** (2 * gamma)
            expected = (
                2
                + e2g * (2 * (eg - 1) + (e2g - 1)) / (alpha * (1 - rho) ** 2)
                + 2 * eg * (eg - 1)
            )
            expected = float(expected)
        assert amplification(alpha, rho, gamma) == pytest.approx(expected, rel=1e-12)

    def test_monotone_in_mismatch_rate(self):
        assert amplification(0.3, 0.99, 0.2) > amplification(0.3, 0.5, 0.2)

    def test_domain_checks(self):
        with pytest.raises(ParameterError):
            amplification(0.0, 0.1, 0.0)
        with pytest.raises(ParameterError):
            amplification(0.5, 1.0, 0.0)
        with pytest.raises(ParameterError):
            amplification(0.5, 0.1, -0.01)


class TestMismatchFloorReport:
    def test_reference_model(self, ref_model):
        kernel, law = ref_model
        report = mismatch_floor_report(kernel, law)
        assert report["s"] == pytest.approx(0.1, abs=1e-12)
        assert report["alpha"] == pytest.approx(0.3, abs=1e-12)
        assert report["premise_holds"] and report["h1_holds"]
        assert report["implication_ok"]

    def test_noiseless_model(self, noiseless_model):
        kernel, law = noiseless_model
        report = mismatch_floor_report(kernel, law)
        assert report["s"] == pytest.approx(0.0, abs=1e-12)
        assert report["premise_holds"] and report["h1_holds"]

    def test_implication_never_violated_on_corpus(self, corpus):
        saw_false_premise = False
        for _, kernel, law in corpus:
            report = mismatch_floor_report(kernel, law)
            assert report["implication_ok"]
            saw_false_premise = saw_false_premise or not report["premise_holds"]
        # the implication is one-directional; the corpus should contain
        # premise-false models (s >= alpha) with H1 still fine
        assert saw_false_premise


class TestQuantityReport:
    def test_reference_report(self, ref_model):
        kernel, law = ref_model
        report = quantity_report(kernel, law, 2, 3)
        assert report["rho"]["value"] == pytest.approx(0.1, abs=1e-12)
        assert report["alpha"]["value"] == pytest.approx(0.3, abs=1e-12)
        assert {(row["j"], row["k"]) for row in report["beta"]} == {
            (1, 1), (1, 2), (1, 3), (2, 2), (2, 3),
        }
        for row in report["beta"]:
            assert row["value"] == pytest.approx(0.0, abs=1e-12)
        for row in report["gamma"]:
            assert row["value"] == pytest.approx(0.0, abs=1e-12)
        for row in report["r"]:
            assert row["value"] == pytest.approx(2.0, abs=1e-12)

    def test_diagonal_entry_present(self, ref_model):
        kernel, law = ref_model
        report = quantity_report(kernel, law, 3, 3)
        assert any(row["j"] == row["k"] == 3 for row in report["beta"])

    def test_bad_depths(self, ref_model):
        kernel, law = ref_model
        with pytest.raises(ParameterError):
            quantity_report(kernel, law, 3, 2)
