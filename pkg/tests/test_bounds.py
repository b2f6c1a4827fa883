import numpy as np
import pytest

from coupledchains import AssumptionError, random_model, stationary_law
from coupledchains.bounds import (
    Evaluator,
    QuantitySet,
    check_boundary_mismatch,
    check_boundary_reveal_floor,
    check_marginal_comparison,
    check_mixed_nonnullness,
    check_mixed_past_gap,
    check_observed_prediction,
    check_observed_ratios,
    check_prediction_gap_recheck,
    check_reference_nonnullness,
    check_reference_oscillation,
    run_suite,
    telescoping_diagnostics,
)
from coupledchains import jsonio
from coupledchains.model import build_channel_model
from conftest import NOISY, X_TABLE, channel


@pytest.fixture(scope="module")
def ref_ctx(ref_model):
    kernel, law = ref_model
    qs = QuantitySet(kernel, law, 262144)
    ev = Evaluator(kernel, law, 262144)
    return kernel, law, qs, ev


def by_name(checks, name):
    return [c for c in checks if c.name == name]


class TestMarginalComparison:
    def test_reference_depth_two(self, ref_ctx):
        _, _, qs, ev = ref_ctx
        gap, ratio = check_marginal_comparison(ev, qs, 2)
        assert gap.rhs == pytest.approx(0.2, abs=1e-12)  # rho * R with R = 2
        assert gap.holds and gap.applicable
        assert ratio.applicable  # rho * R = 0.2 < alpha = 0.3
        assert ratio.rhs == pytest.approx(0.2 / 0.3, abs=1e-12)
        assert ratio.holds

    def test_noiseless_gap_and_ratio_trivial(self, noiseless_model):
        kernel, law = noiseless_model
        qs = QuantitySet(kernel, law, 262144)
        ev = Evaluator(kernel, law, 262144)
        for j in range(3):
            gap, ratio = check_marginal_comparison(ev, qs, j)
            assert gap.lhs == pytest.approx(0.0, abs=1e-12)
            assert ratio.lhs == pytest.approx(0.0, abs=1e-12)


class TestObservedPrediction:
    def test_reference_depth_three(self, ref_ctx):
        _, _, qs, ev = ref_ctx
        gap, ratio = check_observed_prediction(ev, qs, 3)
        assert gap.rhs == pytest.approx(0.1, abs=1e-12)
        assert gap.holds and gap.slack > 0
        assert ratio.applicable
        # band half-width: rho / (alpha - rho R) = 0.1 / 0.1 = 1
        assert ratio.rhs == pytest.approx(1.0, abs=1e-12)

    def test_uniform_hidden_chain_gap_vanishes(self):
        kernel = build_channel_model(np.full((2, 2), 0.5), NOISY)
        law = stationary_law(kernel)
        qs = QuantitySet(kernel, law, 262144)
        ev = Evaluator(kernel, law, 262144)
        gap, _ = check_observed_prediction(ev, qs, 2)
        assert gap.lhs == pytest.approx(0.0, abs=1e-12)

    def test_monotone_in_channel_noise(self):
        """Artifact-level regression: the worst prediction gap grows with noise."""
        values = []
        for eps in (0.0, 0.05, 0.1):
            kernel = channel(eps)
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                law = stationary_law(kernel)
            qs = QuantitySet(kernel, law, 262144)
            ev = Evaluator(kernel, law, 262144)
            gap, _ = check_observed_prediction(ev, qs, 2)
            values.append(gap.lhs)
        assert values[0] <= values[1] + 1e-12 <= values[2] + 2e-12


class TestReferenceChain:
    def test_nonnullness_equality_witnessed(self, ref_ctx):
        _, _, qs, ev = ref_ctx
        rec = check_reference_nonnullness(ev, qs, 2)
        assert rec.lhs == pytest.approx(0.3, abs=1e-12)
        assert rec.rhs == pytest.approx(0.3, abs=1e-12)
        assert rec.holds

    def test_oscillation_tight_zero(self, ref_ctx):
        _, _, qs, ev = ref_ctx
        rec = check_reference_oscillation(ev, qs, 1, 2)
        assert rec.lhs == pytest.approx(0.0, abs=1e-12)
        assert rec.rhs == pytest.approx(0.0, abs=1e-12)
        assert rec.holds


class TestObservedRatios:
    def test_reference_all_hold(self, ref_ctx):
        _, _, qs, ev = ref_ctx
        recs = check_observed_ratios(ev, qs, 1, 3)
        assert all(r.applicable for r in recs)
        assert all(r.holds for r in recs)
        floor = by_name(recs, "y_floor")[0]
        assert floor.lhs == pytest.approx(0.1, abs=1e-12)  # alpha - rho R(1)
        assert floor.rhs >= 0.1 - 1e-12

    def test_high_noise_inapplicable(self):
        kernel = channel(0.45)
        law = stationary_law(kernel)
        qs = QuantitySet(kernel, law, 262144)
        ev = Evaluator(kernel, law, 262144)
        recs = check_observed_ratios(ev, qs, 0, 2)
        assert all(not r.applicable for r in recs)
        assert all(r.holds for r in recs)  # vacuous, no verdict

    def test_noiseless_sandwich(self, noiseless_model):
        kernel, law = noiseless_model
        qs = QuantitySet(kernel, law, 262144)
        ev = Evaluator(kernel, law, 262144)
        recs = check_observed_ratios(ev, qs, 1, 3)
        assert all(r.applicable and r.holds for r in recs)


class TestMixedPast:
    def test_nonnullness_floor(self, ref_ctx):
        _, _, qs, ev = ref_ctx
        rec = check_mixed_nonnullness(ev, qs, 1, 2)
        assert rec.rhs == pytest.approx(0.3, abs=1e-12)
        assert rec.holds

    def test_gap_records_on_reference(self, ref_ctx):
        """The channel's hidden chain sees nothing beyond its own last symbol."""
        _, _, qs, ev = ref_ctx
        stated, repaired, variant_b = check_mixed_past_gap(ev, qs, 1, 3)
        assert stated.name == "mixed_past_gap_a" and not stated.applicable
        assert stated.lhs == pytest.approx(0.0, abs=1e-12)
        assert stated.holds  # the defect does not bite channel models
        assert repaired.applicable and repaired.holds
        assert variant_b.applicable and variant_b.holds
        assert variant_b.lhs == pytest.approx(0.0, abs=1e-12)

    def test_stated_gap_defect_stays_visible(self):
        """On generic kernels the stated variant-a bound is violated and the
        record must say so while staying non-gating."""
        kernel = random_model(1)
        law = stationary_law(kernel)
        qs = QuantitySet(kernel, law, 262144)
        ev = Evaluator(kernel, law, 262144)
        stated, repaired, variant_b = check_mixed_past_gap(ev, qs, 0, 1)
        assert not stated.applicable
        assert not stated.holds  # measured counterexample to the stated bound
        assert stated.lhs > stated.rhs + 1e-6
        assert repaired.applicable and repaired.holds
        assert variant_b.holds


class TestBoundarySlot:
    def test_reveal_floor_reference_shallow(self, ref_ctx):
        _, _, qs, ev = ref_ctx
        stated, repaired = check_boundary_reveal_floor(ev, qs, 0, 2)
        assert stated.lhs == pytest.approx(0.27, abs=1e-12)  # (1-rho) alpha
        assert stated.holds  # j = 0 instances are fine
        assert repaired.holds

    def test_reveal_floor_defect_at_deeper_recent(self, ref_ctx):
        _, _, qs, ev = ref_ctx
        stated, repaired = check_boundary_reveal_floor(ev, qs, 1, 3)
        assert not stated.applicable
        assert not stated.holds  # 0.2447 < 0.27: stated floor fails here
        assert repaired.applicable and repaired.holds

    def test_mismatch_bounds_reference(self, ref_ctx):
        _, _, qs, ev = ref_ctx
        x_rec, y_stated, y_repaired = check_boundary_mismatch(ev, qs, 0, 2)
        assert x_rec.rhs == pytest.approx(0.1 / (0.3 * 0.81), abs=1e-12)
        assert x_rec.holds and x_rec.applicable
        assert y_stated.rhs == pytest.approx(0.1, abs=1e-12)
        assert y_stated.lhs == pytest.approx(0.1, abs=1e-12)  # channel: exactly rho
        assert y_stated.holds
        assert y_repaired.holds

    def test_noiseless_no_discrepancy(self, noiseless_model):
        kernel, law = noiseless_model
        qs = QuantitySet(kernel, law, 262144)
        ev = Evaluator(kernel, law, 262144)
        x_rec, y_stated, y_repaired = check_boundary_mismatch(ev, qs, 0, 2)
        assert x_rec.lhs == pytest.approx(0.0, abs=1e-12)
        assert y_stated.lhs == pytest.approx(0.0, abs=1e-12)
        assert y_repaired.lhs == pytest.approx(0.0, abs=1e-12)


class TestIndependentPaths:
    def test_recheck_equals_enumeration_path(self, ref_ctx):
        kernel, law, qs, ev = ref_ctx
        for k in range(4):
            enum_gap = check_observed_prediction(ev, qs, k)[0]
            filt_gap = check_prediction_gap_recheck(kernel, law, qs, k)
            assert filt_gap.lhs == pytest.approx(enum_gap.lhs, abs=1e-12)


class TestDiagnostics:
    def test_telescope_is_exact(self, ref_ctx):
        _, _, qs, ev = ref_ctx
        records = telescoping_diagnostics(ev, qs, 3)
        identity = [r for r in records if r["name"] == "telescoping_identity"][0]
        assert identity["holds"]

    def test_noiseless_terms_vanish(self, noiseless_model):
        kernel, law = noiseless_model
        qs = QuantitySet(kernel, law, 262144)
        ev = Evaluator(kernel, law, 262144)
        records = telescoping_diagnostics(ev, qs, 2)
        for r in records:
            if r["name"] == "marginal_gap_term":
                assert r["lhs"] == pytest.approx(0.0, abs=1e-12)


class TestSuite:
    def test_reference_suite_passes(self, ref_model):
        kernel, law = ref_model
        report = run_suite(kernel, law, 4)
        assert report.passed
        assert report.rho == pytest.approx(0.1, abs=1e-12)
        assert report.alpha == pytest.approx(0.3, abs=1e-12)

    def test_noiseless_suite_degeneracy(self, noiseless_model):
        kernel, law = noiseless_model
        report = run_suite(kernel, law, 3)
        assert report.passed
        for c in report.checks:
            if c.name in ("marginal_gap", "prediction_gap", "prediction_gap_alt"):
                assert c.lhs == pytest.approx(0.0, abs=1e-12)
            if c.name in ("marginal_ratio", "prediction_ratio") and c.applicable:
                assert c.lhs == pytest.approx(0.0, abs=1e-12)

    def test_assumption_refusal(self):
        # an emission row with mass 1 off-diagonal drives the mismatch rate to 1
        import warnings

        kernel = build_channel_model(
            X_TABLE, np.array([[0.0, 1.0], [1.0, 0.0]])
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            law = stationary_law(kernel)
        with pytest.raises(AssumptionError) as err:
            run_suite(kernel, law, 2)
        assert err.value.rho == pytest.approx(1.0, abs=1e-12)

    def test_deterministic_reports(self, ref_model):
        kernel, law = ref_model
        one = run_suite(kernel, law, 3).to_dict()
        two = run_suite(kernel, law, 3).to_dict()
        assert jsonio.dumps(one) == jsonio.dumps(two)

    def test_report_roundtrip_byte_identical(self, ref_model):
        import json

        kernel, law = ref_model
        text = jsonio.dumps(run_suite(kernel, law, 2).to_dict())
        assert jsonio.dumps(json.loads(text)) == text

    def test_small_corpus_gating_checks_hold(self, corpus):
        for _, kernel, law in corpus[:10]:
            report = run_suite(kernel, law, 3)
            assert report.passed

    def test_min_slack_nonnegative(self, ref_model):
        kernel, law = ref_model
        report = run_suite(kernel, law, 3).to_dict()
        assert all(v >= -1e-10 for v in report["min_slack"].values())
