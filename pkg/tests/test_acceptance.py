"""Tests for the acceptance sweep."""

import pytest

from hybridtele.services.acceptance import (
    CHECKS,
    CheckResult,
    all_passed,
    check_am_recovery,
    check_crossovers,
    check_demodulation,
    check_dominance,
    check_fidelity_identity,
    check_normalization,
    check_parameter_chain,
    check_physical_oracle,
    check_scs_distribution,
)


class TestCheckResult:
    def test_line_format(self):
        result = CheckResult(3, "min P0+P1 at alpha=0.03", "PASS", "0.998202")
        assert result.line == "PASS [ 3] min P0+P1 at alpha=0.03: 0.998202"

    def test_note_is_not_failure(self):
        results = [CheckResult(1, "a", "PASS", ""), CheckResult(2, "b", "NOTE", "")]
        assert all_passed(results)

    def test_fail_fails_run(self):
        results = [CheckResult(1, "a", "PASS", ""), CheckResult(2, "b", "FAIL", "")]
        assert not all_passed(results)

    def test_twelve_checks(self):
        assert len(CHECKS) == 12


class TestChecks:
    """Individual checks that run quickly."""

    @pytest.mark.parametrize(
        ("check", "number"),
        [
            (check_fidelity_identity, 1),
            (check_parameter_chain, 2),
            (check_dominance, 3),
            (check_normalization, 5),
            (check_physical_oracle, 7),
            (check_am_recovery, 8),
            (check_demodulation, 9),
        ],
        ids=[
            "fidelity",
            "parameters",
            "dominance",
            "normalization",
            "physical-oracle",
            "am-recovery",
            "demodulation",
        ],
    )
    def test_passes(self, check, number, rng):
        result = check(rng, 24)
        assert result.number == number
        assert result.status == "PASS", result.detail

    def test_dominance_value(self, rng):
        assert check_dominance(rng, 24).detail == "0.998202"

    def test_scs_odd_p5_is_noted(self, rng):
        result = check_scs_distribution(rng, 24)
        assert result.status == "NOTE"
        assert "P5^odd=5.46e-07" in result.detail

    def test_crossover_is_noted(self, rng):
        result = check_crossovers(rng, 24)
        assert result.status == "NOTE"
        assert "|a1| = 0.196" in result.detail
        assert "P11 > 0.5 from |a1| = 0.98" in result.detail
