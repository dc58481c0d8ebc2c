"""Tests for the teleportation protocol, its closed forms and circuit oracles."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from hybridtele.services.fock import entanglement_entropy, state_fidelity
from hybridtele.services.qubit import DUAL_RAIL_ONE, DUAL_RAIL_ZERO, Qubit, random_qubit
from hybridtele.services.teleport import (
    OutcomeRecord,
    alice_measure,
    alice_mix_exact,
    alpha_from_beta,
    am_success_probs,
    approximation_fidelity,
    beta_from_alpha,
    bob_correct,
    build_channel,
    direct_success_probs,
    expected_output,
    omega_apply,
    orthogonal_scenario,
    prepare_am_qubit,
    rho_b_closed_form,
    rho_b_report,
    teleport,
)

alphas = st.floats(min_value=0.01, max_value=0.8)
a1_values = st.floats(min_value=0.0, max_value=1.0)


def sum_by_n(results) -> dict[int, float]:
    totals: dict[int, float] = {}
    for r in results:
        totals[r.record.n] = totals.get(r.record.n, 0.0) + r.record.probability
    return totals


class TestParameters:
    def test_alpha_from_beta(self):
        assert alpha_from_beta(0.3, math.sqrt(0.99)) == pytest.approx(0.03, abs=1e-15)

    def test_beta_from_alpha(self):
        assert beta_from_alpha(0.03, math.sqrt(0.99)) == pytest.approx(0.3, abs=1e-12)

    def test_beta_unbounded_at_full_transmission(self):
        with pytest.raises(ValueError):
            beta_from_alpha(0.03, 1.0)


class TestChannel:
    def test_normalized(self, channel):
        assert channel.state.norm() == pytest.approx(1.0, abs=1e-12)
        assert channel.state.cutoffs == (24, 1, 1)

    def test_overlap(self, channel):
        assert channel.overlap == pytest.approx(math.exp(-0.18))

    def test_bob_density(self, channel):
        rho = channel.bob_density()
        assert rho.element(DUAL_RAIL_ZERO, DUAL_RAIL_ZERO).real == pytest.approx(0.5)
        assert rho.element(DUAL_RAIL_ZERO, DUAL_RAIL_ONE).real == pytest.approx(
            0.5 * math.exp(-0.18)
        )

    def test_non_positive_beta(self):
        with pytest.raises(ValueError):
            build_channel(0.0)

    def test_large_beta_is_maximally_entangled(self):
        rho = build_channel(3.0, cutoff=40).bob_density()
        assert entanglement_entropy(rho) == pytest.approx(1.0, abs=1e-3)

    def test_small_beta_is_partially_entangled(self, channel):
        assert 0 < entanglement_entropy(channel.bob_density()) < 1


class TestApproximationFidelity:
    """Closed-form fidelity of exact mixing with the ideal displacement."""

    @settings(max_examples=25, deadline=None)
    @given(alphas, a1_values)
    def test_unity_at_full_transmission(self, alpha, a1_abs):
        qubit = Qubit(math.sqrt(1 - a1_abs**2), a1_abs)
        assert approximation_fidelity(alpha, 1.0, qubit) == pytest.approx(1.0, abs=1e-12)

    def test_below_unity_for_lossy_splitter(self, plus_qubit):
        assert approximation_fidelity(0.3, 0.9, plus_qubit) < 1.0

    def test_rejects_bad_transmittance(self, plus_qubit):
        with pytest.raises(ValueError):
            approximation_fidelity(0.3, 0.0, plus_qubit)

    def test_matches_exact_circuit(self, rng):
        qubit = random_qubit(rng)
        t = math.sqrt(0.99)
        exact = alice_mix_exact(build_channel(0.3), qubit, t)
        ideal = omega_apply(qubit, 0.03, 0.3)
        circuit = state_fidelity(exact, ideal)
        assert circuit == pytest.approx(approximation_fidelity(0.03, t, qubit), abs=1e-3)


class TestAliceMeasure:
    @pytest.mark.parametrize("model", ["ideal", "fock-basis", "apd-pair"])
    def test_outcomes_complete(self, model, complex_qubit):
        state = omega_apply(complex_qubit, 0.2, 0.3)
        records = alice_measure(state, model=model, n_max=24)
        assert sum(r.probability for r in records) == pytest.approx(1.0, abs=1e-9)

    def test_apd_pair_has_four_outcomes(self, plus_qubit):
        records = alice_measure(omega_apply(plus_qubit, 0.2, 0.3), model="apd-pair")
        assert [(r.j, r.n) for r in records] == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_fock_basis_records_coherent_count(self, plus_qubit):
        records = alice_measure(omega_apply(plus_qubit, 0.2, 0.3), model="fock-basis", n_max=3)
        assert all(r.coherent_count is not None and r.j == r.coherent_count % 2 for r in records)

    def test_apd_pair_coarsens_fock_basis(self, complex_qubit):
        """On/off detection groups the photon-counting outcomes by click pattern."""
        state = omega_apply(complex_qubit, 0.03, 0.3)
        apd = {(r.j, r.n): r.probability for r in alice_measure(state, model="apd-pair")}
        grouped = {key: 0.0 for key in apd}
        for r in alice_measure(state, model="fock-basis", n_max=24):
            grouped[(int(r.coherent_count > 0), int(r.n > 0))] += r.probability
        for key, probability in apd.items():
            assert grouped[key] == pytest.approx(probability, abs=5e-3)

    def test_cat_projection_matches_parity(self, complex_qubit):
        """Projecting on cat states of amplitude beta gives parity statistics."""
        state = omega_apply(complex_qubit, 0.2, 0.3)
        parity = alice_measure(state, n_max=3)
        cat = alice_measure(state, beta=0.3, n_max=3)
        for p, c in zip(parity, cat, strict=True):
            assert c.probability == pytest.approx(p.probability, abs=1e-9)

    def test_unknown_model(self, plus_qubit):
        state = omega_apply(plus_qubit, 0.2, 0.3)
        with pytest.raises(ValueError, match="Unknown measurement model"):
            alice_measure(state, model="homodyne")  # type: ignore[arg-type]

    def test_message_bits(self):
        record = OutcomeRecord(j=1, n=3, probability=0.1, bob_state=None)
        assert record.message_bits == (1, 1)
        assert bob_correct(record) is None


class TestIdealTeleport:
    """Ideal mixing reproduces the closed-form distribution and modulated output."""

    @pytest.mark.parametrize("alpha", [0.03, 0.2, 0.5])
    def test_distribution_matches_closed_form(self, alpha, complex_qubit):
        results = teleport(complex_qubit, 0.3, alpha=alpha, n_max=6)
        closed = direct_success_probs(alpha, abs(complex_qubit.a1)).values
        for n, p in sum_by_n(results).items():
            assert p == pytest.approx(closed[n], abs=1e-9)

    @pytest.mark.parametrize("alpha", [0.03, 0.2, 0.5])
    def test_corrected_output_is_modulated_qubit(self, alpha, complex_qubit):
        for result in teleport(complex_qubit, 0.3, alpha=alpha, n_max=6):
            if result.record.probability > 1e-8:
                assert result.fidelity == pytest.approx(1.0, abs=1e-9)

    def test_needs_alpha_or_t(self, plus_qubit):
        with pytest.raises(ValueError, match="Either alpha or t"):
            teleport(plus_qubit, 0.3)

    def test_expected_output_at_n0(self, plus_qubit):
        out = expected_output(plus_qubit, 0.2, 0)
        assert out.basis == "dual-rail"
        assert out.fidelity(Qubit(1, -0.2)) == pytest.approx(1.0)


class TestExactTeleport:
    def test_close_to_closed_form(self, rng):
        qubit = random_qubit(rng)
        results = teleport(qubit, 0.3, t=math.sqrt(0.99), n_max=4)
        closed = direct_success_probs(0.03, abs(qubit.a1)).values
        for n, p in sum_by_n(results).items():
            assert p == pytest.approx(closed[n], abs=1e-2)

    def test_photon_reflected_into_coherent_mode(self):
        """For |1> the reflected photon moves r^2 (1 + beta^2 t^2) - alpha^2 of P_1 to P_0."""
        t = math.sqrt(0.99)
        results = teleport(Qubit(0, 1), 0.3, t=t, n_max=2)
        closed = direct_success_probs(0.03, 1.0).values
        shift = (0.01 * (1 + 0.09 * t**2) - 0.0009) * math.exp(-0.0009)
        probabilities = sum_by_n(results)
        assert probabilities[0] - closed[0] == pytest.approx(shift, abs=1e-4)
        assert abs(probabilities[0] - closed[0]) <= 1e-2
        assert abs(probabilities[1] - closed[1]) <= 1e-2


class TestDistributions:
    @settings(max_examples=40)
    @given(alphas, a1_values)
    def test_direct_sums_to_one(self, alpha, a1_abs):
        assert abs(direct_success_probs(alpha, a1_abs).tail) <= 1e-9

    @settings(max_examples=40)
    @given(st.sampled_from([0, 1]), st.floats(min_value=0.05, max_value=0.8), a1_values)
    def test_modulated_sums_to_one(self, k, alpha, a1_abs):
        assert abs(am_success_probs(k, alpha, a1_abs).tail) <= 1e-9

    def test_dominant_outcomes_at_small_alpha(self):
        """P0 + P1 dips lowest at |a1| = 1 and stays near 0.9982."""
        grid = [round(0.05 * k, 2) for k in range(21)]
        totals = [sum(direct_success_probs(0.03, a1, n_max=1).values.values()) for a1 in grid]
        assert min(totals) == pytest.approx(0.9982, abs=1e-4)
        assert totals.index(min(totals)) == len(grid) - 1

    def test_p00_crossover(self):
        """mod-0 success falls below one half at |a1| = 0.196 for alpha = 0.2."""
        below = am_success_probs(0, 0.2, 0.19, n_max=0).values[0]
        above = am_success_probs(0, 0.2, 0.20, n_max=0).values[0]
        assert below > 0.5 > above

    def test_rejects_a1_above_one(self):
        with pytest.raises(ValueError):
            direct_success_probs(0.2, 1.1)

    def test_rejects_bad_mod_index(self):
        with pytest.raises(ValueError):
            am_success_probs(2, 0.2, 0.5)


class TestPreModulation:
    @pytest.mark.parametrize("k", [0, 1])
    def test_recovers_original(self, k, complex_qubit):
        am = prepare_am_qubit(complex_qubit, k, 0.2)
        recovered = [
            r.corrected
            for r in teleport(am, 0.3, alpha=0.2, n_max=k)
            if r.record.n == k and r.corrected is not None
        ]
        assert recovered
        for qubit in recovered:
            assert qubit.fidelity(complex_qubit) == pytest.approx(1.0, abs=1e-9)

    def test_vanishing_factor(self, plus_qubit):
        with pytest.raises(ValueError, match="vanishes"):
            prepare_am_qubit(plus_qubit, 1, 1.0)

    def test_bad_index(self, plus_qubit):
        with pytest.raises(ValueError):
            prepare_am_qubit(plus_qubit, 2, 0.2)


class TestRhoB:
    """Bob's state before the classical message."""

    def test_diagonal_is_half(self, complex_qubit):
        report = rho_b_report(0.1, 0.3, complex_qubit)
        assert report.diagonal == pytest.approx((0.5, 0.5), abs=1e-10)
        assert report.trace == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize(("alpha", "beta"), [(0.05, 0.3), (0.2, 0.8), (0.1, 0.3)])
    def test_offdiag_matches_corrected_form(self, alpha, beta, complex_qubit):
        report = rho_b_report(alpha, beta, complex_qubit)
        assert report.offdiag == pytest.approx(report.corrected_offdiag, abs=1e-9)

    def test_closed_form_matrix(self, complex_qubit):
        report = rho_b_report(0.1, 0.3, complex_qubit)
        closed = rho_b_closed_form(0.1, 0.3, complex_qubit)
        assert closed.element(DUAL_RAIL_ZERO, DUAL_RAIL_ONE) == pytest.approx(report.offdiag)
        assert closed.is_hermitian()
        assert closed.trace == pytest.approx(1.0)

    def test_published_form_flagged_for_superposition(self, plus_qubit):
        assert rho_b_report(0.3, 0.3, plus_qubit).flagged

    def test_published_form_agrees_for_basis_state(self):
        assert not rho_b_report(0.3, 0.3, Qubit(1, 0)).flagged

    def test_offdiag_shrinks_with_beta(self, plus_qubit):
        magnitudes = [
            rho_b_report(a, b, plus_qubit).offdiag_magnitude
            for a, b in ((0.05, 0.3), (0.2, 0.8), (0.5, 1.5))
        ]
        assert magnitudes == sorted(magnitudes, reverse=True)

    def test_circuit_value_only_when_beta_exceeds_alpha(self, plus_qubit):
        assert rho_b_report(0.3, 0.3, plus_qubit).circuit_offdiag is None
        assert rho_b_report(0.1, 0.3, plus_qubit).circuit_offdiag is not None


class TestOrthogonalScenario:
    @pytest.mark.parametrize("mods", [(0, 0), (0, 1)], ids=["mod0-mod0", "mod0-mod1"])
    def test_recovers_orthogonal_pair(self, mods, complex_qubit):
        pair = (complex_qubit, complex_qubit.orthogonal())
        report = orthogonal_scenario(0.2, pair, mods)
        assert report.overlap == pytest.approx(0.0, abs=1e-9)
        assert_allclose(report.fidelities, (1.0, 1.0), atol=1e-9)
        assert_allclose(report.probabilities, report.closed_form, atol=1e-9)

    def test_basis_pair(self):
        report = orthogonal_scenario(0.2, (Qubit(1, 0), Qubit(0, 1j)), (0, 1))
        assert report.overlap < 1e-9
        assert_allclose(report.fidelities, (1.0, 1.0), atol=1e-9)

    def test_pair_is_normalized_first(self):
        pair = (Qubit(2, 2), Qubit(3, -3))
        report = orthogonal_scenario(0.2, pair)
        assert report.fidelities[0] == pytest.approx(1.0, abs=1e-9)

    def test_rejects_overlapping_pair(self, plus_qubit, complex_qubit):
        with pytest.raises(ValueError, match="not orthogonal"):
            orthogonal_scenario(0.2, (plus_qubit, complex_qubit))
