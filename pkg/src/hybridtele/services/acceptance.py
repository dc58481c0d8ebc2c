"""Acceptance sweep: closed forms against circuit oracles and published values.

Each check returns one CheckResult. NOTE marks a check whose computed
values hold but disagree with a published number; it never fails the run.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import bisect

from hybridtele.constants import DEFAULT_CUTOFF, SURFACE_A0, SURFACE_A1
from hybridtele.log import get_logger
from hybridtele.services.channel_gen import (
    GenerationConfig,
    generate_channel,
    ideal_heralded_channels,
)
from hybridtele.services.demodulation import (
    coherent_success_prob,
    demod_coherent,
    demod_swap,
    modulation_ratio,
    swap_success_prob,
)
from hybridtele.services.displaced import scs_distribution
from hybridtele.services.fock import state_fidelity
from hybridtele.services.qubit import Qubit, random_qubit
from hybridtele.services.teleport import (
    TeleportResult,
    alice_mix_exact,
    am_success_probs,
    approximation_fidelity,
    beta_from_alpha,
    build_channel,
    direct_success_probs,
    omega_apply,
    prepare_am_qubit,
    rho_b_report,
    teleport,
)

logger = get_logger(__name__)

Status = Literal["PASS", "FAIL", "NOTE"]

REFERENCE_T = math.sqrt(0.99)
REFERENCE_ALPHA = 0.03
REFERENCE_BETA = 0.3


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one acceptance criterion."""

    number: int
    name: str
    status: Status
    detail: str

    @property
    def line(self) -> str:
        return f"{self.status} [{self.number:2d}] {self.name}: {self.detail}"


def _status(ok: bool, note: bool = False) -> Status:
    if not ok:
        return "FAIL"
    return "NOTE" if note else "PASS"


def _sum_by_n(results: list[TeleportResult]) -> dict[int, float]:
    totals: dict[int, float] = {}
    for r in results:
        totals[r.record.n] = totals.get(r.record.n, 0.0) + r.record.probability
    return totals


def check_fidelity_identity(rng: np.random.Generator, cutoff: int) -> CheckResult:
    qubits = [random_qubit(rng) for _ in range(10)]
    alphas = [round(0.05 * k, 2) for k in range(1, 13)]
    worst = max(abs(approximation_fidelity(a, 1.0, q) - 1) for a in alphas for q in qubits)
    return CheckResult(1, "fidelity at t=1", _status(worst <= 1e-12), f"max |F-1| = {worst:.2e}")


def check_parameter_chain(rng: np.random.Generator, cutoff: int) -> CheckResult:
    beta = beta_from_alpha(REFERENCE_ALPHA, REFERENCE_T)
    error = abs(beta - REFERENCE_BETA)
    return CheckResult(
        2, "t^2=0.99, alpha=0.03 gives beta", _status(error <= 1e-12), f"beta = {beta:.15f}"
    )


def check_dominance(rng: np.random.Generator, cutoff: int) -> CheckResult:
    grid = [round(0.05 * k, 2) for k in range(21)]
    minimum = min(
        sum(direct_success_probs(REFERENCE_ALPHA, a1, n_max=1).values.values()) for a1 in grid
    )
    return CheckResult(
        3, "min P0+P1 at alpha=0.03", _status(abs(minimum - 0.9982) <= 2e-4), f"{minimum:.6f}"
    )


def check_scs_distribution(rng: np.random.Generator, cutoff: int) -> CheckResult:
    published = {
        ("even", 0): 0.996,
        ("even", 2): 0.004,
        ("even", 4): 2.72e-6,
        ("odd", 1): 0.9986,
        ("odd", 3): 0.0013,
        ("odd", 5): 4.9e-8,
    }
    off = []
    for (parity, n), value in published.items():
        computed = scs_distribution(parity, n, REFERENCE_BETA)
        if abs(computed - value) > 0.05 * value:
            off.append(f"P{n}^{parity}={computed:.3g} (published {value:g})")
    # The published odd P5 drops the normalization; only that entry may differ.
    ok = all("P5^odd" in entry for entry in off)
    detail = "; ".join(off) if off else "all six within 5%"
    return CheckResult(4, "SCS distribution at beta=0.3", _status(ok, note=bool(off)), detail)


def check_normalization(rng: np.random.Generator, cutoff: int) -> CheckResult:
    worst = 0.0
    for alpha in (0.06, 0.1, 0.2, 0.3):
        for a1 in (0.0, 0.3, 0.7, 1.0):
            for report in (
                direct_success_probs(alpha, a1),
                am_success_probs(0, alpha, a1),
                am_success_probs(1, alpha, a1),
            ):
                worst = max(worst, abs(report.tail))
    return CheckResult(
        5, "distributions sum to 1", _status(worst <= 1e-9), f"max |1-sum| = {worst:.2e}"
    )


def check_ideal_oracle(rng: np.random.Generator, cutoff: int) -> CheckResult:
    worst_p, worst_f = 0.0, 0.0
    for alpha in (0.03, 0.2):
        qubit = random_qubit(rng)
        results = teleport(qubit, REFERENCE_BETA, alpha=alpha, n_max=6, cutoff=cutoff)
        closed = direct_success_probs(alpha, abs(qubit.a1)).values
        for n, p in _sum_by_n(results).items():
            worst_p = max(worst_p, abs(p - closed[n]))
        for r in results:
            if r.record.probability > 1e-8:
                worst_f = max(worst_f, 1 - r.fidelity)
    ok = worst_p <= 1e-9 and worst_f <= 1e-10
    return CheckResult(
        6,
        "ideal mixing matches closed forms",
        _status(ok),
        f"dP = {worst_p:.2e}, 1-F = {worst_f:.2e}",
    )


def check_physical_oracle(rng: np.random.Generator, cutoff: int) -> CheckResult:
    qubit = random_qubit(rng)
    results = teleport(qubit, REFERENCE_BETA, t=REFERENCE_T, n_max=4, cutoff=cutoff)
    closed = direct_success_probs(REFERENCE_ALPHA, abs(qubit.a1)).values
    worst_p = max(abs(p - closed[n]) for n, p in _sum_by_n(results).items())

    exact = alice_mix_exact(build_channel(REFERENCE_BETA, cutoff), qubit, REFERENCE_T)
    ideal = omega_apply(qubit, REFERENCE_ALPHA, REFERENCE_BETA, cutoff)
    circuit = state_fidelity(exact, ideal)
    closed_fid = approximation_fidelity(REFERENCE_ALPHA, REFERENCE_T, qubit)
    ok = worst_p <= 1e-2 and abs(circuit - closed_fid) <= 1e-3
    detail = f"dP = {worst_p:.2e}, F circuit {circuit:.6f} vs closed {closed_fid:.6f}"
    return CheckResult(7, "exact beam splitter at t^2=0.99", _status(ok), detail)


def check_am_recovery(rng: np.random.Generator, cutoff: int) -> CheckResult:
    qubit = random_qubit(rng)
    worst = 0.0
    for k in (0, 1):
        am = prepare_am_qubit(qubit, k, 0.2)
        for r in teleport(am, REFERENCE_BETA, alpha=0.2, n_max=k, cutoff=cutoff):
            if r.record.n == k and r.corrected is not None:
                worst = max(worst, 1 - r.corrected.fidelity(qubit))
    return CheckResult(
        8, "pre-modulation recovers original", _status(worst <= 1e-10), f"1-F = {worst:.2e}"
    )


def check_demodulation(rng: np.random.Generator, cutoff: int) -> CheckResult:
    original = random_qubit(rng)
    worst = 0.0
    for which in (0, 1):
        for alpha, method in ((0.3, "coherent"), (0.4, "swap")):
            ratio = modulation_ratio(which, alpha)
            am = Qubit(original.a0, ratio * original.a1).normalized()
            if method == "coherent":
                heralds = demod_coherent(am, which, alpha, original=original, cutoff=cutoff)
            else:
                heralds = demod_swap(am, which, alpha, original=original)
            for h in heralds:
                if h.success:
                    if h.resulting_qubit is None:
                        worst = 1.0
                    else:
                        worst = max(worst, 1 - h.resulting_qubit.fidelity(original))

    comparisons = [
        solver(which, alpha, 0.5)
        for which in (0, 1)
        for solver, alpha in ((coherent_success_prob, 0.3), (swap_success_prob, 0.4))
    ]
    flagged = [c for c in comparisons if c.flagged]
    detail = f"1-F = {worst:.2e}, max |closed-oracle| = {max(c.abs_diff for c in comparisons):.2e}"
    if flagged:
        detail += f", {len(flagged)} comparison(s) beyond 1e-2"
    status = _status(worst <= 1e-6, note=bool(flagged))
    return CheckResult(9, "demodulation recovers original", status, detail)


def check_crossovers(rng: np.random.Generator, cutoff: int) -> CheckResult:
    alpha = 0.2

    def p00(a1: float) -> float:
        return am_success_probs(0, alpha, a1, n_max=0).values[0]

    def p11(a1: float) -> float:
        return am_success_probs(1, alpha, a1, n_max=1).values[1]

    crossover = bisect(lambda a1: p00(a1) - 0.5, 0.0, 1.0, xtol=1e-12)
    fine = np.linspace(0.0, 1.0, 1001)
    monotone = all((p00(a) > 0.5) == (a < crossover) for a in fine if abs(a - crossover) > 1e-9)
    above = [a for a in fine if p11(a) > 0.5]
    p11_ok = all(a > 0.9 for a in above)
    in_window = 0.3 < crossover < 0.5
    detail = f"P00 crossover at |a1| = {crossover:.4f}"
    if above:
        detail += f", P11 > 0.5 from |a1| = {min(above):.3f}"
    if not in_window:
        detail += " (published figure places it near 0.4)"
    return CheckResult(
        10, "crossovers at alpha=0.2", _status(monotone and p11_ok, note=not in_window), detail
    )


def check_rho_b(rng: np.random.Generator, cutoff: int) -> CheckResult:
    qubit = Qubit(SURFACE_A0, SURFACE_A1)
    report = rho_b_report(0.1, REFERENCE_BETA, qubit, cutoff)
    diag_ok = all(abs(d - 0.5) <= 1e-3 for d in report.diagonal)
    magnitudes = [
        rho_b_report(a, b, qubit, cutoff).offdiag_magnitude
        for a, b in ((0.05, 0.3), (0.2, 0.8), (0.5, 1.5))
    ]
    decreasing = all(x > y for x, y in zip(magnitudes, magnitudes[1:], strict=False))
    detail = "off-diagonal " + " > ".join(f"{m:.3e}" for m in magnitudes)
    if report.flagged:
        detail += f"; published closed form off by {report.discrepancy:.3e}"
    return CheckResult(
        11, "rho_B structure", _status(diag_ok and decreasing, note=report.flagged), detail
    )


def check_channel_generation(rng: np.random.Generator, cutoff: int) -> CheckResult:
    ideal = ideal_heralded_channels(REFERENCE_BETA, REFERENCE_ALPHA, cutoff)
    balanced = [h for h in ideal if h.balanced]
    fidelity_ok = bool(balanced) and all(
        h.fidelity is not None and h.fidelity >= 0.99 for h in balanced
    )
    cfg = GenerationConfig.from_alpha(REFERENCE_ALPHA, REFERENCE_T, cutoff, herald_max=1)
    exact = generate_channel(cfg)
    lowest = sum(h.probability for h in exact)
    detail = (
        "balanced heralds (0,0),(1,1) fidelity "
        + ", ".join(f"{h.fidelity:.6f}" for h in balanced if h.fidelity is not None)
        + f"; four lowest heralds carry {lowest:.6f}"
        + "; published heralds |01>,|10> leave a product-like state"
    )
    return CheckResult(
        12, "channel generation", _status(fidelity_ok and lowest >= 0.99, note=True), detail
    )


CHECKS: tuple[Callable[[np.random.Generator, int], CheckResult], ...] = (
    check_fidelity_identity,
    check_parameter_chain,
    check_dominance,
    check_scs_distribution,
    check_normalization,
    check_ideal_oracle,
    check_physical_oracle,
    check_am_recovery,
    check_demodulation,
    check_crossovers,
    check_rho_b,
    check_channel_generation,
)


def run_acceptance(seed: int = 0, cutoff: int = DEFAULT_CUTOFF) -> list[CheckResult]:
    """Run every acceptance check in order."""
    rng = np.random.default_rng(seed)
    results = []
    for check in CHECKS:
        result = check(rng, cutoff)
        logger.info(result.line)
        results.append(result)
    return results


def all_passed(results: list[CheckResult]) -> bool:
    return all(r.status != "FAIL" for r in results)
