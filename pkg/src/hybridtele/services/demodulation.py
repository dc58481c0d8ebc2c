"""Removal of the amplitude modulation left on Bob's qubit.

Two heralded strategies are simulated: mixing with a coherent field (a
displacement of one rail followed by photon counting) and entanglement
swapping with a known auxiliary dual-rail qubit on a balanced beam splitter.
Each comes with its closed-form success probability and a circuit oracle.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.optimize import bisect

from hybridtele.constants import (
    DEFAULT_BETA,
    DEFAULT_CUTOFF,
    DEMOD_TRANSMITTANCE,
    GAMMA_GRID_POINTS,
    GAMMA_RESIDUAL,
    MAX_DEMOD_ALPHA,
    ORACLE_TOLERANCE,
    ORIGINAL_FIDELITY,
    SUM_TOLERANCE,
    VALID_METHODS,
)
from hybridtele.errors import GammaSolveError, ProbabilityError
from hybridtele.log import get_logger
from hybridtele.services.displaced import coeff, modulation_factor
from hybridtele.services.fock import (
    FockState,
    fock_branches,
    number_projector,
    project,
    reduced_density,
    tensor,
)
from hybridtele.services.optics import BeamSplitterSpec, apply_beam_splitter, htbs_mix
from hybridtele.services.qubit import DUAL_RAIL_ONE, DUAL_RAIL_ZERO, Qubit, dual_rail_state
from hybridtele.services.teleport import prepare_am_qubit, teleport

logger = get_logger(__name__)

Method = Literal["coherent", "swap"]


def _check_which(which: int) -> None:
    if which not in (0, 1):
        raise ValueError(f"which must be 0 or 1, got {which}")


def modulation_ratio(which: int, alpha: float) -> complex:
    """Residual modulation of the AM outputs: A_1/A_0 (which=0) or A_0/A_1 (which=1)."""
    _check_which(which)
    a0, a1 = modulation_factor(0, alpha), modulation_factor(1, alpha)
    return a1 / a0 if which == 0 else a0 / a1


@dataclass(frozen=True)
class GammaSolution:
    """Displacement amplitude that cancels the modulation on the success herald."""

    which: int
    alpha: float
    gamma: float
    residual: float


def _gamma_condition(which: int, alpha: float, gamma: float) -> complex:
    ratio = modulation_ratio(which, alpha)
    if which == 0:
        numerator, denominator = coeff(0, 1, gamma), coeff(1, 1, gamma)
    else:
        numerator, denominator = coeff(0, 0, gamma), coeff(1, 0, gamma)
    if denominator == 0:
        # Pole of the condition: gamma = 0 for which=1, |gamma| = 1 for which=0.
        return complex(math.inf)
    return ratio * numerator / denominator


def _gamma_grid() -> np.ndarray:
    linear = np.linspace(-1.0, 1.0, GAMMA_GRID_POINTS)[1:-1]
    small = np.logspace(-12, -3, 200)
    return np.unique(np.concatenate([linear, small, -small]))


@lru_cache(maxsize=512)
def solve_gamma(which: int, alpha: float) -> GammaSolution:
    """Find the real displacement gamma satisfying the demodulation condition.

    Sign changes of the condition on a grid over (-1, 1) are refined by
    bisection; brackets straddling a pole are discarded by their residual.
    The root of smallest magnitude is returned.

    Raises:
        GammaSolveError: If no root lies in the bracket.
    """
    _check_which(which)
    if not 0 < alpha <= MAX_DEMOD_ALPHA:
        raise ValueError(f"alpha must lie in (0, {MAX_DEMOD_ALPHA}], got {alpha}")

    def condition(gamma: float) -> float:
        return _gamma_condition(which, alpha, gamma).real - 1.0

    grid = _gamma_grid()
    values = np.array([condition(g) for g in grid])
    roots = []
    for left, right, f_left, f_right in zip(grid, grid[1:], values, values[1:], strict=False):
        if f_left == 0:
            roots.append(float(left))
            continue
        if f_left * f_right > 0:
            continue
        gamma = bisect(condition, left, right, xtol=1e-16, maxiter=200)
        residual = abs(_gamma_condition(which, alpha, gamma) - 1)
        logger.debug(
            "Bracket [%.3e, %.3e] -> gamma %.6e residual %.2e", left, right, gamma, residual
        )
        if residual < GAMMA_RESIDUAL:
            roots.append(gamma)

    if not roots:
        raise GammaSolveError(
            f"No demodulation root with |gamma| <= 1 for which={which}, alpha={alpha}"
        )
    gamma = min(roots, key=abs)
    residual = abs(_gamma_condition(which, alpha, gamma) - 1)
    return GammaSolution(which=which, alpha=alpha, gamma=gamma, residual=residual)


@dataclass(frozen=True)
class DemodOutcome:
    """One herald of a demodulation circuit.

    Attributes:
        herald: Photon counts in the measured modes.
        probability: Herald probability.
        resulting_qubit: Conditional qubit after correction, None outside the qubit subspace.
        is_original: Resulting qubit matches the unmodulated original.
        correction: Gate Bob applies after the herald, None if none is needed.
        success: Herald is one the protocol keeps.
    """

    herald: tuple[int, ...]
    probability: float
    resulting_qubit: Qubit | None
    is_original: bool
    correction: str | None = None
    success: bool = False

    @property
    def label(self) -> str:
        if len(self.herald) == 1:
            return {0: "vacuum", 1: "single-photon"}.get(self.herald[0], f"{self.herald[0]}-photon")
        return "|" + "".join(str(n) for n in self.herald) + ">"


def _original_from_am(am_qubit: Qubit, ratio: complex) -> Qubit:
    return Qubit(am_qubit.a0, am_qubit.a1 / ratio).normalized()


def _is_original(qubit: Qubit | None, original: Qubit) -> bool:
    return qubit is not None and qubit.fidelity(original) >= ORIGINAL_FIDELITY


def success_heralds(method: Method, which: int) -> frozenset[tuple[int, ...]]:
    """Heralds on which Bob keeps the demodulated qubit."""
    _check_which(which)
    if method == "coherent":
        return frozenset({(1,)} if which == 0 else {(0,)})
    if method == "swap":
        return frozenset({(1, 0), (0, 1)})
    raise ValueError(f"Unknown demodulation method: {method}")


def _dominant_qubit(matrix: np.ndarray) -> Qubit:
    """Leading eigenvector of a 2x2 density matrix, phased so the largest amplitude is real."""
    _, vectors = np.linalg.eigh(matrix)
    vector = vectors[:, -1]
    pivot = vector[np.argmax(np.abs(vector))]
    return Qubit.from_vector(vector * abs(pivot) / pivot).normalized()


def demod_coherent(
    am_qubit: Qubit,
    which: int,
    alpha: float,
    *,
    original: Qubit | None = None,
    cutoff: int = DEFAULT_CUTOFF,
    t: float = DEMOD_TRANSMITTANCE,
) -> list[DemodOutcome]:
    """Mix the a0 rail with a coherent ancilla on an HTBS and count its photons.

    The ancilla amplitude is set so that the rail is displaced by the solved
    gamma. which=0 demodulates N(a0, A_1/A_0 a1) and succeeds on a single
    photon; which=1 demodulates N(a0, A_0/A_1 a1) and succeeds on vacuum.
    The surviving rail carries the result as a single-rail qubit, traced
    over the ancilla; t = 1 gives the ideal displacement.
    """
    solution = solve_gamma(which, alpha)
    if original is None:
        original = _original_from_am(am_qubit, modulation_ratio(which, alpha))
    state = dual_rail_state(am_qubit.normalized(), cutoffs=(1, cutoff))
    mixed = htbs_mix(state, solution.gamma, t, mode=1)
    target = FockState((1,), {(0,): original.a0, (1,): original.a1}).normalized()

    outcomes = []
    for (m,), branch in fock_branches(mixed, (1,)).items():
        probability = branch.norm() ** 2
        resulting = None
        is_original = False
        if probability > 0:
            rho = reduced_density(branch, (0,)).normalized()
            resulting = _dominant_qubit(rho.matrix)
            is_original = rho.expectation(target) >= ORIGINAL_FIDELITY
        outcomes.append(
            DemodOutcome(
                herald=(m,),
                probability=probability,
                resulting_qubit=resulting,
                is_original=is_original,
                success=(m,) in success_heralds("coherent", which),
            )
        )
    _check_complete(outcomes, "coherent")
    return outcomes


def demod_swap(
    am_qubit: Qubit,
    which: int,
    alpha: float,
    *,
    original: Qubit | None = None,
) -> list[DemodOutcome]:
    """Swap the modulated qubit onto a known auxiliary qubit.

    The AM qubit occupies modes (0, 1), the auxiliary N(X|01> + |10>) modes
    (2, 3); modes 1 and 2 meet on a balanced beam splitter and are counted.
    Heralds |10> and |01> leave the original qubit on modes (0, 3), the
    latter after a Z correction.
    """
    ratio = modulation_ratio(which, alpha)
    if original is None:
        original = _original_from_am(am_qubit, ratio)
    auxiliary = Qubit(ratio, 1.0, "dual-rail").normalized()
    am = dual_rail_state(am_qubit.normalized(), cutoffs=(1, 2))
    aux = dual_rail_state(auxiliary, cutoffs=(2, 1))
    mixed = apply_beam_splitter(tensor(am, aux), BeamSplitterSpec.balanced((1, 2)))

    outcomes = []
    for herald, branch in fock_branches(mixed, (1, 2)).items():
        probability = branch.norm() ** 2
        resulting = None
        correction = None
        single = {occ: a for occ, a in branch.amplitudes.items() if sum(occ) == 1}
        if probability > 0 and len(single) == len(branch.amplitudes):
            resulting = Qubit(
                single.get(DUAL_RAIL_ZERO, 0j), single.get(DUAL_RAIL_ONE, 0j), "dual-rail"
            ).normalized()
            if herald == (0, 1):
                correction = "Z"
                resulting = Qubit(-resulting.a0, resulting.a1, "dual-rail")
        outcomes.append(
            DemodOutcome(
                herald=herald,
                probability=probability,
                resulting_qubit=resulting,
                is_original=_is_original(resulting, original),
                correction=correction,
                success=herald in success_heralds("swap", which),
            )
        )
    _check_complete(outcomes, "swap")
    return outcomes


def _check_complete(outcomes: list[DemodOutcome], method: str) -> None:
    total = sum(o.probability for o in outcomes)
    if abs(total - 1) > SUM_TOLERANCE:
        raise ProbabilityError(f"{method} demodulation heralds sum to {total}")


def iterate_coherent_extra(
    residual: Qubit, alpha: float, *, original: Qubit | None = None
) -> DemodOutcome:
    """Attenuate the residual single-rail state of the coherent method.

    The residual N(a0, Z a1) passes a beam splitter of transmittance 1/|Z|
    with a vacuum ancilla; on ancilla vacuum the qubit is the original up to
    the phase of Z, which Bob removes.
    """
    gamma = solve_gamma(0, alpha).gamma
    ratio = modulation_ratio(0, alpha) / modulation_factor(0, gamma)
    if abs(ratio) < 1:
        raise ValueError(f"Residual modulation {abs(ratio)} cannot be removed by attenuation")
    if original is None:
        original = Qubit(residual.a0, residual.a1 / ratio).normalized()

    state = tensor(
        FockState((1,), {(0,): residual.a0, (1,): residual.a1}).normalized(),
        FockState.vacuum((1,)),
    )
    attenuated = apply_beam_splitter(state, BeamSplitterSpec.from_transmittance(1 / abs(ratio)))
    result = project(attenuated, (1,), number_projector(0))

    resulting = None
    correction = None
    if result.post_state is not None:
        phase = ratio / abs(ratio)
        resulting = Qubit(
            result.post_state.amplitude((0,)), result.post_state.amplitude((1,)) * phase.conjugate()
        )
        if abs(phase - 1) > 1e-12:
            correction = "Z" if abs(phase + 1) < 1e-12 else f"phase({np.angle(phase):.6g})"
    return DemodOutcome(
        herald=(0,),
        probability=result.probability,
        resulting_qubit=resulting,
        is_original=_is_original(resulting, original),
        correction=correction,
    )


@dataclass(frozen=True)
class SuccessComparison:
    """Closed-form success probability next to its circuit oracle."""

    method: str
    which: int
    alpha: float
    a1_abs: float
    closed_form: float
    oracle: float

    @property
    def abs_diff(self) -> float:
        return abs(self.closed_form - self.oracle)

    @property
    def flagged(self) -> bool:
        return self.abs_diff > ORACLE_TOLERANCE


def _am_denominator(which: int, alpha: float, a1_abs: float) -> float:
    return 1 + (abs(modulation_factor(which, alpha)) ** -2 - 1) * a1_abs**2


def success_closed_form(method: Method, which: int, alpha: float, a1_abs: float) -> float:
    """Total probability that Bob ends with the original qubit.

    Raises:
        ValueError: On an unknown method.
    """
    _check_which(which)
    if method not in VALID_METHODS:
        raise ValueError(f"Unknown demodulation method: {method}")
    a2 = alpha**2
    base = math.exp(-a2) * (1 if which == 0 else a2) / _am_denominator(which, alpha, a1_abs)
    if method == "coherent":
        gamma = solve_gamma(which, alpha).gamma
        g2 = gamma**2
        if which == 0:
            return base * (1 + math.exp(-g2) * a2 * (1 - g2) ** 2)
        return base * (1 + math.exp(-g2) * g2 / a2)
    if which == 0:
        return base * (1 + a2 * (1 - a2) ** 2 / (a2**2 + (1 - a2) ** 2))
    return base * (1 + a2 / (a2**2 + (1 - a2) ** 2))


def _reference_qubit(a1_abs: float) -> Qubit:
    if not 0 <= a1_abs <= 1:
        raise ValueError(f"a1_abs must lie in [0, 1], got {a1_abs}")
    return Qubit(math.sqrt(1 - a1_abs**2), a1_abs)


def _teleported(
    qubit: Qubit, which: int, alpha: float, beta: float
) -> dict[int, tuple[float, Qubit]]:
    """Outcome probability and Bob's corrected qubit for n = 0, 1 of the AM protocol."""
    am = prepare_am_qubit(qubit, which, alpha)
    teleported = teleport(am, beta, alpha=alpha, n_max=1)
    outcomes: dict[int, tuple[float, Qubit]] = {}
    for n in (0, 1):
        results = [r for r in teleported if r.record.n == n]
        best = max(results, key=lambda r: r.record.probability)
        if best.corrected is None:
            raise ProbabilityError(f"Outcome n={n} underflowed at alpha={alpha}")
        outcomes[n] = (sum(r.record.probability for r in results), best.corrected)
    return outcomes


def _compare(comparison: SuccessComparison) -> SuccessComparison:
    if comparison.flagged:
        logger.warning(
            "%s demodulation (which=%d, alpha=%s, |a1|=%s): closed form %.6f vs circuit %.6f",
            comparison.method,
            comparison.which,
            comparison.alpha,
            comparison.a1_abs,
            comparison.closed_form,
            comparison.oracle,
        )
    return comparison


def _success_oracle(
    method: Method, which: int, alpha: float, a1_abs: float, beta: float
) -> float:
    qubit = _reference_qubit(a1_abs)
    outcomes = _teleported(qubit, which, alpha, beta)
    direct, _ = outcomes[which]
    probability, modulated = outcomes[1 - which]
    if method == "coherent":
        heralds = demod_coherent(modulated, which, alpha, original=qubit)
    else:
        heralds = demod_swap(modulated, which, alpha, original=qubit)
    recovered = sum(h.probability for h in heralds if h.success)
    return direct + probability * recovered


def coherent_success_prob(
    which: int, alpha: float, a1_abs: float, beta: float = DEFAULT_BETA
) -> SuccessComparison:
    """Success probability of the coherent method: closed form and teleport-plus-demod circuit."""
    return _compare(
        SuccessComparison(
            method="coherent",
            which=which,
            alpha=alpha,
            a1_abs=a1_abs,
            closed_form=success_closed_form("coherent", which, alpha, a1_abs),
            oracle=_success_oracle("coherent", which, alpha, a1_abs, beta),
        )
    )


def swap_success_prob(
    which: int, alpha: float, a1_abs: float, beta: float = DEFAULT_BETA
) -> SuccessComparison:
    """Success probability of the swap method: closed form and teleport-plus-swap circuit."""
    return _compare(
        SuccessComparison(
            method="swap",
            which=which,
            alpha=alpha,
            a1_abs=a1_abs,
            closed_form=success_closed_form("swap", which, alpha, a1_abs),
            oracle=_success_oracle("swap", which, alpha, a1_abs, beta),
        )
    )


def extra_success_prob(
    alpha: float, a1_abs: float, beta: float = DEFAULT_BETA
) -> SuccessComparison:
    """Gain from attenuating the coherent method's vacuum-herald residual (mod 0).

    The closed form reads the undefined amplitude of the published expression
    as the solved gamma; the comparison is advisory.
    """
    qubit = _reference_qubit(a1_abs)
    gamma = solve_gamma(0, alpha).gamma
    base = math.exp(-(alpha**2)) * alpha**2 / _am_denominator(0, alpha, a1_abs)
    closed_form = base * math.exp(-(gamma**2)) * gamma**2

    probability, modulated = _teleported(qubit, 0, alpha, beta)[1]
    heralds = demod_coherent(modulated, 0, alpha, original=qubit)
    vacuum = next(h for h in heralds if h.herald == (0,))
    oracle = 0.0
    if vacuum.resulting_qubit is not None and not vacuum.is_original:
        extra = iterate_coherent_extra(vacuum.resulting_qubit, alpha, original=qubit)
        if extra.is_original:
            oracle = probability * vacuum.probability * extra.probability
    return SuccessComparison(
        method="coherent-extra",
        which=0,
        alpha=alpha,
        a1_abs=a1_abs,
        closed_form=closed_form,
        oracle=oracle,
    )


def total_success(p0: float, p1: float, method: Method, alpha: float, a1_abs: float) -> float:
    """Success probability when the qubit is pre-modulated with mod 0 or mod 1 at rates p0, p1.

    Raises:
        ValueError: If the weights are not a sub-normalized mixture.
    """
    if not (0 <= p0 <= 1 and 0 <= p1 <= 1) or p0 + p1 > 1 + SUM_TOLERANCE:
        raise ValueError(f"Invalid mixture weights p0={p0}, p1={p1}")
    total = 0.0
    if p0:
        total += p0 * success_closed_form(method, 0, alpha, a1_abs)
    if p1:
        total += p1 * success_closed_form(method, 1, alpha, a1_abs)
    return total
