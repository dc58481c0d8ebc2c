"""Teleportation of a single-rail qubit over the hybrid coherent/dual-rail channel.

Mode layout of every post-mixing state:
    0  coherent mode of the channel (Alice)
    1  teleported qubit mode (Alice)
    2, 3  Bob's dual-rail photon
"""

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from hybridtele.constants import (
    DEFAULT_CUTOFF,
    DEFAULT_N_MAX,
    DISTRIBUTION_N_MAX,
    ORACLE_TOLERANCE,
    ORTHOGONALITY_TOLERANCE,
    UNDERFLOW_PROBABILITY,
    VALID_MODELS,
)
from hybridtele.errors import ProbabilityError
from hybridtele.log import get_logger
from hybridtele.services.displaced import (
    coeff,
    coherent_overlap,
    coherent_state,
    displaced_number_state,
    modulation_factor,
    scs_projector,
)
from hybridtele.services.fock import (
    APD_OFF,
    APD_ON,
    DensityOperator,
    FockState,
    Projector,
    fock_branches,
    number_projector,
    parity_projector,
    permute,
    project,
    reduced_density,
    tensor,
    tensor_all,
)
from hybridtele.services.optics import (
    BeamSplitterSpec,
    apply_beam_splitter,
    dual_rail_apply,
    hadamard,
    z_power,
)
from hybridtele.services.qubit import (
    DUAL_RAIL_ONE,
    DUAL_RAIL_ZERO,
    Qubit,
    single_rail_state,
)

logger = get_logger(__name__)

Model = Literal["ideal", "fock-basis", "apd-pair"]
DistributionKind = Literal["direct", "am0", "am1"]

BOB_MODES = (2, 3)


def alpha_from_beta(beta: float, t: float) -> float:
    """Displacement amplitude alpha = beta * sqrt(1 - t^2) imprinted by the mixing beam splitter."""
    return beta * math.sqrt(1 - t**2)


def beta_from_alpha(alpha: float, t: float) -> float:
    """Channel amplitude needed for a target displacement at transmittance t < 1."""
    if t >= 1:
        raise ValueError("beta is unbounded at t = 1")
    return alpha / math.sqrt(1 - t**2)


@dataclass(frozen=True)
class HybridChannel:
    """(|-beta>|01> + |beta>|10>)/sqrt(2) on modes (coherent, Bob, Bob)."""

    beta: float
    cutoff: int
    state: FockState

    @property
    def overlap(self) -> float:
        """<-beta|beta>, the overlap of the two coherent components."""
        return coherent_overlap(-self.beta, self.beta).real

    def bob_density(self) -> DensityOperator:
        return reduced_density(self.state, (1, 2))


def build_channel(beta: float, cutoff: int = DEFAULT_CUTOFF) -> HybridChannel:
    """Construct the hybrid entangled channel.

    The dual-rail kets are orthogonal, so the state is exactly normalized even
    though the coherent components overlap.
    """
    if beta <= 0:
        raise ValueError(f"Channel amplitude must be positive, got {beta}")
    minus = coherent_state(-beta, cutoff)
    plus = coherent_state(beta, cutoff)
    zero = FockState.basis((1, 1), DUAL_RAIL_ZERO)
    one = FockState.basis((1, 1), DUAL_RAIL_ONE)
    state = (tensor(minus, zero) + tensor(plus, one)).normalized()
    return HybridChannel(beta=beta, cutoff=cutoff, state=state)


def _displaced_qubit(qubit: Qubit, alpha: float, cutoff: int) -> FockState:
    ground = displaced_number_state(0, alpha, cutoff)
    excited = displaced_number_state(1, alpha, cutoff)
    return ground * qubit.a0 + excited * qubit.a1


def omega_apply(
    qubit: Qubit, alpha: float, beta: float, cutoff: int = DEFAULT_CUTOFF
) -> FockState:
    """Ideal mixing: (|-beta>|01> D(alpha) + |beta>|10> D(-alpha)) |phi> / sqrt(2)."""
    if alpha < 0 or beta <= 0:
        raise ValueError(f"Need alpha >= 0 and beta > 0, got alpha={alpha}, beta={beta}")
    zero = FockState.basis((1, 1), DUAL_RAIL_ZERO)
    one = FockState.basis((1, 1), DUAL_RAIL_ONE)
    first = tensor_all(
        [coherent_state(-beta, cutoff), _displaced_qubit(qubit, alpha, cutoff), zero]
    )
    second = tensor_all(
        [coherent_state(beta, cutoff), _displaced_qubit(qubit, -alpha, cutoff), one]
    )
    return (first + second) * (1 / math.sqrt(2))


def alice_mix_exact(channel: HybridChannel, qubit: Qubit, t: float) -> FockState:
    """Mix the coherent channel mode with the qubit on an exact beam splitter.

    The output keeps the input cutoffs.

    Raises:
        CutoffError: If the mixed modes carry weight above channel.cutoff.
    """
    joint = tensor(channel.state, single_rail_state(qubit, channel.cutoff))
    joint = permute(joint, (0, 3, 1, 2))
    mixed = apply_beam_splitter(joint, BeamSplitterSpec.from_transmittance(t, (0, 1)))
    return mixed.truncated(joint.cutoffs)


def approximation_fidelity(alpha: float, t: float, qubit: Qubit, m_max: int = 40) -> float:
    """Closed-form fidelity between exact mixing and the ideal displacement operator.

    The Gaussian prefactor is written through alpha, which keeps t = 1 finite.
    """
    if not 0 < t <= 1:
        raise ValueError(f"Transmittance must lie in (0, 1], got {t}")
    prefactor = math.exp(-(alpha**2) * (1 - t) / (t**2 * (1 + t)))
    sums = []
    for sign in (1, -1):
        x = sign * alpha
        total = sum(
            t**m * abs(qubit.a0 * coeff(0, m, x) + qubit.a1 * coeff(1, m, x)) ** 2
            for m in range(m_max + 1)
        )
        sums.append(math.exp(-(alpha**2)) * total)
    return min(1.0, prefactor * (sum(sums) / 2) ** 2)


@dataclass(frozen=True)
class OutcomeRecord:
    """One of Alice's measurement results.

    Attributes:
        j: Parity bit of the coherent-mode measurement.
        n: Photon count in the teleported mode (1 means "click" for APDs).
        probability: Outcome probability.
        bob_state: Bob's dual-rail qubit before correction, None on underflow.
        coherent_count: Photon count in the coherent mode for the fock-basis model.
        purity: Purity of Bob's conditional state; 1 for pure states.
    """

    j: int
    n: int
    probability: float
    bob_state: Qubit | None
    coherent_count: int | None = None
    purity: float = 1.0

    @property
    def message_bits(self) -> tuple[int, int]:
        return (self.j, self.n % 2)


def _bob_qubit(post: FockState, modes: tuple[int, ...]) -> tuple[Qubit, float]:
    """Dominant eigenvector and purity of Bob's conditional dual-rail state."""
    bob = tuple(modes.index(m) for m in BOB_MODES)
    rho = reduced_density(post, bob)
    block = rho.block([DUAL_RAIL_ZERO, DUAL_RAIL_ONE])
    trace = float(np.real(np.trace(block)))
    if trace <= 0:
        raise ProbabilityError("Bob's modes carry no single-photon weight")
    block = block / trace
    _, vectors = np.linalg.eigh(block)
    purity = float(np.real(np.trace(block @ block)))
    return Qubit.from_vector(vectors[:, -1], "dual-rail"), purity


def _record(
    state: FockState, outcome: list[Projector], j: int, n: int, coherent_count: int | None = None
) -> OutcomeRecord:
    result = project(state, (0, 1), outcome)
    if result.post_state is None:
        return OutcomeRecord(j, n, result.probability, None, coherent_count, purity=0.0)
    bob, purity = _bob_qubit(result.post_state, result.modes)
    return OutcomeRecord(j, n, result.probability, bob, coherent_count, purity)


def alice_measure(
    state: FockState,
    model: Model = "ideal",
    beta: float | None = None,
    n_max: int = DEFAULT_N_MAX,
) -> list[OutcomeRecord]:
    """Enumerate Alice's measurement outcomes on a post-mixing state.

    Args:
        state: Four-mode state (coherent, qubit, Bob, Bob).
        model: ``ideal`` (parity + photon counting), ``fock-basis`` (photon
            counting on both modes) or ``apd-pair`` (on/off on both modes).
        beta: Project the coherent mode on even/odd cat states of this
            amplitude instead of photon-number parity (ideal model only).
        n_max: Largest photon count enumerated.

    Raises:
        ValueError: If the model is unknown.
    """
    if model not in VALID_MODELS:
        raise ValueError(f"Unknown measurement model: {model}")

    records: list[OutcomeRecord] = []
    if model == "ideal":
        for n in range(min(n_max, state.cutoffs[1]) + 1):
            for j, parity in ((0, "even"), (1, "odd")):
                if beta is None:
                    coherent: Projector = parity_projector(j)
                else:
                    coherent = scs_projector(parity, beta, state.cutoffs[0])
                records.append(_record(state, [coherent, number_projector(n)], j, n))
    elif model == "fock-basis":
        for (k, n), branch in fock_branches(state, (0, 1)).items():
            if k > n_max or n > n_max:
                continue
            probability = branch.norm() ** 2
            if probability < UNDERFLOW_PROBABILITY:
                records.append(OutcomeRecord(k % 2, n, probability, None, k, purity=0.0))
                continue
            bob, purity = _bob_qubit(branch.normalized(), (2, 3))
            records.append(OutcomeRecord(k % 2, n, probability, bob, k, purity))
    else:
        for j, coherent in enumerate((APD_OFF, APD_ON)):
            for n, click in enumerate((APD_OFF, APD_ON)):
                records.append(_record(state, [coherent, click], j, n))

    logger.debug(
        "%s model: %d outcomes, total probability %.12f",
        model,
        len(records),
        sum(r.probability for r in records),
    )
    return records


def bob_correct(record: OutcomeRecord) -> Qubit | None:
    """Apply Z^(j + par(n)) and then H to Bob's qubit."""
    if record.bob_state is None:
        return None
    corrected = dual_rail_apply(record.bob_state, z_power(record.j + record.n % 2))
    return dual_rail_apply(corrected, hadamard())


def expected_output(qubit: Qubit, alpha: float, n: int) -> Qubit:
    """Amplitude-modulated target N_n (a0, A_n a1) in the dual-rail basis."""
    return Qubit(qubit.a0, modulation_factor(n, alpha) * qubit.a1, "dual-rail").normalized()


@dataclass(frozen=True)
class TeleportResult:
    """Outcome record with Bob's corrected qubit and the modulated target."""

    record: OutcomeRecord
    corrected: Qubit | None
    expected: Qubit

    @property
    def fidelity(self) -> float:
        if self.corrected is None:
            return 0.0
        return self.corrected.fidelity(self.expected)


def teleport(
    qubit: Qubit,
    beta: float,
    *,
    alpha: float | None = None,
    t: float | None = None,
    model: Model = "ideal",
    n_max: int = DEFAULT_N_MAX,
    cutoff: int = DEFAULT_CUTOFF,
) -> list[TeleportResult]:
    """Run the protocol end to end.

    With ``t`` the exact beam-splitter circuit is simulated and alpha follows
    from beta; otherwise the ideal mixing operator with the given alpha is used.
    """
    if t is not None:
        alpha = alpha_from_beta(beta, t)
        state = alice_mix_exact(build_channel(beta, cutoff), qubit, t)
    elif alpha is not None:
        state = omega_apply(qubit, alpha, beta, cutoff)
    else:
        raise ValueError("Either alpha or t must be given")

    results = []
    for record in alice_measure(state, model=model, n_max=n_max):
        results.append(
            TeleportResult(
                record=record,
                corrected=bob_correct(record),
                expected=expected_output(qubit, alpha, record.n),
            )
        )
    return results


@dataclass(frozen=True)
class ProbabilityReport:
    """Discrete outcome distribution of one protocol variant."""

    kind: DistributionKind
    alpha: float
    a1_abs: float
    values: dict[int, float] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return sum(self.values.values())

    @property
    def tail(self) -> float:
        return 1.0 - self.total


def _check_a1(a1_abs: float) -> None:
    if not 0 <= a1_abs <= 1:
        raise ValueError(f"a1_abs must lie in [0, 1], got {a1_abs}")


def _poisson(n: int, alpha: float) -> float:
    return math.exp(-(alpha**2)) * alpha ** (2 * n) / math.factorial(n)


def direct_success_probs(
    alpha: float, a1_abs: float, n_max: int = DISTRIBUTION_N_MAX
) -> ProbabilityReport:
    """Probability P_n of registering n photons in the teleported mode."""
    _check_a1(a1_abs)
    values = {}
    for n in range(n_max + 1):
        gain = abs(modulation_factor(n, alpha)) ** 2
        values[n] = _poisson(n, alpha) * (1 + (gain - 1) * a1_abs**2)
    return ProbabilityReport("direct", alpha, a1_abs, values)


def prepare_am_qubit(qubit: Qubit, mod_index: int, alpha: float) -> Qubit:
    """Pre-modulate the qubit to (a0, a1 / A_k), normalized.

    Raises:
        ValueError: If A_k vanishes or mod_index is not 0 or 1.
    """
    if mod_index not in (0, 1):
        raise ValueError(f"mod_index must be 0 or 1, got {mod_index}")
    factor = modulation_factor(mod_index, alpha)
    if factor == 0:
        raise ValueError(f"A_{mod_index} vanishes at alpha={alpha}")
    return Qubit(qubit.a0, qubit.a1 / factor, qubit.basis).normalized()


def am_success_probs(
    mod_index: int, alpha: float, a1_abs: float, n_max: int = DISTRIBUTION_N_MAX
) -> ProbabilityReport:
    """Outcome distribution P_nk when the qubit was pre-modulated with A_k^-1."""
    _check_a1(a1_abs)
    if mod_index not in (0, 1):
        raise ValueError(f"mod_index must be 0 or 1, got {mod_index}")
    inverse_gain = abs(modulation_factor(mod_index, alpha)) ** -2
    denominator = 1 + (inverse_gain - 1) * a1_abs**2
    values = {}
    for n in range(n_max + 1):
        ratio = abs(modulation_factor(n, alpha)) ** 2 * inverse_gain
        values[n] = _poisson(n, alpha) * (1 + (ratio - 1) * a1_abs**2) / denominator
    kind: DistributionKind = "am0" if mod_index == 0 else "am1"
    return ProbabilityReport(kind, alpha, a1_abs, values)


def bob_density(state: FockState) -> DensityOperator:
    """Bob's dual-rail state before any classical message arrives."""
    return reduced_density(state, BOB_MODES).normalized()


def rho_b_offdiag_printed(alpha: float, beta: float, qubit: Qubit) -> complex:
    """<01|rho_B|10> in the published form, with (1 - 4|a1|^2) weighting |a1|^2."""
    a0, a1 = qubit.a0, qubit.a1
    bracket = (
        abs(a0) ** 2
        + (1 - 4 * abs(a1) ** 2) * abs(a1) ** 2
        - 2 * np.conj(alpha) * np.conj(a0) * a1
        + 2 * alpha * a0 * np.conj(a1)
    )
    return complex(0.5 * math.exp(-2 * abs(alpha) ** 2 - 2 * beta**2) * bracket)


def rho_b_offdiag_corrected(alpha: float, beta: float, qubit: Qubit) -> complex:
    """<01|rho_B|10> = exp(-2 beta^2) <phi|D(2 alpha)|phi> / 2 for the ideal mixing."""
    a0, a1 = qubit.a0, qubit.a1
    bracket = (
        abs(a0) ** 2
        + (1 - 4 * abs(alpha) ** 2) * abs(a1) ** 2
        - 2 * np.conj(alpha) * np.conj(a0) * a1
        + 2 * alpha * a0 * np.conj(a1)
    )
    return complex(0.5 * math.exp(-2 * abs(alpha) ** 2 - 2 * beta**2) * bracket)


def rho_b_closed_form(alpha: float, beta: float, qubit: Qubit) -> DensityOperator:
    """Closed-form rho_B on Bob's (1, 1)-truncated modes, diagonal 1/2 each."""
    offdiag = rho_b_offdiag_corrected(alpha, beta, qubit)
    matrix = np.zeros((4, 4), dtype=complex)
    zero = np.ravel_multi_index(DUAL_RAIL_ZERO, (2, 2))
    one = np.ravel_multi_index(DUAL_RAIL_ONE, (2, 2))
    matrix[zero, zero] = matrix[one, one] = 0.5
    matrix[zero, one] = offdiag
    matrix[one, zero] = np.conj(offdiag)
    return DensityOperator((1, 1), matrix)


@dataclass(frozen=True)
class RhoBReport:
    """Bob's pre-message state compared with its closed forms.

    Attributes:
        diagonal: <01|rho|01> and <10|rho|10>.
        offdiag: <01|rho|10> from the ideal-mixing state.
        closed_form_offdiag: Published closed form.
        corrected_offdiag: Closed form derived from <phi|D(2 alpha)|phi>.
        circuit_offdiag: Exact beam-splitter circuit value, None if beta <= alpha.
        trace: Trace of the reduced operator before renormalization.
    """

    alpha: float
    beta: float
    diagonal: tuple[float, float]
    offdiag: complex
    closed_form_offdiag: complex
    corrected_offdiag: complex
    circuit_offdiag: complex | None
    trace: float

    @property
    def offdiag_magnitude(self) -> float:
        return abs(self.offdiag)

    @property
    def discrepancy(self) -> float:
        return abs(self.offdiag - self.closed_form_offdiag)

    @property
    def flagged(self) -> bool:
        return self.discrepancy > ORACLE_TOLERANCE


def rho_b_report(
    alpha: float, beta: float, qubit: Qubit, cutoff: int = DEFAULT_CUTOFF
) -> RhoBReport:
    """Average Bob's state over all of Alice's outcomes and compare with the closed forms."""
    state = omega_apply(qubit, alpha, beta, cutoff)
    raw = reduced_density(state, BOB_MODES)
    rho = raw.normalized()

    circuit = None
    if beta > alpha:
        t = math.sqrt(1 - (alpha / beta) ** 2)
        exact = alice_mix_exact(build_channel(beta, cutoff), qubit, t)
        circuit = bob_density(exact).element(DUAL_RAIL_ZERO, DUAL_RAIL_ONE)

    report = RhoBReport(
        alpha=alpha,
        beta=beta,
        diagonal=(
            rho.element(DUAL_RAIL_ZERO, DUAL_RAIL_ZERO).real,
            rho.element(DUAL_RAIL_ONE, DUAL_RAIL_ONE).real,
        ),
        offdiag=rho.element(DUAL_RAIL_ZERO, DUAL_RAIL_ONE),
        closed_form_offdiag=rho_b_offdiag_printed(alpha, beta, qubit),
        corrected_offdiag=rho_b_offdiag_corrected(alpha, beta, qubit),
        circuit_offdiag=circuit,
        trace=raw.trace,
    )
    if report.flagged:
        logger.warning(
            "rho_B off-diagonal differs from the published closed form by %.3e "
            "(alpha=%s, beta=%s)",
            report.discrepancy,
            alpha,
            beta,
        )
    return report


@dataclass(frozen=True)
class OrthogonalReport:
    """Teleportation of an orthogonal pair with amplitude pre-modulation.

    Attributes:
        recovered: Bob's qubits on the original-yielding outcome.
        overlap: |<recovered_1|recovered_2>|.
        probabilities: Circuit probabilities of the original-yielding outcome.
        closed_form: P_kk from the modulated distribution for each qubit.
        fidelities: Fidelity of each recovered qubit with its original.
    """

    alpha: float
    mod_indices: tuple[int, int]
    recovered: tuple[Qubit, Qubit]
    overlap: float
    probabilities: tuple[float, float]
    closed_form: tuple[float, float]
    fidelities: tuple[float, float]


def orthogonal_scenario(
    alpha: float,
    pair: tuple[Qubit, Qubit],
    mod_indices: tuple[int, int] = (0, 0),
    beta: float = 0.3,
    cutoff: int = DEFAULT_CUTOFF,
) -> OrthogonalReport:
    """Teleport an orthogonal pair with the given pre-modulations.

    Raises:
        ValueError: If the two qubits overlap by more than ORTHOGONALITY_TOLERANCE.
    """
    first, second = (q.normalized() for q in pair)
    if abs(first.inner(second)) > ORTHOGONALITY_TOLERANCE:
        raise ValueError(
            f"Input qubits are not orthogonal: |<phi_1|phi_2>| = {abs(first.inner(second)):.3e}"
        )

    recovered, probabilities, closed_form, fidelities = [], [], [], []
    for original, k in zip((first, second), mod_indices, strict=True):
        am = prepare_am_qubit(original, k, alpha)
        results = [r for r in teleport(am, beta, alpha=alpha, cutoff=cutoff) if r.record.n == k]
        best = max(results, key=lambda r: r.record.probability)
        if best.corrected is None:
            raise ProbabilityError(f"Outcome n={k} underflowed at alpha={alpha}")
        recovered.append(best.corrected)
        probabilities.append(sum(r.record.probability for r in results))
        closed_form.append(am_success_probs(k, alpha, abs(original.a1), n_max=k).values[k])
        fidelities.append(best.corrected.fidelity(original))

    overlap = abs(recovered[0].inner(recovered[1]))
    return OrthogonalReport(
        alpha=alpha,
        mod_indices=mod_indices,
        recovered=(recovered[0], recovered[1]),
        overlap=overlap,
        probabilities=(probabilities[0], probabilities[1]),
        closed_form=(closed_form[0], closed_form[1]),
        fidelities=(fidelities[0], fidelities[1]),
    )
