"""Heralded generation of the hybrid channel from an even cat state.

Circuit (modes 1-6): even SCS on mode 1, coherent ancilla on mode 2 and the
two-photon resource (|0101> + |1010>)/sqrt(2) on modes 3-6. Mode 1 meets
mode 5 and mode 2 meets mode 6 on beam splitters of transmittance t; modes 5
and 6 are counted. The resource is a sum of two product terms, so each term
is propagated through the two beam splitters separately.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from hybridtele.constants import (
    DEFAULT_CUTOFF,
    DEFAULT_HERALD_MAX,
    GENERATION_CUTOFF,
    SUM_TOLERANCE,
    UNDERFLOW_PROBABILITY,
)
from hybridtele.log import get_logger
from hybridtele.services.displaced import (
    coeff,
    coherent_state,
    displacement_weight,
    scs_normalization,
    scs_state,
)
from hybridtele.services.fock import (
    DensityOperator,
    FockState,
    fock_branches,
    tensor,
)
from hybridtele.services.optics import (
    BeamSplitterSpec,
    DualRailGate,
    apply_beam_splitter,
    apply_dual_rail_gate,
    hadamard,
    z_power,
)
from hybridtele.services.qubit import DUAL_RAIL_ONE, DUAL_RAIL_ZERO
from hybridtele.services.teleport import build_channel

logger = get_logger(__name__)

# Resource terms: Bob's dual-rail ket and the photon numbers it leaves in modes 5 and 6.
RESOURCE_TERMS = ((DUAL_RAIL_ZERO, 0, 1), (DUAL_RAIL_ONE, 1, 0))
BALANCED_HERALDS = frozenset({(0, 0), (1, 1)})


@dataclass(frozen=True)
class GenerationConfig:
    """Parameters of the generation circuit.

    Attributes:
        beta: Even-SCS amplitude.
        beta1: Ancilla coherent amplitude (magnitude).
        t: Transmittance of both beam splitters.
        cutoff: Truncation of every bosonic mode.
        herald_max: Largest photon count reported per herald mode, None for all.
        ancilla_sign: Sign of the ancilla amplitude; -1 prepares |-beta1>.
    """

    beta: float
    beta1: float
    t: float
    cutoff: int = DEFAULT_CUTOFF
    herald_max: int | None = DEFAULT_HERALD_MAX
    ancilla_sign: int = -1

    def __post_init__(self) -> None:
        if not 0 < self.t < 1:
            raise ValueError(f"Transmittance must lie in (0, 1), got {self.t}")
        if self.beta <= 0 or self.beta1 <= 0:
            raise ValueError(f"Amplitudes must be positive, got {self.beta}, {self.beta1}")
        if self.ancilla_sign not in (-1, 1):
            raise ValueError(f"ancilla_sign must be -1 or 1, got {self.ancilla_sign}")

    @classmethod
    def from_alpha(
        cls,
        alpha: float,
        t: float,
        cutoff: int = DEFAULT_CUTOFF,
        herald_max: int | None = DEFAULT_HERALD_MAX,
    ) -> "GenerationConfig":
        """Configuration with alpha = alpha_1 at transmittance t."""
        beta = alpha / math.sqrt(1 - t**2)
        return cls(beta=beta, beta1=beta, t=t, cutoff=cutoff, herald_max=herald_max)

    @property
    def r(self) -> float:
        return math.sqrt(1 - self.t**2)

    @property
    def alpha(self) -> float:
        return self.beta * self.r

    @property
    def alpha1(self) -> float:
        return self.beta1 * self.r


@dataclass(frozen=True)
class HeraldedChannel:
    """Corrected channel state for one herald pattern on modes 5 and 6.

    Attributes:
        herald: Photon counts (n5, n6).
        probability: Herald probability.
        state: Corrected density operator on modes (1, 3, 4), None on underflow.
        fidelity: Fidelity of state with the target hybrid channel.
        balanced: Herald is one of the patterns that reproduce the channel.
    """

    herald: tuple[int, int]
    probability: float
    state: DensityOperator | None
    fidelity: float | None
    balanced: bool


def _correction(herald: tuple[int, int]) -> DualRailGate:
    return z_power(herald[0]) @ hadamard()


Term = tuple[tuple[int, int], FockState, FockState]


@lru_cache(maxsize=8)
def _propagated_terms(cfg: GenerationConfig) -> tuple[Term, ...]:
    """Each resource term as (Bob ket, state of modes (1,5), state of modes (2,6))."""
    even = scs_state("even", cfg.beta, cfg.cutoff)
    ancilla = coherent_state(cfg.ancilla_sign * cfg.beta1, cfg.cutoff)
    bs = BeamSplitterSpec.from_transmittance(cfg.t)
    shape = (cfg.cutoff, cfg.cutoff)
    terms = []
    for bob, n5, n6 in RESOURCE_TERMS:
        coherent = tensor(even, FockState.basis((cfg.cutoff,), (n5,)))
        auxiliary = tensor(ancilla, FockState.basis((cfg.cutoff,), (n6,)))
        terms.append(
            (
                bob,
                apply_beam_splitter(coherent, bs).truncated(shape),
                apply_beam_splitter(auxiliary, bs).truncated(shape),
            )
        )
    return tuple(terms)


def complete_herald_probability(cfg: GenerationConfig) -> float:
    """Probability summed over every herald pattern the cutoff admits.

    Bob's kets in the two resource terms are orthogonal and the corrections
    are unitary, so this is the squared norm of the propagated circuit.
    """
    return 0.5 * sum(v.norm() ** 2 * w.norm() ** 2 for _, v, w in _propagated_terms(cfg))


def _underflow(herald: tuple[int, int], probability: float) -> HeraldedChannel:
    return HeraldedChannel(herald, probability, None, None, herald in BALANCED_HERALDS)


def _herald_counts(cfg: GenerationConfig) -> list[tuple[int, int]]:
    top = cfg.cutoff if cfg.herald_max is None else min(cfg.herald_max, cfg.cutoff)
    return [(n5, n6) for n5 in range(top + 1) for n6 in range(top + 1)]


def generate_channel(cfg: GenerationConfig) -> list[HeraldedChannel]:
    """Simulate the generation circuit exactly and correct each herald with H then Z^n5.

    The ancilla mode is traced out; fidelities are taken against the hybrid
    channel of amplitude beta.

    Raises:
        ValueError: If alpha differs from alpha_1.
    """
    if not math.isclose(cfg.alpha, cfg.alpha1, rel_tol=1e-12, abs_tol=1e-15):
        raise ValueError(f"Generation requires alpha = alpha_1, got {cfg.alpha}, {cfg.alpha1}")

    target = build_channel(cfg.beta, cfg.cutoff).state
    terms = _propagated_terms(cfg)
    coherent_branches = [fock_branches(v, (1,)) for _, v, _ in terms]
    ancilla_branches = [fock_branches(w, (1,)) for _, _, w in terms]

    heralds = []
    for herald in _herald_counts(cfg):
        n5, n6 = herald
        vectors, ancillas = [], []
        for (bob, _, _), coherent, ancilla in zip(
            terms, coherent_branches, ancilla_branches, strict=True
        ):
            mode1 = coherent.get((n5,))
            mode2 = ancilla.get((n6,))
            if mode1 is None or mode2 is None:
                continue
            component = tensor(mode1, FockState.basis((1, 1), bob))
            component = apply_dual_rail_gate(component, (1, 2), _correction(herald))
            vectors.append(component.to_vector())
            ancillas.append(mode2.to_vector())

        if not vectors:
            continue
        gram = np.array([[np.vdot(b, a) for b in ancillas] for a in ancillas])
        matrix = 0.5 * sum(
            gram[x, y] * np.outer(vectors[x], vectors[y].conj())
            for x in range(len(vectors))
            for y in range(len(vectors))
        )
        rho = DensityOperator(target.cutoffs, matrix)
        probability = rho.trace
        if probability < UNDERFLOW_PROBABILITY:
            heralds.append(_underflow(herald, probability))
            continue
        rho = rho.normalized()
        heralds.append(
            HeraldedChannel(
                herald=herald,
                probability=probability,
                state=rho,
                fidelity=rho.expectation(target),
                balanced=herald in BALANCED_HERALDS,
            )
        )

    reported = sum(h.probability for h in heralds)
    complete = complete_herald_probability(cfg)
    if abs(complete - 1) > SUM_TOLERANCE:
        logger.warning("Heralds at %s sum to %.12f, not 1", cfg, complete)
    if cfg.herald_max is None and abs(reported - complete) > SUM_TOLERANCE:
        logger.warning("Listed heralds sum to %.12f of %.12f", reported, complete)
    logger.debug(
        "Generated %d heralds, listed probability %.12f, tail %.3e",
        len(heralds),
        reported,
        complete - reported,
    )
    return heralds


def ideal_generation_state(
    beta: float,
    alpha: float,
    cutoff: int = DEFAULT_CUTOFF,
    *,
    alpha1: float | None = None,
    herald_cutoff: int = GENERATION_CUTOFF,
) -> FockState:
    """Ideal-displacement output on modes (1, 3, 4, 5, 6), normalized.

    Sums |Psi_nm>|nm> over herald counts n, m <= herald_cutoff, with
    |Psi_nm> = |-beta>|phi+_nm> + (-1)^n |beta>|phi-_nm> and
    |phi+/-_nm> = (c_0n(a) c_1m(a1)|01> +/- c_1n(a) c_0m(a1)|10>)/sqrt(2).
    """
    alpha1 = alpha if alpha1 is None else alpha1
    minus = coherent_state(-beta, cutoff)
    plus = coherent_state(beta, cutoff)
    prefactor = (
        scs_normalization("even", beta) * displacement_weight(alpha) * displacement_weight(alpha1)
    )
    cutoffs = (cutoff, 1, 1, herald_cutoff, herald_cutoff)

    amplitudes: dict[tuple[int, ...], complex] = {}
    for n in range(herald_cutoff + 1):
        for m in range(herald_cutoff + 1):
            zero = coeff(0, n, alpha) * coeff(1, m, alpha1) / math.sqrt(2)
            one = coeff(1, n, alpha) * coeff(0, m, alpha1) / math.sqrt(2)
            sign = (-1) ** n
            for coherent, rails in ((minus, (zero, one)), (plus, (sign * zero, -sign * one))):
                for (k,), amp in coherent.amplitudes.items():
                    for bob, rail in zip((DUAL_RAIL_ZERO, DUAL_RAIL_ONE), rails, strict=True):
                        key = (k, *bob, n, m)
                        amplitudes[key] = amplitudes.get(key, 0j) + prefactor * amp * rail
    return FockState(cutoffs, amplitudes).pruned().normalized()


def ideal_heralded_channels(
    beta: float,
    alpha: float,
    cutoff: int = DEFAULT_CUTOFF,
    herald_max: int = DEFAULT_HERALD_MAX,
) -> list[HeraldedChannel]:
    """Herald table of the ideal-displacement limit, corrected with H then Z^n5."""
    state = ideal_generation_state(beta, alpha, cutoff)
    target = build_channel(beta, cutoff).state
    heralds = []
    for herald, branch in fock_branches(state, (3, 4)).items():
        if max(herald) > herald_max:
            continue
        probability = branch.norm() ** 2
        if probability < UNDERFLOW_PROBABILITY:
            heralds.append(_underflow(herald, probability))
            continue
        corrected = apply_dual_rail_gate(branch.normalized(), (1, 2), _correction(herald))
        rho = DensityOperator.from_state(corrected)
        heralds.append(
            HeraldedChannel(
                herald=herald,
                probability=probability,
                state=rho,
                fidelity=rho.expectation(target),
                balanced=herald in BALANCED_HERALDS,
            )
        )
    return heralds


def circuit_fidelity_with_ideal(cfg: GenerationConfig) -> float:
    """Fidelity of the exact circuit output, ancilla traced, with the ideal state."""
    herald_cutoff = min(GENERATION_CUTOFF, cfg.cutoff)
    ideal = ideal_generation_state(
        cfg.beta, cfg.alpha, cfg.cutoff, alpha1=cfg.alpha1, herald_cutoff=herald_cutoff
    )
    dims = (cfg.cutoff + 1, herald_cutoff + 1, herald_cutoff + 1)

    remainder = np.zeros(cfg.cutoff + 1, dtype=complex)
    norm_squared = 0.0
    for bob, coherent, ancilla in _propagated_terms(cfg):
        target = np.zeros(dims, dtype=complex)
        for (k, b3, b4, n5, n6), amp in ideal.amplitudes.items():
            if (b3, b4) == bob:
                target[k, n5, n6] = amp
        mode15 = coherent.to_vector().reshape(cfg.cutoff + 1, cfg.cutoff + 1)
        mode26 = ancilla.to_vector().reshape(cfg.cutoff + 1, cfg.cutoff + 1)
        norm_squared += 0.5 * np.vdot(mode15, mode15).real * np.vdot(mode26, mode26).real
        remainder += np.einsum(
            "abc,ab,dc->d",
            target.conj(),
            mode15[:, : herald_cutoff + 1],
            mode26[:, : herald_cutoff + 1],
        ) / math.sqrt(2)
    return min(1.0, float(np.vdot(remainder, remainder).real) / norm_squared)
