"""Linear-optics unitaries on truncated Fock states.

Beam-splitter convention on creation operators (mode i first):

    a_i^+ -> t a_i^+ - r a_j^+
    a_j^+ -> r a_i^+ + t a_j^+

so coherent inputs |a>_i |b>_j leave as |a t + b r>_i |b t - a r>_j.
"""

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import expm
from scipy.special import gammaln

from hybridtele.constants import (
    DEFAULT_CUTOFF,
    DISPLACEMENT_MARGIN,
    EXPM_PADDING,
    PRUNE_TOLERANCE,
)
from hybridtele.errors import BasisError, CutoffError
from hybridtele.log import get_logger
from hybridtele.services.displaced import coherent_state
from hybridtele.services.fock import FockState, reduced_fidelity, tensor
from hybridtele.services.qubit import DUAL_RAIL_ONE, DUAL_RAIL_ZERO, Qubit

logger = get_logger(__name__)


@dataclass(frozen=True)
class BeamSplitterSpec:
    """Two-mode beam splitter with real transmittance t and reflectance r."""

    t: float
    r: float
    modes: tuple[int, int] = (0, 1)

    def __post_init__(self) -> None:
        if abs(self.t**2 + self.r**2 - 1) > 1e-14:
            raise ValueError(f"t^2 + r^2 must equal 1, got t={self.t}, r={self.r}")
        if self.modes[0] == self.modes[1]:
            raise ValueError(f"Beam splitter needs two distinct modes, got {self.modes}")

    @classmethod
    def from_transmittance(cls, t: float, modes: tuple[int, int] = (0, 1)) -> "BeamSplitterSpec":
        if not 0 < t <= 1:
            raise ValueError(f"Transmittance must lie in (0, 1], got {t}")
        return cls(t=t, r=math.sqrt(1 - t**2), modes=modes)

    @classmethod
    def balanced(cls, modes: tuple[int, int] = (0, 1)) -> "BeamSplitterSpec":
        return cls.from_transmittance(math.sqrt(0.5), modes)

    def inverse(self) -> "BeamSplitterSpec":
        return BeamSplitterSpec(t=self.t, r=-self.r, modes=self.modes)


@lru_cache(maxsize=4096)
def _block_unitary(total: int, t: float, r: float) -> NDArray[np.float64]:
    """Beam-splitter matrix on the fixed-N block, indexed by photons in mode i."""
    block = np.zeros((total + 1, total + 1))
    for k in range(total + 1):
        for p in range(total + 1):
            value = 0.0
            for p1 in range(max(0, p - (total - k)), min(k, p) + 1):
                p2 = p - p1
                value += (
                    math.comb(k, p1)
                    * math.comb(total - k, p2)
                    * t ** (p1 + total - k - p2)
                    * (-r) ** (k - p1)
                    * r**p2
                )
            scale = 0.5 * (
                gammaln(p + 1) + gammaln(total - p + 1) - gammaln(k + 1) - gammaln(total - k + 1)
            )
            block[p, k] = value * math.exp(scale)
    block.setflags(write=False)
    return block


def apply_beam_splitter(state: FockState, bs: BeamSplitterSpec) -> FockState:
    """Apply the beam splitter to its two modes.

    Photon number in the mode pair is conserved block by block, so the
    output is exact. Where photons bunch above a mode's cutoff, that cutoff
    grows to the highest occupation carrying amplitude; use
    FockState.truncated to return to a fixed shape.
    """
    i, j = bs.modes
    if not (0 <= i < state.mode_count and 0 <= j < state.mode_count):
        raise ValueError(f"Beam-splitter modes {bs.modes} out of range")
    if bs.t == 1:
        return state

    blocks: dict[tuple, dict[int, complex]] = defaultdict(dict)
    for occ, amp in state.amplitudes.items():
        rest = tuple(-1 if m in (i, j) else n for m, n in enumerate(occ))
        blocks[(rest, occ[i] + occ[j])][occ[i]] = amp

    result: dict[tuple[int, ...], complex] = defaultdict(complex)
    for (rest, total), column in blocks.items():
        vector = np.zeros(total + 1, dtype=complex)
        for k, amp in column.items():
            vector[k] = amp
        output = _block_unitary(total, bs.t, bs.r) @ vector
        for p, amp in enumerate(output):
            if abs(amp) < PRUNE_TOLERANCE:
                continue
            occ = list(rest)
            occ[i], occ[j] = p, total - p
            result[tuple(occ)] += amp

    cutoffs = list(state.cutoffs)
    for m in (i, j):
        cutoffs[m] = max(cutoffs[m], max((occ[m] for occ in result), default=0))
    if tuple(cutoffs) != state.cutoffs:
        logger.debug("Beam splitter %s widened cutoffs %s -> %s", bs.modes, state.cutoffs, cutoffs)
    return FockState(tuple(cutoffs), result).pruned()


@lru_cache(maxsize=256)
def displacement_matrix(alpha: complex, cutoff: int) -> NDArray[np.complex128]:
    """<m|D(alpha)|n> for m, n <= cutoff from a padded matrix exponential."""
    dim = cutoff + 1 + EXPM_PADDING
    lowering = np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)
    generator = alpha * lowering.conj().T - np.conj(alpha) * lowering
    matrix = expm(generator)[: cutoff + 1, : cutoff + 1]
    matrix.setflags(write=False)
    return matrix


def apply_displacement(state: FockState, mode: int, alpha: complex) -> FockState:
    """Apply D(alpha) to one mode.

    Raises:
        CutoffError: If fewer than DISPLACEMENT_MARGIN levels lie above the
            occupied support of the mode.
    """
    if alpha == 0:
        return state
    cutoff = state.cutoffs[mode]
    occupied = state.max_occupation(mode)
    if occupied + DISPLACEMENT_MARGIN > cutoff:
        raise CutoffError(
            f"Mode {mode} occupies up to {occupied} photons; cutoff {cutoff} leaves "
            f"less than {DISPLACEMENT_MARGIN} free levels"
        )

    matrix = displacement_matrix(complex(alpha), cutoff)
    columns: dict[tuple[int, ...], NDArray[np.complex128]] = {}
    for occ, amp in state.amplitudes.items():
        rest = occ[:mode] + occ[mode + 1 :]
        if rest not in columns:
            columns[rest] = np.zeros(cutoff + 1, dtype=complex)
        columns[rest][occ[mode]] += amp

    result: dict[tuple[int, ...], complex] = {}
    for rest, vector in columns.items():
        for n, amp in enumerate(matrix @ vector):
            if amp != 0:
                result[rest[:mode] + (n,) + rest[mode:]] = amp
    return FockState(state.cutoffs, result).pruned()


def htbs_displace(
    state: FockState,
    target_gamma: complex,
    t: float,
    *,
    mode: int = 0,
    ancilla_cutoff: int = DEFAULT_CUTOFF,
) -> FockState:
    """Mix one mode with a strong coherent ancilla on a highly transmissive beam splitter.

    The ancilla |gamma / r> is appended as the last mode; for t -> 1 the
    system mode approaches D(gamma) applied to it. System modes keep their
    cutoffs, the ancilla cutoff grows with the photons reflected into it.

    Raises:
        CutoffError: If the ancilla amplitude is not representable at ancilla_cutoff,
            or the system mode gains weight above its cutoff.
    """
    bs = BeamSplitterSpec.from_transmittance(t, (mode, state.mode_count))
    if bs.r == 0:
        if target_gamma != 0:
            raise ValueError("A lossless beam splitter (t = 1) cannot displace")
        ancilla_amplitude = 0j
    else:
        ancilla_amplitude = complex(target_gamma) / bs.r
    ancilla = coherent_state(ancilla_amplitude, ancilla_cutoff)
    joint = apply_beam_splitter(tensor(state, ancilla), bs)
    return joint.truncated((*state.cutoffs, joint.cutoffs[-1]))


def htbs_mix(state: FockState, target_gamma: complex, t: float, *, mode: int = 0) -> FockState:
    """htbs_displace with the ancilla's own coherent amplitude removed.

    Mixing with |gamma / r> equals D(gamma) on the system mode and
    D(t gamma / r) on the ancilla applied after mixing with vacuum. The
    second factor acts on the ancilla alone and is dropped, so the ancilla
    only holds the photons reflected out of the system mode. Every statistic
    of the system modes matches htbs_displace, for any t close to 1. At
    t = 1 the result is D(gamma) on the mode next to an empty ancilla.
    """
    bs = BeamSplitterSpec.from_transmittance(t, (mode, state.mode_count))
    ancilla = FockState.vacuum((max(state.max_occupation(mode), 1),))
    mixed = apply_beam_splitter(tensor(state, ancilla), bs)
    return apply_displacement(mixed, mode, target_gamma)


def htbs_fidelity(
    state: FockState,
    target_gamma: complex,
    t: float,
    *,
    mode: int = 0,
    ancilla_cutoff: int = DEFAULT_CUTOFF,
) -> float:
    """Fidelity of the system modes after htbs_displace with D(gamma) applied directly."""
    target = apply_displacement(state, mode, target_gamma)
    joint = htbs_displace(state, target_gamma, t, mode=mode, ancilla_cutoff=ancilla_cutoff)
    return reduced_fidelity(target, joint)


@dataclass(frozen=True)
class DualRailGate:
    """Single-qubit gate on the dual-rail basis {|01>, |10>}."""

    kind: str
    matrix: NDArray[np.complex128]

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (2, 2):
            raise ValueError(f"Gate matrix must be 2x2, got {matrix.shape}")
        if not np.allclose(matrix.conj().T @ matrix, np.eye(2), atol=1e-14):
            raise ValueError(f"Gate {self.kind} is not unitary")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def __matmul__(self, other: "DualRailGate") -> "DualRailGate":
        return DualRailGate(f"{self.kind}*{other.kind}", self.matrix @ other.matrix)


def hadamard() -> DualRailGate:
    return DualRailGate("H", np.array([[1, 1], [1, -1]]) / math.sqrt(2))


def pauli_z() -> DualRailGate:
    return DualRailGate("Z", np.diag([1, -1]))


def z_power(k: int) -> DualRailGate:
    """Z^k; only the parity of k matters."""
    return pauli_z() if k % 2 else identity()


def phase(theta: float) -> DualRailGate:
    """Phase shift by theta on the |10> rail."""
    return DualRailGate(f"P({theta:g})", np.diag([1, np.exp(1j * theta)]))


def identity() -> DualRailGate:
    return DualRailGate("I", np.eye(2))


def dual_rail_apply(qubit: Qubit, gate: DualRailGate) -> Qubit:
    """Multiply the dual-rail amplitude pair by the gate matrix.

    Raises:
        BasisError: If the qubit is not dual-rail encoded.
    """
    if qubit.basis != "dual-rail":
        raise BasisError(f"Gate {gate.kind} needs a dual-rail qubit, got {qubit.basis}")
    return Qubit.from_vector(gate.matrix @ qubit.vector, "dual-rail")


def apply_dual_rail_gate(state: FockState, modes: tuple[int, int], gate: DualRailGate) -> FockState:
    """Apply a dual-rail gate to two modes inside a multimode state.

    Raises:
        BasisError: If the two modes carry anything but exactly one photon.
    """
    i, j = modes
    pairs: dict[tuple[int, ...], NDArray[np.complex128]] = {}
    for occ, amp in state.amplitudes.items():
        pair = (occ[i], occ[j])
        if pair == DUAL_RAIL_ZERO:
            slot = 0
        elif pair == DUAL_RAIL_ONE:
            slot = 1
        else:
            raise BasisError(f"Modes {modes} hold {pair}, outside the single-photon subspace")
        rest = tuple(-1 if m in modes else n for m, n in enumerate(occ))
        pairs.setdefault(rest, np.zeros(2, dtype=complex))[slot] += amp

    result: dict[tuple[int, ...], complex] = {}
    for rest, vector in pairs.items():
        for pair, amp in zip((DUAL_RAIL_ZERO, DUAL_RAIL_ONE), gate.matrix @ vector, strict=True):
            if amp == 0:
                continue
            occ = list(rest)
            occ[i], occ[j] = pair
            result[tuple(occ)] = amp
    return FockState(state.cutoffs, result)
