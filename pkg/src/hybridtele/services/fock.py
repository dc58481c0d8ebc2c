"""Truncated multimode Fock-space states and density operators.

States are stored sparsely: a mapping from occupation tuples to complex
amplitudes. Dense matrices are only built for density operators.
"""

import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from hybridtele.constants import (
    NEGATIVE_PROBABILITY_SLACK,
    PROBABILITY_SLACK,
    PRUNE_TOLERANCE,
    TAIL_TOLERANCE,
    UNDERFLOW_PROBABILITY,
)
from hybridtele.errors import CutoffError, ProbabilityError, ShapeMismatchError
from hybridtele.log import get_logger

logger = get_logger(__name__)

Occupation = tuple[int, ...]


@dataclass(frozen=True)
class FockState:
    """Pure state on truncated bosonic modes.

    Attributes:
        cutoffs: Maximum photon number per mode (inclusive).
        amplitudes: Occupation tuple -> complex amplitude. Missing keys are zero.
    """

    cutoffs: tuple[int, ...]
    amplitudes: Mapping[Occupation, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cutoffs = tuple(int(c) for c in self.cutoffs)
        if not cutoffs or any(c < 0 for c in cutoffs):
            raise ValueError(f"Invalid cutoffs: {self.cutoffs}")
        amplitudes: dict[Occupation, complex] = {}
        for occ, amp in self.amplitudes.items():
            if len(occ) != len(cutoffs):
                raise ShapeMismatchError(f"Occupation {occ} does not match {len(cutoffs)} modes")
            if any(n < 0 or n > c for n, c in zip(occ, cutoffs, strict=True)):
                raise ValueError(f"Occupation {occ} exceeds cutoffs {cutoffs}")
            if amp != 0:
                amplitudes[tuple(occ)] = complex(amp)
        object.__setattr__(self, "cutoffs", cutoffs)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def basis(cls, cutoffs: Sequence[int], occupation: Sequence[int]) -> "FockState":
        """Number state |n_1, ..., n_M> with unit amplitude."""
        return cls(tuple(cutoffs), {tuple(occupation): 1.0})

    @classmethod
    def vacuum(cls, cutoffs: Sequence[int]) -> "FockState":
        """All modes empty."""
        return cls.basis(cutoffs, (0,) * len(cutoffs))

    @classmethod
    def from_vector(cls, vector: Sequence[complex] | NDArray[np.complex128]) -> "FockState":
        """Single-mode state from amplitudes indexed by photon number."""
        values = np.asarray(vector, dtype=complex)
        return cls((len(values) - 1,), {(n,): amp for n, amp in enumerate(values)})

    @property
    def mode_count(self) -> int:
        return len(self.cutoffs)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c + 1 for c in self.cutoffs)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def normalized(self) -> "FockState":
        """Return the state scaled to unit norm.

        Raises:
            ProbabilityError: If the state has zero norm.
        """
        norm = self.norm()
        if norm == 0:
            raise ProbabilityError("Cannot normalize a zero state")
        return self * (1.0 / norm)

    def pruned(self, tolerance: float = PRUNE_TOLERANCE) -> "FockState":
        """Drop amplitudes with magnitude below tolerance."""
        kept = {occ: a for occ, a in self.amplitudes.items() if abs(a) >= tolerance}
        return FockState(self.cutoffs, kept)

    def truncated(self, cutoffs: Sequence[int], tolerance: float = TAIL_TOLERANCE) -> "FockState":
        """Restrict the state to smaller (or equal) cutoffs.

        Raises:
            CutoffError: If the weight outside the new cutoffs exceeds tolerance.
        """
        cutoffs = tuple(int(c) for c in cutoffs)
        if len(cutoffs) != self.mode_count:
            raise ShapeMismatchError(f"Cutoffs {cutoffs} do not match {self.mode_count} modes")
        kept: dict[Occupation, complex] = {}
        dropped = 0.0
        for occ, amp in self.amplitudes.items():
            if all(n <= c for n, c in zip(occ, cutoffs, strict=True)):
                kept[occ] = amp
            else:
                dropped += abs(amp) ** 2
        if dropped > tolerance:
            raise CutoffError(
                f"Truncating {self.cutoffs} to {cutoffs} would drop weight {dropped:.3e}"
            )
        if dropped:
            logger.debug("Truncation to %s dropped weight %.3e", cutoffs, dropped)
        return FockState(cutoffs, kept)

    def amplitude(self, occupation: Sequence[int]) -> complex:
        return self.amplitudes.get(tuple(occupation), 0j)

    def max_occupation(self, mode: int) -> int:
        """Highest photon number carrying amplitude in the given mode."""
        return max((occ[mode] for occ in self.amplitudes), default=0)

    def to_vector(self) -> NDArray[np.complex128]:
        """Dense amplitude vector over the full occupation grid (C order)."""
        vector = np.zeros(math.prod(self.dims), dtype=complex)
        for occ, amp in self.amplitudes.items():
            vector[np.ravel_multi_index(occ, self.dims)] = amp
        return vector

    def __add__(self, other: "FockState") -> "FockState":
        _check_shapes(self, other)
        result = dict(self.amplitudes)
        for occ, amp in other.amplitudes.items():
            result[occ] = result.get(occ, 0j) + amp
        return FockState(self.cutoffs, result)

    def __sub__(self, other: "FockState") -> "FockState":
        return self + other * -1.0

    def __mul__(self, scalar: complex) -> "FockState":
        return FockState(self.cutoffs, {occ: a * scalar for occ, a in self.amplitudes.items()})

    __rmul__ = __mul__


@dataclass(frozen=True)
class DensityOperator:
    """Density operator on truncated modes, dense over the occupation grid."""

    cutoffs: tuple[int, ...]
    matrix: NDArray[np.complex128]

    def __post_init__(self) -> None:
        cutoffs = tuple(int(c) for c in self.cutoffs)
        dim = math.prod(c + 1 for c in cutoffs)
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (dim, dim):
            raise ShapeMismatchError(
                f"Matrix shape {matrix.shape} does not match cutoffs {cutoffs}"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "cutoffs", cutoffs)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_state(cls, state: FockState) -> "DensityOperator":
        """Projector |psi><psi| of a pure state."""
        vector = state.to_vector()
        return cls(state.cutoffs, np.outer(vector, vector.conj()))

    @property
    def mode_count(self) -> int:
        return len(self.cutoffs)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c + 1 for c in self.cutoffs)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def purity(self) -> float:
        """Tr(rho^2) / Tr(rho)^2."""
        return float(np.real(np.trace(self.matrix @ self.matrix))) / self.trace**2

    def eigenvalues(self) -> NDArray[np.float64]:
        return np.linalg.eigvalsh(self.matrix)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, atol=atol))

    def normalized(self) -> "DensityOperator":
        trace = self.trace
        if trace <= 0:
            raise ProbabilityError("Cannot normalize an operator with non-positive trace")
        return DensityOperator(self.cutoffs, self.matrix / trace)

    def element(self, row: Sequence[int], col: Sequence[int]) -> complex:
        """Matrix element <row|rho|col> for two occupation tuples."""
        i = np.ravel_multi_index(tuple(row), self.dims)
        j = np.ravel_multi_index(tuple(col), self.dims)
        return complex(self.matrix[i, j])

    def block(self, occupations: Sequence[Occupation]) -> NDArray[np.complex128]:
        """Submatrix restricted to the listed basis occupations."""
        index = [np.ravel_multi_index(occ, self.dims) for occ in occupations]
        return np.array(self.matrix[np.ix_(index, index)])

    def expectation(self, state: FockState) -> float:
        """<psi|rho|psi> for a pure state on the same modes."""
        if state.cutoffs != self.cutoffs:
            raise ShapeMismatchError(f"Cutoffs differ: {state.cutoffs} vs {self.cutoffs}")
        vector = state.to_vector()
        return float(np.real(vector.conj() @ self.matrix @ vector))


@dataclass(frozen=True)
class Projector:
    """Single-mode measurement operator.

    Either a rank-one projector |v><v| (``vector`` set), its complement
    I - |v><v| (``complement`` true), or a photon-number parity projector.
    """

    name: str
    vector: Mapping[int, complex] | None = None
    complement: bool = False
    parity: int | None = None

    @property
    def rank_one(self) -> bool:
        return self.vector is not None and not self.complement


@dataclass(frozen=True)
class ProjectionResult:
    """Outcome of projecting some modes of a state.

    Attributes:
        probability: Squared norm of the projected component, clamped to [0, 1].
        post_state: Renormalized conditional state. None on underflow or when
            every mode was measured by a rank-one projector.
        modes: Original mode indices carried by post_state. Rank-one projectors
            remove their mode; higher-rank projectors keep it.
    """

    probability: float
    post_state: FockState | None
    modes: tuple[int, ...]
    underflow: bool = False


def number_projector(n: int) -> Projector:
    """Number-state projector |n><n|."""
    if n < 0:
        raise ValueError(f"Photon number must be non-negative, got {n}")
    return Projector(name=f"number-{n}", vector={n: 1.0})


def parity_projector(parity: int) -> Projector:
    """Photon-number parity projector (0 = even, 1 = odd)."""
    if parity not in (0, 1):
        raise ValueError(f"Parity must be 0 or 1, got {parity}")
    return Projector(name="parity-even" if parity == 0 else "parity-odd", parity=parity)


APD_OFF = Projector(name="apd-off", vector={0: 1.0})
APD_ON = Projector(name="apd-on", vector={0: 1.0}, complement=True)


def named_projector(
    name: str, n: int | None = None, beta: float | None = None, cutoff: int | None = None
) -> Projector:
    """Look up a single-mode projector by name.

    Args:
        name: One of number, apd-off, apd-on, parity-even, parity-odd,
            scs-even, scs-odd.
        n: Photon number for the number projector.
        beta: Amplitude for the SCS projectors.
        cutoff: Truncation for the SCS projectors.

    Raises:
        ValueError: If the name is unknown or a parameter is missing.
    """
    if name == "number":
        if n is None:
            raise ValueError("Number projector needs a photon number")
        return number_projector(n)
    if name in ("scs-even", "scs-odd"):
        if beta is None or cutoff is None:
            raise ValueError(f"Projector {name} needs beta and cutoff")
        from hybridtele.services.displaced import scs_projector

        return scs_projector(name.removeprefix("scs-"), beta, cutoff)
    named = {
        "apd-off": APD_OFF,
        "apd-on": APD_ON,
        "parity-even": parity_projector(0),
        "parity-odd": parity_projector(1),
    }
    if name not in named:
        raise ValueError(f"Unknown projector: {name}")
    return named[name]


def _check_shapes(a: FockState, b: FockState) -> None:
    if a.cutoffs != b.cutoffs:
        raise ShapeMismatchError(f"Cutoffs differ: {a.cutoffs} vs {b.cutoffs}")


def _drop(occ: Occupation, mode: int) -> Occupation:
    return occ[:mode] + occ[mode + 1 :]


def tensor(a: FockState, b: FockState) -> FockState:
    """Tensor product a (x) b; the modes of b follow the modes of a."""
    amplitudes = {
        occ_a + occ_b: amp_a * amp_b
        for occ_a, amp_a in a.amplitudes.items()
        for occ_b, amp_b in b.amplitudes.items()
    }
    return FockState(a.cutoffs + b.cutoffs, amplitudes)


def tensor_all(states: Iterable[FockState]) -> FockState:
    """Tensor product of several states, in order."""
    result: FockState | None = None
    for state in states:
        result = state if result is None else tensor(result, state)
    if result is None:
        raise ValueError("tensor_all needs at least one state")
    return result


def inner(a: FockState, b: FockState) -> complex:
    """Inner product <a|b>, conjugate-linear in a."""
    _check_shapes(a, b)
    small, large = (a, b) if len(a.amplitudes) <= len(b.amplitudes) else (b, a)
    total = 0j
    for occ, amp in small.amplitudes.items():
        other = large.amplitudes.get(occ)
        if other is not None:
            total += amp.conjugate() * other if small is a else other.conjugate() * amp
    return total


def state_fidelity(a: FockState, b: FockState) -> float:
    """|<a|b>|^2 for normalized states (norms are divided out)."""
    overlap = inner(a, b)
    denominator = (a.norm() * b.norm()) ** 2
    if denominator == 0:
        raise ProbabilityError("Fidelity with a zero state is undefined")
    return min(1.0, abs(overlap) ** 2 / denominator)


def permute(state: FockState, order: Sequence[int]) -> FockState:
    """Reorder modes: new mode k is old mode order[k]."""
    if sorted(order) != list(range(state.mode_count)):
        raise ValueError(f"Invalid mode order {order} for {state.mode_count} modes")
    cutoffs = tuple(state.cutoffs[m] for m in order)
    amplitudes = {tuple(occ[m] for m in order): a for occ, a in state.amplitudes.items()}
    return FockState(cutoffs, amplitudes)


def _apply_projector(
    amplitudes: dict[Occupation, complex], cutoff: int, mode: int, projector: Projector
) -> dict[Occupation, complex]:
    if projector.parity is not None:
        return {occ: a for occ, a in amplitudes.items() if occ[mode] % 2 == projector.parity}

    vector = projector.vector or {}
    groups: dict[Occupation, dict[int, complex]] = defaultdict(dict)
    for occ, amp in amplitudes.items():
        groups[_drop(occ, mode)][occ[mode]] = amp

    result: dict[Occupation, complex] = {}
    for rest, column in groups.items():
        overlap = sum(vector.get(k, 0).conjugate() * a for k, a in column.items())
        if projector.rank_one:
            if overlap != 0:
                result[rest] = overlap
            continue
        for k in set(column) | {k for k in vector if k <= cutoff}:
            value = column.get(k, 0j) - vector.get(k, 0) * overlap
            if value != 0:
                result[rest[:mode] + (k,) + rest[mode:]] = value
    return result


def project(
    state: FockState,
    modes: Sequence[int],
    outcome: Occupation | Projector | Sequence[Projector],
) -> ProjectionResult:
    """Project the given modes onto a measurement outcome.

    Args:
        state: State to measure (assumed normalized).
        modes: Measured mode indices.
        outcome: Occupation tuple (one number per mode), a single projector
            for a single mode, or one projector per mode.

    Returns:
        ProjectionResult with the outcome probability and conditional state.

    Raises:
        ProbabilityError: If the raw probability exceeds 1 beyond roundoff.
    """
    modes = tuple(modes)
    if any(m < 0 or m >= state.mode_count for m in modes) or len(set(modes)) != len(modes):
        raise ValueError(f"Invalid modes {modes} for {state.mode_count}-mode state")

    if isinstance(outcome, Projector):
        projectors = [outcome]
    elif all(isinstance(o, Projector) for o in outcome):
        projectors = list(outcome)  # type: ignore[arg-type]
    else:
        projectors = [number_projector(int(n)) for n in outcome]  # type: ignore[arg-type]
    if len(projectors) != len(modes):
        raise ValueError(f"Need one outcome per measured mode, got {len(projectors)}")

    remaining = list(range(state.mode_count))
    cutoffs = list(state.cutoffs)
    amplitudes = dict(state.amplitudes)
    for mode, projector in zip(modes, projectors, strict=True):
        position = remaining.index(mode)
        amplitudes = _apply_projector(amplitudes, cutoffs[position], position, projector)
        if projector.rank_one:
            remaining.pop(position)
            cutoffs.pop(position)

    probability = sum(abs(a) ** 2 for a in amplitudes.values())
    if probability > 1 + PROBABILITY_SLACK:
        raise ProbabilityError(f"Outcome probability {probability} exceeds 1")
    probability = min(1.0, probability)

    if probability < UNDERFLOW_PROBABILITY:
        logger.debug("Projection underflow: probability %.3e", probability)
        return ProjectionResult(probability, None, tuple(remaining), underflow=True)
    if not remaining:
        return ProjectionResult(probability, None, ())
    post = FockState(tuple(cutoffs), amplitudes) * (1.0 / math.sqrt(probability))
    return ProjectionResult(probability, post, tuple(remaining))


def fock_branches(state: FockState, modes: Sequence[int]) -> dict[Occupation, FockState]:
    """Split a state by the photon numbers found in the given modes.

    Returns:
        Occupation of the measured modes -> unnormalized conditional state on
        the remaining modes. The squared norms are the outcome probabilities.
    """
    modes = tuple(modes)
    keep = [m for m in range(state.mode_count) if m not in modes]
    if not keep:
        raise ValueError("fock_branches needs at least one unmeasured mode")
    cutoffs = tuple(state.cutoffs[m] for m in keep)
    grouped: dict[Occupation, dict[Occupation, complex]] = defaultdict(dict)
    for occ, amp in state.amplitudes.items():
        grouped[tuple(occ[m] for m in modes)][tuple(occ[m] for m in keep)] = amp
    return {herald: FockState(cutoffs, amps) for herald, amps in sorted(grouped.items())}


def reduced_density(state: FockState, keep_modes: Sequence[int]) -> DensityOperator:
    """Partial trace of a pure state, keeping the listed modes in order.

    The result is not renormalized: its trace is the squared norm of state.
    """
    keep = tuple(keep_modes)
    if not keep:
        raise ValueError("keep_modes must not be empty")
    rest_modes = [m for m in range(state.mode_count) if m not in keep]
    cutoffs = tuple(state.cutoffs[m] for m in keep)
    dims = tuple(c + 1 for c in cutoffs)

    rest_index: dict[Occupation, int] = {}
    entries = []
    for occ, amp in state.amplitudes.items():
        rest = tuple(occ[m] for m in rest_modes)
        column = rest_index.setdefault(rest, len(rest_index))
        row = np.ravel_multi_index(tuple(occ[m] for m in keep), dims)
        entries.append((row, column, amp))

    amplitude_matrix = np.zeros((math.prod(dims), max(len(rest_index), 1)), dtype=complex)
    for row, column, amp in entries:
        amplitude_matrix[row, column] = amp
    return DensityOperator(cutoffs, amplitude_matrix @ amplitude_matrix.conj().T)


def partial_trace(rho: DensityOperator, keep_modes: Sequence[int]) -> DensityOperator:
    """Trace out every mode not listed; kept modes stay in ascending order."""
    keep = sorted(set(keep_modes))
    if not keep:
        raise ValueError("keep_modes must not be empty")
    if any(m < 0 or m >= rho.mode_count for m in keep):
        raise ValueError(f"Invalid modes {keep_modes} for {rho.mode_count}-mode operator")

    tensor_form = rho.matrix.reshape(rho.dims + rho.dims)
    count = rho.mode_count
    for mode in reversed(range(rho.mode_count)):
        if mode in keep:
            continue
        tensor_form = np.trace(tensor_form, axis1=mode, axis2=mode + count)
        count -= 1

    cutoffs = tuple(rho.cutoffs[m] for m in keep)
    dim = math.prod(c + 1 for c in cutoffs)
    return DensityOperator(cutoffs, tensor_form.reshape(dim, dim))


def partial_inner(target: FockState, joint: FockState) -> FockState:
    """Contract target against the leading modes of joint.

    Returns:
        Unnormalized state on the trailing modes of joint, <target|joint>.
    """
    lead = target.mode_count
    if joint.cutoffs[:lead] != target.cutoffs:
        raise ShapeMismatchError(
            f"Target cutoffs {target.cutoffs} do not match leading {joint.cutoffs[:lead]}"
        )
    if joint.mode_count == lead:
        raise ValueError("joint must carry modes beyond the target")
    result: dict[Occupation, complex] = defaultdict(complex)
    for occ, amp in joint.amplitudes.items():
        weight = target.amplitudes.get(occ[:lead])
        if weight is not None:
            result[occ[lead:]] += weight.conjugate() * amp
    return FockState(joint.cutoffs[lead:], result)


def reduced_fidelity(target: FockState, joint: FockState) -> float:
    """Fidelity of a pure target with the reduced state of joint's leading modes."""
    remainder = partial_inner(target, joint)
    denominator = (target.norm() * joint.norm()) ** 2
    return min(1.0, remainder.norm() ** 2 / denominator)


def entanglement_entropy(rho: DensityOperator) -> float:
    """Von Neumann entropy in bits of a (renormalized) density operator."""
    evals = rho.normalized().eigenvalues()
    if evals.min() < -NEGATIVE_PROBABILITY_SLACK:
        raise ProbabilityError(f"Density operator has negative eigenvalue {evals.min()}")
    evals = evals[evals > 1e-15]
    return float(-np.sum(evals * np.log2(evals)))
