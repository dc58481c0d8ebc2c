"""Qubit amplitude pairs in single-rail and dual-rail encodings."""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from hybridtele.constants import NORM_TOLERANCE
from hybridtele.errors import ProbabilityError
from hybridtele.services.fock import FockState

Basis = Literal["single-rail", "dual-rail"]

# Dual-rail occupations: a0 sits on |01>, a1 on |10>.
DUAL_RAIL_ZERO = (0, 1)
DUAL_RAIL_ONE = (1, 0)


@dataclass(frozen=True)
class Qubit:
    """Amplitude pair (a0, a1) with its optical encoding.

    Attributes:
        a0: Amplitude of |0> (single-rail) or |01> (dual-rail).
        a1: Amplitude of |1> (single-rail) or |10> (dual-rail).
        basis: Encoding tag.
    """

    a0: complex
    a1: complex
    basis: Basis = "single-rail"

    def __post_init__(self) -> None:
        if self.basis not in ("single-rail", "dual-rail"):
            raise ValueError(f"Unknown qubit basis: {self.basis}")
        object.__setattr__(self, "a0", complex(self.a0))
        object.__setattr__(self, "a1", complex(self.a1))

    @classmethod
    def from_vector(cls, vector: NDArray[np.complex128], basis: Basis = "single-rail") -> "Qubit":
        return cls(complex(vector[0]), complex(vector[1]), basis)

    @property
    def vector(self) -> NDArray[np.complex128]:
        return np.array([self.a0, self.a1], dtype=complex)

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.a0) ** 2 + abs(self.a1) ** 2)

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm - 1) <= NORM_TOLERANCE

    def normalized(self) -> "Qubit":
        norm = self.norm
        if norm == 0:
            raise ProbabilityError("Cannot normalize a zero qubit")
        return Qubit(self.a0 / norm, self.a1 / norm, self.basis)

    def with_basis(self, basis: Basis) -> "Qubit":
        return Qubit(self.a0, self.a1, basis)

    def orthogonal(self) -> "Qubit":
        """The orthogonal partner (a1*, -a0*)."""
        return Qubit(self.a1.conjugate(), -self.a0.conjugate(), self.basis)

    def inner(self, other: "Qubit") -> complex:
        return complex(np.vdot(self.vector, other.vector))

    def fidelity(self, other: "Qubit") -> float:
        """Overlap |<self|other>|^2 of the normalized qubits; global phase drops out.

        The basis tag is not compared.
        """
        overlap = abs(self.inner(other)) ** 2 / (self.norm**2 * other.norm**2)
        return min(1.0, overlap)

    def ratio_phase(self) -> float | None:
        """arg(a1 / a0), None when either amplitude vanishes."""
        if self.a0 == 0 or self.a1 == 0:
            return None
        return float(np.angle(self.a1 / self.a0))


def random_qubit(rng: np.random.Generator, basis: Basis = "single-rail") -> Qubit:
    """Haar-distributed qubit drawn from rng."""
    values = rng.normal(size=2) + 1j * rng.normal(size=2)
    return Qubit.from_vector(values / np.linalg.norm(values), basis)


def single_rail_state(qubit: Qubit, cutoff: int = 1) -> FockState:
    """a0|0> + a1|1> on one mode."""
    return FockState((cutoff,), {(0,): qubit.a0, (1,): qubit.a1})


def dual_rail_state(qubit: Qubit, cutoffs: tuple[int, int] = (1, 1)) -> FockState:
    """a0|01> + a1|10> on two modes."""
    return FockState(cutoffs, {DUAL_RAIL_ZERO: qubit.a0, DUAL_RAIL_ONE: qubit.a1})
