"""Displaced number states, superpositions of coherent states and modulation factors."""

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import comb, factorial

from hybridtele.constants import MAX_FACTORIAL, TAIL_TOLERANCE
from hybridtele.errors import CutoffError
from hybridtele.log import get_logger
from hybridtele.services.fock import FockState, Projector

logger = get_logger(__name__)

Parity = Literal["even", "odd"]

_FACTORIALS = factorial(np.arange(MAX_FACTORIAL + 1), exact=False)


def _factorial(n: int) -> float:
    if n > MAX_FACTORIAL:
        raise CutoffError(f"Photon number {n} exceeds the factorial table ({MAX_FACTORIAL})")
    return float(_FACTORIALS[n])


def displacement_weight(alpha: complex) -> float:
    """Common prefactor F = exp(-|alpha|^2 / 2) of displaced number states."""
    return math.exp(-abs(alpha) ** 2 / 2)


def coeff(l: int, n: int, alpha: complex) -> complex:  # noqa: E741
    """Displaced number-state coefficient c_ln(alpha).

    <n|D(alpha)|l> = F * c_ln(alpha), evaluated by the finite binomial sum
    with the falling factorial n!/(n-l+k)!.

    Args:
        l: Number state being displaced.
        n: Fock component.
        alpha: Displacement amplitude.

    Returns:
        Complex coefficient without the F prefactor.
    """
    if l < 0 or n < 0:
        raise ValueError(f"Photon numbers must be non-negative, got l={l}, n={n}")
    alpha = complex(alpha)
    total = 0j
    for k in range(l + 1):
        power = n - l + k
        if power < 0:
            continue
        term = comb(l, k, exact=True) * alpha**power * alpha.conjugate() ** k
        total += (-1) ** k * term * (_factorial(n) / _factorial(power))
    return total / math.sqrt(_factorial(l) * _factorial(n))


@dataclass(frozen=True)
class MatrixElement:
    """One coefficient c_ln(alpha) with its indices."""

    l: int  # noqa: E741
    n: int
    alpha: complex
    value: complex

    @property
    def probability(self) -> float:
        """|<n|D(alpha)|l>|^2, the weight of Fock component n."""
        return abs(displacement_weight(self.alpha) * self.value) ** 2


def matrix_element(l: int, n: int, alpha: complex) -> MatrixElement:  # noqa: E741
    return MatrixElement(l=l, n=n, alpha=complex(alpha), value=coeff(l, n, alpha))


def displaced_number_state(l: int, alpha: complex, cutoff: int) -> FockState:  # noqa: E741
    """D(alpha)|l> truncated at cutoff.

    Raises:
        CutoffError: If the weight beyond cutoff exceeds the tail tolerance.
    """
    weight = displacement_weight(alpha)
    amplitudes = {(n,): weight * coeff(l, n, alpha) for n in range(cutoff + 1)}
    tail = 1.0 - sum(abs(a) ** 2 for a in amplitudes.values())
    logger.debug("Displaced |%d, %s> tail weight at cutoff %d: %.3e", l, alpha, cutoff, tail)
    if tail > TAIL_TOLERANCE:
        raise CutoffError(f"Cutoff {cutoff} leaves tail weight {tail:.3e} for |{l}, {alpha}>")
    return FockState((cutoff,), amplitudes).normalized().pruned()


def coherent_state(alpha: complex, cutoff: int) -> FockState:
    """Coherent state |0, alpha>."""
    return displaced_number_state(0, alpha, cutoff)


def coherent_overlap(a: complex, b: complex) -> complex:
    """Closed-form overlap <0,a|0,b> of two coherent states."""
    a, b = complex(a), complex(b)
    return cmath.exp(-(abs(a) ** 2) / 2 - abs(b) ** 2 / 2 + a.conjugate() * b)


def scs_normalization(parity: Parity, beta: float) -> float:
    """Normalization N_+ (even) or N_- (odd) of N(|-beta> +/- |beta>)."""
    if beta <= 0:
        raise ValueError(f"SCS amplitude must be positive, got {beta}")
    if parity == "even":
        return (2 * (1 + math.exp(-2 * beta**2))) ** -0.5
    if parity == "odd":
        return (2 * -math.expm1(-2 * beta**2)) ** -0.5
    raise ValueError(f"Unknown SCS parity: {parity}")


@dataclass(frozen=True)
class SCSSpec:
    """Even or odd superposition of the coherent states |-beta> and |beta>."""

    parity: Parity
    beta: float

    @property
    def normalization(self) -> float:
        return scs_normalization(self.parity, self.beta)

    @property
    def parity_bit(self) -> int:
        return 0 if self.parity == "even" else 1

    def amplitude(self, n: int) -> float:
        """Real amplitude on |n>; zero for the wrong photon-number parity."""
        if n % 2 != self.parity_bit:
            return 0.0
        sign = 1.0 if self.parity == "even" else -1.0
        return (
            sign
            * 2
            * self.normalization
            * math.exp(-self.beta**2 / 2)
            * self.beta**n
            / math.sqrt(_factorial(n))
        )


def scs_state(parity: Parity, beta: float, cutoff: int) -> FockState:
    """N_+/-(|-beta> +/- |beta>) truncated at cutoff.

    Raises:
        CutoffError: If the neglected tail weight exceeds tolerance.
    """
    spec = SCSSpec(parity, beta)
    amplitudes = {(n,): spec.amplitude(n) for n in range(cutoff + 1)}
    tail = 1.0 - sum(a**2 for a in amplitudes.values())
    if tail > TAIL_TOLERANCE:
        raise CutoffError(f"Cutoff {cutoff} leaves tail weight {tail:.3e} for {parity} SCS")
    return FockState((cutoff,), amplitudes).normalized().pruned()


def scs_distribution(parity: Parity, n: int, beta: float) -> float:
    """Photon-number distribution of the even or odd SCS at n."""
    return SCSSpec(parity, beta).amplitude(n) ** 2


def scs_projector(parity: Parity, beta: float, cutoff: int) -> Projector:
    """Rank-one projector onto the even or odd SCS."""
    state = scs_state(parity, beta, cutoff)
    return Projector(
        name=f"scs-{parity}",
        vector={occ[0]: amp for occ, amp in state.amplitudes.items()},
    )


def modulation_factor(n: int, alpha: complex) -> complex:
    """Modulation factor A_n = (n - |alpha|^2) / alpha.

    Raises:
        ValueError: If alpha is zero.
    """
    if alpha == 0:
        raise ValueError("Modulation factor is undefined at alpha = 0")
    return (n - abs(alpha) ** 2) / complex(alpha)


@dataclass(frozen=True)
class ModulationFactors:
    """Modulation factor A_n with normalization N_n and outcome weight g_n."""

    n: int
    alpha: complex
    A_n: complex  # noqa: N815
    N_n: float  # noqa: N815
    g_n: complex


def modulation_factors(n: int, alpha: complex, a1_abs: float) -> ModulationFactors:
    """Evaluate A_n, N_n and g_n for a qubit with |a1| = a1_abs."""
    if not 0 <= a1_abs <= 1:
        raise ValueError(f"a1_abs must lie in [0, 1], got {a1_abs}")
    a_n = modulation_factor(n, alpha)
    norm = (1 + (abs(a_n) ** 2 - 1) * a1_abs**2) ** -0.5
    weight = displacement_weight(alpha) * complex(alpha) ** n
    weight /= 2 * norm * math.sqrt(_factorial(n))
    return ModulationFactors(n=n, alpha=complex(alpha), A_n=a_n, N_n=norm, g_n=weight)
