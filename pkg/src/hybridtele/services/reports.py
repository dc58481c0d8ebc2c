"""Figure data tables and their CSV output."""

import csv
import sys
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO, TypeVar

from hybridtele.constants import (
    COHERENT_ALPHA_GRID,
    DEFAULT_PRECISION,
    DISTRIBUTION_N_MAX,
    ORTHOGONALITY_TOLERANCE,
    SUM_TOLERANCE,
    SURFACE_A0,
    SURFACE_A1,
    SWAP_ALPHA_GRID,
)
from hybridtele.log import get_logger
from hybridtele.services.channel_gen import (
    GenerationConfig,
    complete_herald_probability,
    generate_channel,
    ideal_heralded_channels,
)
from hybridtele.services.config import SweepConfig
from hybridtele.services.demodulation import (
    Method,
    SuccessComparison,
    coherent_success_prob,
    swap_success_prob,
)
from hybridtele.services.qubit import Qubit
from hybridtele.services.teleport import (
    ProbabilityReport,
    am_success_probs,
    approximation_fidelity,
    direct_success_probs,
    orthogonal_scenario,
    rho_b_report,
)

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")

Row = tuple[object, ...]


def format_value(value: object, precision: int = DEFAULT_PRECISION) -> str:
    """Render one CSV cell; floats use `precision` significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{precision}g}"
    return str(value)


def evaluate_grid(func: Callable[[T], R], points: Sequence[T], workers: int = 1) -> list[R]:
    """Evaluate func at every grid point, results in grid order."""
    if workers <= 1 or len(points) <= 1:
        return [func(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, points))


@dataclass(frozen=True)
class Table:
    """CSV-ready table with the number of rows that breached a tolerance."""

    header: tuple[str, ...]
    rows: list[Row]
    flagged: int = 0


class ReportWriter:
    """Writes tables as comma-separated text.

    Output goes to `output_path` when set, else to stdout. Parent
    directories are created as needed.
    """

    def __init__(self, output_path: Path | str | None = None, precision: int = DEFAULT_PRECISION):
        self._output_path = Path(output_path) if output_path else None
        self._precision = precision

    @property
    def output_path(self) -> Path | None:
        return self._output_path

    def _write_rows(self, handle: TextIO, table: Table) -> None:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(table.header)
        for row in table.rows:
            writer.writerow(format_value(v, self._precision) for v in row)

    def write(self, table: Table) -> Path | None:
        """Write the table; returns the file written, None for stdout."""
        if self._output_path is None:
            self._write_rows(sys.stdout, table)
            return None
        self._output_path.parent.mkdir(parents=True, exist_ok=True)
        with self._output_path.open("w", newline="", encoding="utf-8") as handle:
            self._write_rows(handle, table)
        logger.info("Wrote %d rows to %s", len(table.rows), self._output_path)
        return self._output_path


def _grid(*axes: Iterable[T]) -> list[tuple[T, ...]]:
    points: list[tuple[T, ...]] = [()]
    for axis in axes:
        points = [(*p, v) for p in points for v in axis]
    return points


def surface_qubit() -> Qubit:
    return Qubit(SURFACE_A0, SURFACE_A1)


def fidelity_surface_table(cfg: SweepConfig) -> Table:
    """Approximation fidelity over the (alpha, t) grid for the surface qubit."""
    qubit = surface_qubit()
    points = _grid(cfg.alpha_grid, cfg.t_grid)
    values = evaluate_grid(lambda p: approximation_fidelity(p[0], p[1], qubit), points, cfg.workers)
    rows = [(alpha, t, fid) for (alpha, t), fid in zip(points, values, strict=True)]
    return Table(("alpha", "t", "fid"), rows)


def _distribution_table(cfg: SweepConfig, mod_index: int | None) -> Table:
    n_max = max(cfg.n_max, DISTRIBUTION_N_MAX)

    def distribution(point: tuple[float, float]) -> ProbabilityReport:
        alpha, a1_abs = point
        if mod_index is None:
            return direct_success_probs(alpha, a1_abs, n_max)
        return am_success_probs(mod_index, alpha, a1_abs, n_max)

    points = _grid(cfg.alpha_grid, cfg.a1_grid)
    rows: list[Row] = []
    flagged = 0
    for (alpha, a1_abs), report in zip(
        points, evaluate_grid(distribution, points, cfg.workers), strict=True
    ):
        if abs(report.tail) > SUM_TOLERANCE:
            logger.warning(
                "%s distribution at alpha=%s, a1=%s sums to %.12f",
                report.kind,
                alpha,
                a1_abs,
                report.total,
            )
            flagged += 1
        rows.extend((alpha, a1_abs, n, report.values[n]) for n in range(cfg.n_max + 1))
    return Table(("alpha", "a1_abs", "n", "P"), rows, flagged)


def direct_probs_table(cfg: SweepConfig) -> Table:
    """P_n for the unmodulated protocol, n = 0..n_max."""
    return _distribution_table(cfg, None)


def am_probs_table(cfg: SweepConfig, mod_index: int) -> Table:
    """P_nk for the protocol with mod-k pre-modulation, n = 0..n_max."""
    if mod_index not in (0, 1):
        raise ValueError(f"mod_index must be 0 or 1, got {mod_index}")
    return _distribution_table(cfg, mod_index)


def demod_alpha_grid(method: Method) -> tuple[float, ...]:
    """Alpha values plotted for each demodulation method."""
    return COHERENT_ALPHA_GRID if method == "coherent" else SWAP_ALPHA_GRID


def demod_table(cfg: SweepConfig, method: Method, which: tuple[int, ...] = (0, 1)) -> Table:
    """Closed-form and circuit success probabilities of one demodulation method."""
    solver = coherent_success_prob if method == "coherent" else swap_success_prob
    points = _grid(cfg.alpha_grid, cfg.a1_grid, which)

    def compare(point: tuple[float, float, int]) -> SuccessComparison:
        alpha, a1_abs, k = point
        return solver(k, alpha, a1_abs, cfg.beta)

    comparisons = evaluate_grid(compare, points, cfg.workers)
    rows = [
        (c.alpha, c.a1_abs, c.which, c.closed_form, c.oracle, c.abs_diff) for c in comparisons
    ]
    flagged = sum(c.flagged for c in comparisons)
    header = ("alpha", "a1_abs", "which", "p_closed_form", "p_oracle", "abs_diff")
    return Table(header, rows, flagged)


def rho_b_table(cfg: SweepConfig, qubit: Qubit) -> Table:
    """Bob's pre-message state for every alpha in the grid at the configured beta."""
    reports = evaluate_grid(
        lambda alpha: rho_b_report(alpha, cfg.beta, qubit, cfg.cutoff), cfg.alpha_grid, cfg.workers
    )
    rows: list[Row] = []
    for r in reports:
        circuit = None if r.circuit_offdiag is None else abs(r.circuit_offdiag)
        rows.append(
            (
                r.alpha,
                r.beta,
                r.diagonal[0],
                r.diagonal[1],
                r.offdiag_magnitude,
                abs(r.closed_form_offdiag),
                abs(r.corrected_offdiag),
                circuit,
                r.discrepancy,
                r.trace,
            )
        )
    header = (
        "alpha",
        "beta",
        "rho_01_01",
        "rho_10_10",
        "offdiag_abs",
        "closed_form_abs",
        "corrected_abs",
        "circuit_abs",
        "discrepancy",
        "trace",
    )
    # Published-form discrepancies are reported, not failed on.
    flagged = sum(abs(r.trace - 1) > SUM_TOLERANCE for r in reports)
    return Table(header, rows, flagged)


def channel_gen_table(cfg: SweepConfig, ideal: bool = False) -> Table:
    """Herald table of channel generation for every (alpha, t) with t < 1.

    With `ideal` the ideal-displacement limit at the configured beta is
    tabulated instead and the t column reads "ideal". An exact grid point is
    flagged when its complete herald set does not sum to 1.
    """
    rows: list[Row] = []
    flagged = 0
    if ideal:
        results = evaluate_grid(
            lambda alpha: ideal_heralded_channels(cfg.beta, alpha, cfg.cutoff),
            cfg.alpha_grid,
            cfg.workers,
        )
        for alpha, heralds in zip(cfg.alpha_grid, results, strict=True):
            rows.extend(
                (alpha, "ideal", *h.herald, h.probability, h.fidelity, h.balanced) for h in heralds
            )
    else:
        points = [(a, t) for a, t in _grid(cfg.alpha_grid, cfg.t_grid) if t < 1]
        configs = [GenerationConfig.from_alpha(a, t, cfg.cutoff) for a, t in points]
        results = evaluate_grid(generate_channel, configs, cfg.workers)
        for (alpha, t), config, heralds in zip(points, configs, results, strict=True):
            rows.extend(
                (alpha, t, *h.herald, h.probability, h.fidelity, h.balanced) for h in heralds
            )
            total = complete_herald_probability(config)
            if abs(total - 1) > SUM_TOLERANCE:
                logger.warning(
                    "Channel generation heralds at alpha=%s, t=%s sum to %.12f", alpha, t, total
                )
                flagged += 1
    header = ("alpha", "t", "n5", "n6", "probability", "fidelity", "balanced")
    return Table(header, rows, flagged)


def orthogonal_table(cfg: SweepConfig, pair: tuple[Qubit, Qubit]) -> Table:
    """Orthogonal-pair teleportation under the mod-0/mod-0 and mixed strategies.

    A row is flagged when the recovered pair is no longer orthogonal or a
    circuit probability misses its closed form.
    """
    points = _grid(cfg.alpha_grid, ((0, 0), (0, 1)))
    reports = evaluate_grid(
        lambda p: orthogonal_scenario(p[0], pair, p[1], cfg.beta, cfg.cutoff),
        points,
        cfg.workers,
    )
    rows = [
        (
            r.alpha,
            r.mod_indices[0],
            r.mod_indices[1],
            r.overlap,
            r.probabilities[0],
            r.closed_form[0],
            r.probabilities[1],
            r.closed_form[1],
            r.fidelities[0],
            r.fidelities[1],
        )
        for r in reports
    ]
    header = (
        "alpha",
        "mod_1",
        "mod_2",
        "overlap",
        "p_1",
        "p_1_closed_form",
        "p_2",
        "p_2_closed_form",
        "fid_1",
        "fid_2",
    )
    flagged = sum(
        r.overlap >= ORTHOGONALITY_TOLERANCE
        or any(
            abs(p - c) > SUM_TOLERANCE
            for p, c in zip(r.probabilities, r.closed_form, strict=True)
        )
        for r in reports
    )
    return Table(header, rows, flagged)
