"""Sweep configuration for hybridtele runs."""

from dataclasses import dataclass, fields, replace
from pathlib import Path

from hybridtele.constants import (
    DEFAULT_A1_GRID,
    DEFAULT_ALPHA_GRID,
    DEFAULT_BETA,
    DEFAULT_CONFIG_PATH,
    DEFAULT_CUTOFF,
    DEFAULT_N_MAX,
    DEFAULT_PRECISION,
    DEFAULT_T_GRID,
    DEFAULT_WORKERS,
    MAX_SWEEP_ALPHA,
    MIN_SWEEP_T,
)
from hybridtele.errors import ConfigError

# Config file key for every SweepConfig field
KEYS = {
    "alpha_grid": "ALPHA_GRID",
    "t_grid": "T_GRID",
    "a1_grid": "A1_GRID",
    "beta": "BETA",
    "cutoff": "CUTOFF",
    "precision": "PRECISION",
    "output_path": "OUTPUT_PATH",
    "n_max": "N_MAX",
    "workers": "WORKERS",
}


def parse_grid(text: str, key: str = "grid") -> tuple[float, ...]:
    """Parse a comma-separated list of floats.

    Raises:
        ConfigError: If the list is empty or an entry is not a number.
    """
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise ConfigError(f"{key}: not a list of numbers: {text!r}") from e
    if not values:
        raise ConfigError(f"{key}: empty grid")
    return values


def format_grid(values: tuple[float, ...]) -> str:
    return ",".join(repr(float(v)) for v in values)


@dataclass(frozen=True)
class SweepConfig:
    """Fully resolved parameters of one CLI run.

    Attributes:
        alpha_grid: Displacement amplitudes, each in (0, 0.8].
        t_grid: Beam-splitter transmittances, each in (0.5, 1].
        a1_grid: Qubit |a1| values in [0, 1].
        beta: Channel SCS amplitude.
        cutoff: Fock truncation per bosonic mode.
        precision: Significant digits of floats in CSV output.
        output_path: CSV destination, None for stdout.
        n_max: Largest photon count enumerated by the circuit oracles.
        workers: Thread-pool size for grid evaluation.
    """

    alpha_grid: tuple[float, ...] = DEFAULT_ALPHA_GRID
    t_grid: tuple[float, ...] = DEFAULT_T_GRID
    a1_grid: tuple[float, ...] = DEFAULT_A1_GRID
    beta: float = DEFAULT_BETA
    cutoff: int = DEFAULT_CUTOFF
    precision: int = DEFAULT_PRECISION
    output_path: str | None = None
    n_max: int = DEFAULT_N_MAX
    workers: int = DEFAULT_WORKERS

    def __post_init__(self) -> None:
        for name in ("alpha_grid", "t_grid", "a1_grid"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must not be empty")
        if any(not 0 < a <= MAX_SWEEP_ALPHA for a in self.alpha_grid):
            raise ConfigError(f"alpha values must lie in (0, {MAX_SWEEP_ALPHA}]: {self.alpha_grid}")
        if any(not MIN_SWEEP_T < t <= 1 for t in self.t_grid):
            raise ConfigError(f"t values must lie in ({MIN_SWEEP_T}, 1]: {self.t_grid}")
        if any(not 0 <= a <= 1 for a in self.a1_grid):
            raise ConfigError(f"a1 values must lie in [0, 1]: {self.a1_grid}")
        if self.beta <= 0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if self.cutoff < 1:
            raise ConfigError(f"cutoff must be at least 1, got {self.cutoff}")
        if not 1 <= self.precision <= 17:
            raise ConfigError(f"precision must lie in [1, 17], got {self.precision}")
        if self.n_max < 1:
            raise ConfigError(f"n_max must be at least 1, got {self.n_max}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")

    @classmethod
    def resolve(cls, manager: "ConfigManager | None" = None, **flags: object) -> "SweepConfig":
        """Merge command-line flags over the config file over built-in defaults.

        Flags whose value is None are treated as not given.
        """
        unknown = set(flags) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"Unknown sweep settings: {sorted(unknown)}")
        base = manager.sweep_config() if manager is not None else cls()
        given = {key: value for key, value in flags.items() if value is not None}
        return replace(base, **given)


class ConfigManager:
    """Manages the hybridtele configuration file.

    The config file is a simple key=value format:
        # hybridtele sweep configuration
        ALPHA_GRID=0.06,0.1,0.2,0.3
        T_GRID=0.9,0.99,1.0
        BETA=0.3
        CUTOFF=24

    Usage:
        manager = ConfigManager()
        grid = manager.alpha_grid  # Loads and caches
        manager.save_sweep(cfg)  # Freezes a resolved run
    """

    def __init__(self, config_path: Path | None = None):
        self._config_path = config_path or DEFAULT_CONFIG_PATH
        self._cache: dict[str, str] = {}
        self._loaded = False

    @property
    def path(self) -> Path:
        return self._config_path

    def _load_all(self) -> dict[str, str]:
        """Load all config values from file.

        Returns:
            Dictionary of key-value pairs from config file.
        """
        if not self._config_path.exists():
            return {}

        values = {}
        for line in self._config_path.read_text().splitlines():
            line = line.strip()
            if line and not line.startswith("#") and "=" in line:
                key, value = line.split("=", 1)
                values[key.strip()] = value.strip()
        return values

    def _ensure_loaded(self) -> None:
        if not self._loaded:
            self._cache = self._load_all()
            self._loaded = True

    def _get_value(self, key: str) -> str | None:
        self._ensure_loaded()
        value = self._cache.get(key)
        return value or None

    def _get_grid(self, key: str, default: tuple[float, ...]) -> tuple[float, ...]:
        value = self._get_value(key)
        return default if value is None else parse_grid(value, key)

    def _get_number(self, key: str, default: float, kind: type) -> float:
        value = self._get_value(key)
        if value is None:
            return default
        try:
            return kind(value)
        except ValueError as e:
            raise ConfigError(f"{key}: expected {kind.__name__}, got {value!r}") from e

    @property
    def alpha_grid(self) -> tuple[float, ...]:
        return self._get_grid(KEYS["alpha_grid"], DEFAULT_ALPHA_GRID)

    @property
    def t_grid(self) -> tuple[float, ...]:
        return self._get_grid(KEYS["t_grid"], DEFAULT_T_GRID)

    @property
    def a1_grid(self) -> tuple[float, ...]:
        return self._get_grid(KEYS["a1_grid"], DEFAULT_A1_GRID)

    @property
    def beta(self) -> float:
        return self._get_number(KEYS["beta"], DEFAULT_BETA, float)

    @property
    def cutoff(self) -> int:
        return int(self._get_number(KEYS["cutoff"], DEFAULT_CUTOFF, int))

    @property
    def precision(self) -> int:
        return int(self._get_number(KEYS["precision"], DEFAULT_PRECISION, int))

    @property
    def output_path(self) -> str | None:
        return self._get_value(KEYS["output_path"])

    @property
    def n_max(self) -> int:
        return int(self._get_number(KEYS["n_max"], DEFAULT_N_MAX, int))

    @property
    def workers(self) -> int:
        return int(self._get_number(KEYS["workers"], DEFAULT_WORKERS, int))

    def has_setting(self, name: str) -> bool:
        """Whether the config file sets the SweepConfig field `name`."""
        return self._get_value(KEYS[name]) is not None

    def sweep_config(self) -> SweepConfig:
        """SweepConfig built from the file, defaults filling missing keys.

        Raises:
            ConfigError: If a value is malformed or out of range.
        """
        return SweepConfig(**{name: getattr(self, name) for name in KEYS})

    def save_sweep(self, cfg: SweepConfig) -> None:
        """Write cfg to the config file, replacing its contents.

        Creates parent directories if needed.
        """
        self._config_path.parent.mkdir(parents=True, exist_ok=True)

        lines = ["# hybridtele sweep configuration"]
        for name, key in KEYS.items():
            value = getattr(cfg, name)
            if value is None:
                continue
            if isinstance(value, tuple):
                value = format_grid(value)
            lines.append(f"{key}={value}")

        self._config_path.write_text("\n".join(lines) + "\n")
        self._cache = {}
        self._loaded = False
