import logging
import math
import os
from dataclasses import dataclass
from typing import Optional, Tuple

from torsionlab.constants import (
    DEFAULT_MAX_WORKERS,
    DEFAULT_PRECISION,
    DEFAULT_ZERO_COUNT,
    DEFAULT_ZERO_TOL,
    THREADS_ENV_VAR,
    Command,
    CrossProductKind,
    OutputFormat,
    Preset,
    Representation,
    RTorsionVariant,
    ZetaMethod,
)

logger = logging.getLogger(__name__)


class ConfigError(Exception):
    pass


def max_workers() -> int:
    """Worker cap for parallel zero refinement.

    Read from TORSIONLAB_THREADS; defaults to min(4, cpu count).
    """
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return min(DEFAULT_MAX_WORKERS, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError as e:
        raise ConfigError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from e
    if value < 1:
        raise ConfigError(f"{THREADS_ENV_VAR} must be positive, got {value}")
    return value


def parse_betti(text: str) -> Tuple[int, ...]:
    """Parses a Betti vector such as "1,1" or "1, 0, 1"."""
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError as e:
        raise ConfigError(f"Malformed Betti list {text!r}") from e
    if any(v < 0 for v in values):
        raise ConfigError(f"Betti numbers must be >= 0: {text!r}")
    return values


def alpha_from_nu(nu: float) -> float:
    if nu <= 1.0:
        raise ConfigError(f"ν = 1/sin α must be > 1, got {nu}")
    return math.asin(1.0 / nu)


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs; built by the click layer."""

    command: Command
    l1: float = 1.0
    l2: float = 2.0
    alpha: Optional[float] = None
    m: int = 1
    betti: Tuple[int, ...] = (1, 1)
    tau_w: Optional[float] = None
    complex_path: Optional[str] = None
    preset: Preset = Preset.PRODUCT_CW
    representation: Representation = Representation.TRIVIAL
    variant: RTorsionVariant = RTorsionVariant.ABS
    kind: CrossProductKind = CrossProductKind.F
    nu_n: float = 0.0
    method: ZetaMethod = ZetaMethod.CLOSED_FORM
    zero_count: int = DEFAULT_ZERO_COUNT
    tol: float = DEFAULT_ZERO_TOL
    output: Optional[str] = None
    output_format: OutputFormat = OutputFormat.JSON
    precision: int = DEFAULT_PRECISION

    def __post_init__(self) -> None:
        if not (0.0 < self.l1 < self.l2):
            raise ConfigError(f"Need 0 < l1 < l2, got l1={self.l1}, l2={self.l2}")
        if self.alpha is not None and not (0.0 < self.alpha < math.pi / 2):
            raise ConfigError(f"α must lie in (0, π/2), got {self.alpha}")
        if self.m < 0 or len(self.betti) != self.m + 1:
            raise ConfigError(
                f"Betti list {self.betti} does not match section dimension {self.m}"
            )
        if self.zero_count < 1:
            raise ConfigError(f"K must be >= 1, got {self.zero_count}")
        if self.tol <= 0:
            raise ConfigError(f"Tolerance must be positive, got {self.tol}")
        if self.precision < 1:
            raise ConfigError(f"Precision must be >= 1, got {self.precision}")
        if self.nu_n < 0:
            raise ConfigError(f"Order must be >= 0, got {self.nu_n}")
        if (
            self.representation is Representation.SIGN
            and self.variant is not RTorsionVariant.ABS
        ):
            raise ConfigError("--variant applies to the trivial representation only")
        if self.output_format is OutputFormat.CSV and self.command is not Command.ZEROS:
            raise ConfigError("CSV output is only available for zero tables")
        needs_angle = (Command.ANALYTIC, Command.VERIFY, Command.LIMITS, Command.REPORT)
        if self.command in needs_angle and self.alpha is None:
            raise ConfigError(f"{self.command.value} needs --alpha or --nu")
        if self.command is Command.RTORSION and (
            self.complex_path is None and self.tau_w is None and self.alpha is None
        ):
            raise ConfigError("rtorsion needs --complex, --tau-w, or --alpha/--nu")

    @property
    def nu(self) -> float:
        if self.alpha is None:
            raise ConfigError("No angle configured")
        return 1.0 / math.sin(self.alpha)
