"""
Run and precision configuration
"""
import os
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from errors import ConfigError

DEFAULT_BITS = 256
DEFAULT_SERIES_ORDER = 40
DEFAULT_MANIFOLD_ORDER = 40
BITS_ENV = "SPLITTING_LAB_BITS"

Command = Literal["series", "alpha", "tau", "splitting", "compare", "validate"]
OutputFormat = Literal["csv", "json", "text"]


def default_bits() -> int:
    """Default working precision, overridable through the environment"""
    raw = os.getenv(BITS_ENV)
    if raw is None or raw == "":
        return DEFAULT_BITS
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{BITS_ENV} must be an integer, got '{raw}'")


class PrecisionConfig(BaseModel):
    """Precision settings of the manifold computations"""
    model_config = ConfigDict(frozen=True)

    bits: int = Field(default=DEFAULT_BITS)
    manifold_order: int = Field(default=DEFAULT_MANIFOLD_ORDER)
    # log2 of the target |c_M s0^M|, relative to the working precision
    seed_margin_bits: int = Field(default=16)

    @field_validator("bits")
    @classmethod
    def _check_bits(cls, v: int) -> int:
        if v < 128:
            raise ValueError(f"bits must be >= 128, got {v}")
        return v

    @field_validator("manifold_order")
    @classmethod
    def _check_order(cls, v: int) -> int:
        if v < 10:
            raise ValueError(f"manifold order must be >= 10, got {v}")
        return v


class RunConfig(BaseModel):
    """One CLI invocation"""
    model_config = ConfigDict(frozen=True)

    command: Command
    series_order: int = DEFAULT_SERIES_ORDER
    precision_bits: int = DEFAULT_BITS
    epsilon_list: List[str] = Field(default_factory=list)
    manifold_order: int = DEFAULT_MANIFOLD_ORDER
    output_path: Optional[str] = None
    format: OutputFormat = "text"
    workers: int = 1
    verbose: bool = False

    @field_validator("series_order")
    @classmethod
    def _check_series_order(cls, v: int) -> int:
        if v < 8 or v % 2:
            raise ValueError(f"series order must be even and >= 8, got {v}")
        return v

    @field_validator("precision_bits")
    @classmethod
    def _check_bits(cls, v: int) -> int:
        if v < 128:
            raise ValueError(f"precision must be >= 128 bits, got {v}")
        return v

    @field_validator("manifold_order")
    @classmethod
    def _check_manifold_order(cls, v: int) -> int:
        if v < 10:
            raise ValueError(f"manifold order must be >= 10, got {v}")
        return v

    @field_validator("epsilon_list")
    @classmethod
    def _check_epsilons(cls, v: List[str]) -> List[str]:
        for raw in v:
            try:
                value = float(raw)
            except ValueError:
                raise ValueError(f"epsilon '{raw}' is not a number")
            if not value > 0:
                raise ValueError(f"epsilon must be positive, got {raw}")
        return v

    @field_validator("workers")
    @classmethod
    def _check_workers(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"workers must be >= 1, got {v}")
        return v

    @model_validator(mode="after")
    def _check_command_inputs(self) -> "RunConfig":
        if self.command in ("splitting", "compare") and not self.epsilon_list:
            raise ValueError(f"'{self.command}' needs at least one epsilon")
        return self

    def precision(self) -> PrecisionConfig:
        return PrecisionConfig(bits=self.precision_bits, manifold_order=self.manifold_order)

    @classmethod
    def build(cls, **values) -> "RunConfig":
        """Validate into a RunConfig, reporting failures as ConfigError"""
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigError(str(e)) from e
