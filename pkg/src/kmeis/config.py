"""
Job configuration: the JSON document every CLI command reads via ``--config``.

Example::

    {
      "cartan": [[2, -3], [-3, 2]],
      "lambda": {"coroot_pairings": ["2", "2"]},
      "point": {"alpha_values": ["1", "1"]},
      "mu": {"coroot_pairings": ["1", "1"]},
      "precision_digits": 30,
      "max_length": 20,
      "M": "4",
      "N": "1000",
      "caps": {"tits_cap": 10000, "string_cap": 64}
    }

Rationals are strings ("p/q" or "n"); unknown fields are rejected.
"""
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, ValidationError, field_validator, model_validator

from kmeis.cartan import CartanMatrix, validate_gcm
from kmeis.errors import ConfigError
from kmeis.utils import parse_rational

logger = logging.getLogger(__name__)


def _rational_list(values: List) -> List[str]:
    for k, text in enumerate(values):
        try:
            parse_rational(text, str(k))
        except ConfigError as e:
            raise ValueError(str(e)) from e
    return [str(v) for v in values]


class WeightSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    coroot_pairings: List[Union[str, StrictInt]] = Field(..., description="c_i = <lambda, alpha_i^vee>")

    @field_validator("coroot_pairings")
    @classmethod
    def _check(cls, values):
        return _rational_list(values)

    @property
    def values(self) -> Tuple[Fraction, ...]:
        return tuple(parse_rational(v) for v in self.coroot_pairings)


class PointSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha_values: List[Union[str, StrictInt]] = Field(..., description="x_i = <alpha_i, H>")

    @field_validator("alpha_values")
    @classmethod
    def _check(cls, values):
        return _rational_list(values)

    @property
    def values(self) -> Tuple[Fraction, ...]:
        return tuple(parse_rational(v) for v in self.alpha_values)


class Caps(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tits_cap: Optional[int] = Field(None, ge=1, description="Step cap for Tits-cone reduction")
    string_cap: Optional[int] = Field(None, ge=1, description="Step cap for root-string walks")


class JobConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    cartan: List[List[StrictInt]] = Field(..., description="Generalized Cartan matrix, row-major")
    lambda_: Optional[WeightSpec] = Field(None, alias="lambda", description="Spectral parameter")
    point: Optional[PointSpec] = Field(None, description="Evaluation point H")
    points: Optional[List[PointSpec]] = Field(None, description="Sample points for orbit counting")
    mu: Optional[WeightSpec] = Field(None, description="Dominant integral weight for orbit counting")
    precision_digits: Optional[int] = Field(None, ge=10, description="Working decimal digits")
    max_length: Optional[int] = Field(None, ge=0, description="Largest Weyl length to visit")
    M: Optional[str] = Field(None, description="Positive real weight base of the dominating series")
    N: Optional[Union[str, StrictInt]] = Field(None, description="Orbit-count threshold, rational > 0")
    caps: Caps = Field(default_factory=Caps)

    @field_validator("M")
    @classmethod
    def _real_string(cls, value: Optional[str]) -> Optional[str]:
        if value is None:
            return value
        try:
            number = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"cannot parse {value!r} as a real number") from e
        if number <= 0:
            raise ValueError("M must be positive")
        return value

    @field_validator("N")
    @classmethod
    def _rational_string(cls, value):
        if value is None:
            return value
        try:
            number = parse_rational(value)
        except ConfigError as e:
            raise ValueError(str(e)) from e
        if number <= 0:
            raise ValueError("N must be positive")
        return str(value)

    @model_validator(mode="after")
    def _check_ranks(self) -> "JobConfig":
        rank = len(self.cartan)
        sized = {
            "lambda.coroot_pairings": self.lambda_.coroot_pairings if self.lambda_ else None,
            "point.alpha_values": self.point.alpha_values if self.point else None,
            "mu.coroot_pairings": self.mu.coroot_pairings if self.mu else None,
        }
        for k, spec in enumerate(self.points or []):
            sized[f"points.{k}.alpha_values"] = spec.alpha_values
        for path, values in sized.items():
            if values is not None and len(values) != rank:
                raise ValueError(f"{path} has {len(values)} entries, expected rank {rank}")
        return self

    def cartan_matrix(self) -> CartanMatrix:
        return validate_gcm(self.cartan)

    @property
    def m_value(self) -> Optional[Fraction]:
        return None if self.M is None else Fraction(self.M.strip())

    @property
    def n_value(self) -> Optional[Fraction]:
        return None if self.N is None else parse_rational(self.N)

    def sample_points(self) -> List[Tuple[Fraction, ...]]:
        if self.points:
            return [spec.values for spec in self.points]
        if self.point:
            return [self.point.values]
        return []


def _error_path(error: dict) -> str:
    return ".".join(str(part) for part in error.get("loc", ()))


def parse_job_config(data) -> JobConfig:
    """Validate a decoded JSON document.

    Raises:
        ConfigError: naming the first offending field path.
    """
    try:
        return JobConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(_error_path(first), first.get("msg", str(e))) from e


def load_job_config(path: Union[str, Path]) -> JobConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(str(path), f"cannot read configuration: {e.strerror}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(str(path), f"invalid JSON at line {e.lineno}: {e.msg}") from e
    logger.debug("loaded job configuration from %s", path)
    return parse_job_config(data)
