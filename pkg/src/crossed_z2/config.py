"""Runtime settings read from the environment and an optional ``.env`` file."""

import functools
import os

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from crossed_z2.constants import (
    DEFAULT_ABS_TOL,
    DEFAULT_REL_TOL,
    DEFAULT_SEED,
    ENV_ABS_TOL,
    ENV_LOG_LEVEL,
    ENV_REL_TOL,
    ENV_SEED,
)
from crossed_z2.exceptions import InvalidInputError


class Settings(BaseModel):
    """Defaults for tolerances, seed and log level."""

    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(default=DEFAULT_ABS_TOL, gt=0)
    rel_tol: float = Field(default=DEFAULT_REL_TOL, gt=0)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    log_level: str = "WARNING"


@functools.cache
def get_settings() -> Settings:
    """Load settings once per process.

    Values come from ``CROSSED_Z2_ABS_TOL``, ``CROSSED_Z2_REL_TOL``,
    ``CROSSED_Z2_SEED`` and ``CROSSED_Z2_LOG_LEVEL``; unset variables keep
    their defaults. A ``.env`` file in the working directory is honoured.

    Raises:
        InvalidInputError: If a variable does not parse.
    """
    load_dotenv()
    overrides = {
        field: os.environ[name]
        for field, name in (
            ("abs_tol", ENV_ABS_TOL),
            ("rel_tol", ENV_REL_TOL),
            ("seed", ENV_SEED),
            ("log_level", ENV_LOG_LEVEL),
        )
        if os.environ.get(name)
    }
    try:
        settings = Settings.model_validate(overrides)
    except ValidationError as e:
        raise InvalidInputError(f"Invalid environment settings: {e}") from e
    return settings.model_copy(update={"log_level": settings.log_level.upper()})
