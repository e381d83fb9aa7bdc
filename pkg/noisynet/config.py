"""Config settings."""

import dataclasses as dc
import logging

from wipac_dev_tools import from_environment_as_dataclass, logging_tools

# --------------------------------------------------------------------------------------
# Constants


EVIDENCE_UNDERFLOW = 1e-300  # P(E) at or below this is treated as impossible evidence

QUERY_SIGNIFICANT_DIGITS = 12

DEFAULT_VERIFY_TRIALS = 50
DEFAULT_VERIFY_SEED = 0

BOOLEAN_STATES = ("false", "true")


@dc.dataclass(frozen=True)
class EnvConfig:
    """Environment variables."""

    # pylint:disable=invalid-name
    LOG_LEVEL: str = "INFO"
    LOG_LEVEL_THIRD_PARTY: str = "WARNING"

    # enumeration limits
    ENUMERATION_BUDGET: int = 1_000_000  # joint input states per gate
    JOINT_ENUMERATION_MAX: int = 1_000_000  # full-joint entries for the oracle
    PATH_COUNT_MAX_STATES: int = 1024
    LINK_ENUMERATION_MAX_LINKS: int = 24

    # tolerances
    NORMALIZATION_TOLERANCE: float = 1e-9
    EQUIVALENCE_TOLERANCE: float = 1e-12

    def __post_init__(self) -> None:
        object.__setattr__(self, "LOG_LEVEL", self.LOG_LEVEL.upper())  # b/c frozen

        for name in [
            "ENUMERATION_BUDGET",
            "JOINT_ENUMERATION_MAX",
            "PATH_COUNT_MAX_STATES",
            "LINK_ENUMERATION_MAX_LINKS",
        ]:
            if getattr(self, name) < 1:
                raise RuntimeError(f"'{name}' must be a positive integer")

        if self.NORMALIZATION_TOLERANCE < 0 or self.EQUIVALENCE_TOLERANCE < 0:
            raise RuntimeError("tolerances cannot be negative")
        if self.EQUIVALENCE_TOLERANCE > self.NORMALIZATION_TOLERANCE:
            raise RuntimeError(
                "'EQUIVALENCE_TOLERANCE' cannot be greater than 'NORMALIZATION_TOLERANCE'"
            )


ENV = from_environment_as_dataclass(EnvConfig)


def config_logging() -> None:
    """Configure the logging level and format.

    This is separated into a function for consistency between app and
    testing environments.
    """
    hand = logging.StreamHandler()
    hand.setFormatter(
        logging.Formatter(
            "%(asctime)s.%(msecs)03d [%(levelname)8s] %(name)s[%(process)d] %(message)s <%(filename)s:%(lineno)s/%(funcName)s()>",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
    )
    logging.getLogger().addHandler(hand)
    logging_tools.set_level(
        ENV.LOG_LEVEL,  # type: ignore[arg-type]
        first_party_loggers=__name__.split(".", maxsplit=1)[0],
        third_party_level=ENV.LOG_LEVEL_THIRD_PARTY,  # type: ignore[arg-type]
        future_third_parties=[],
    )
