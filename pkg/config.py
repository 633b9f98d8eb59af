"""Configuration settings for the toolkit."""
from pydantic_settings import BaseSettings, SettingsConfigDict

VERSION = "0.1.0"


class Settings(BaseSettings):
    """Work caps, tolerances and logging settings.

    Every field can be overridden from the environment with the ``TVWB_``
    prefix, e.g. ``TVWB_MEMO_CAP=50000000``.
    """

    model_config = SettingsConfigDict(env_prefix="TVWB_", env_file=".env", case_sensitive=True)

    # Enumeration and search caps
    AUTOMORPHISM_CAP: int = 1_000_000
    MEMO_CAP: int = 20_000_000
    SUCCESSOR_CAP: int = 1_000_000
    MEASURE_SUPPORT_CAP: int = 100_000
    MEASURE_MAX_HEIGHT: int = 4
    TREE_HEIGHT_CAP: int = 16
    WORK_CAP: int = 1_000_000
    GENERICITY_CAP: int = 100_000

    # Numerical tolerances
    CLASS_TOLERANCE: float = 1e-12
    SUM_TOLERANCE: float = 1e-10
    ZERO_THRESHOLD: float = 1e-12
    STATIONARY_TOLERANCE: float = 1e-12

    # Application settings
    LOG_LEVEL: str = "WARNING"


settings = Settings()
