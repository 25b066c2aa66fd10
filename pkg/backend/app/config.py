import os
import sys
import logging
from functools import lru_cache

from dotenv import load_dotenv

load_dotenv()


class Settings:
    # Application Settings
    APP_NAME: str = "Quaternary Lattice Genera"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = os.getenv("DEBUG", "False").lower() == "true"

    # Search Limits
    DENOMINATOR_CAP: int = int(os.getenv("DENOMINATOR_CAP", "32"))
    NORM_IDEAL_LIMIT: int = int(os.getenv("NORM_IDEAL_LIMIT", "512"))
    CLASS_ORDER_CAP: int = int(os.getenv("CLASS_ORDER_CAP", "256"))

    # Enumeration
    THETA_BOUND: int = int(os.getenv("THETA_BOUND", "4"))
    FP_TOLERANCE: float = float(os.getenv("FP_TOLERANCE", "1e-6"))

    # Workers
    THREADS: int = int(os.getenv("THREADS", "1"))

    # Reporting
    REPORT_TIMINGS: bool = os.getenv("REPORT_TIMINGS", "False").lower() == "true"

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FORMAT: str = os.getenv("LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    LOG_FILE: str = os.getenv("LOG_FILE", "")

    def validate(self):
        """Validate configuration"""
        for name in ("DENOMINATOR_CAP", "NORM_IDEAL_LIMIT", "CLASS_ORDER_CAP", "THETA_BOUND", "THREADS"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")

        if self.FP_TOLERANCE <= 0:
            raise ValueError("FP_TOLERANCE must be positive")

        if not isinstance(logging.getLevelName(self.LOG_LEVEL.upper()), int):
            raise ValueError(f"Unknown LOG_LEVEL: {self.LOG_LEVEL}")

        return True


@lru_cache
def get_settings() -> Settings:
    return Settings()


def setup_logging(level: str | None = None):
    settings = get_settings()

    # stdout is reserved for reports
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    if settings.LOG_FILE:
        try:
            handlers.append(logging.FileHandler(settings.LOG_FILE))
        except OSError:
            pass  # Just use console logging if file fails

    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper()),
        format=settings.LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
    # Set third-party library log levels
    logging.getLogger("sympy").setLevel(logging.WARNING)

    return logging.getLogger("app")
