"""
Configuration management for the ancilla-mediated CZ synthesis toolkit.
"""

from typing import Any, Dict, List

from decouple import config


class Config:
    """Configuration settings for simulations, the CLI and the MCP server."""

    # Server configuration
    SERVER_NAME: str = config("SERVER_NAME", default="Ancilla CZ Synthesis")  # type: ignore
    SERVER_VERSION: str = config("SERVER_VERSION", default="1.0.0")  # type: ignore

    # Logging
    LOG_LEVEL: str = config("LOG_LEVEL", default="INFO")  # type: ignore

    # Monte Carlo
    DEFAULT_SEED: int = config("DEFAULT_SEED", default=20240611, cast=int)
    DEFAULT_TRIALS: int = config("DEFAULT_TRIALS", default=10000, cast=int)
    MAX_STEPS: int = config("MAX_STEPS", default=1000000, cast=int)
    WORKERS: int = config("WORKERS", default=1, cast=int)

    # Optimizer
    SCAN_POINTS: int = config("SCAN_POINTS", default=1024, cast=int)
    ROOT_XTOL: float = config("ROOT_XTOL", default=1e-13, cast=float)
    VALIDITY_TOL: float = config("VALIDITY_TOL", default=1e-9, cast=float)

    # Exact laws are truncated once this much probability mass is left
    EXACT_TAIL_TOL: float = config("EXACT_TAIL_TOL", default=1e-12, cast=float)

    # Output
    OUTPUT_DIR: str = config("OUTPUT_DIR", default="results")  # type: ignore

    @classmethod
    def validate(cls) -> List[str]:
        """Return a list of problems with the numeric settings (empty when sane)."""
        problems = []
        if cls.DEFAULT_TRIALS < 1:
            problems.append("DEFAULT_TRIALS must be at least 1")
        if cls.MAX_STEPS < 1:
            problems.append("MAX_STEPS must be at least 1")
        if cls.WORKERS < 1:
            problems.append("WORKERS must be at least 1")
        if cls.SCAN_POINTS < 16:
            problems.append("SCAN_POINTS must be at least 16")
        if not 0 < cls.ROOT_XTOL < 1e-6:
            problems.append("ROOT_XTOL must lie in (0, 1e-6)")
        if not 0 < cls.VALIDITY_TOL < 1e-3:
            problems.append("VALIDITY_TOL must lie in (0, 1e-3)")
        if not 0 < cls.EXACT_TAIL_TOL < 1:
            problems.append("EXACT_TAIL_TOL must lie in (0, 1)")
        return problems

    @classmethod
    def as_dict(cls) -> Dict[str, Any]:
        """Echo of the active settings, for run summaries."""
        return {
            "DEFAULT_SEED": cls.DEFAULT_SEED,
            "DEFAULT_TRIALS": cls.DEFAULT_TRIALS,
            "MAX_STEPS": cls.MAX_STEPS,
            "WORKERS": cls.WORKERS,
            "SCAN_POINTS": cls.SCAN_POINTS,
            "ROOT_XTOL": cls.ROOT_XTOL,
            "VALIDITY_TOL": cls.VALIDITY_TOL,
            "EXACT_TAIL_TOL": cls.EXACT_TAIL_TOL,
        }
