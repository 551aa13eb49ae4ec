"""Version of graph-matern. pyproject.toml carries the same number."""

from datetime import date

__version__ = "0.3.0"

__version_info__ = tuple(int(part) for part in __version__.split("."))

RELEASE_DATE = date(2026, 10, 12)
RELEASE_NAME = "Stationary boundaries and alpha = 2 kriging"


def get_version() -> str:
    return __version__


def get_version_info() -> dict:
    """Version string, its numeric parts and the release metadata shown by `gmatern version`."""
    major, minor, patch = __version_info__
    return {
        "version": __version__,
        "major": major,
        "minor": minor,
        "patch": patch,
        "release_date": RELEASE_DATE.isoformat(),
        "release_name": RELEASE_NAME,
    }


__all__ = ["__version__", "__version_info__", "RELEASE_DATE", "RELEASE_NAME", "get_version", "get_version_info"]
