"""Bundled scenario files reproducing the worked examples."""

from importlib import resources
from pathlib import Path

NAMES = ("burglary", "vue", "naive_transfer", "appendix", "stereotype")


def path(name: str) -> Path:
    """Filesystem path of the bundled ``<name>.scenario`` file."""
    return Path(str(resources.files(__name__).joinpath(f"{name}.scenario")))
