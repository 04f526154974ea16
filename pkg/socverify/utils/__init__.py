"""
Utilities package for socverify.

This package contains utility modules for configuration loading, logging,
report writing, worker pools and version lookup.
"""

from .config_loader import ConfigLoader, default_config
from .version import __version__, get_version

__all__ = ["ConfigLoader", "__version__", "default_config", "get_version"]
