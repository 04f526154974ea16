"""
Command-line front end: run configuration, the batch pipeline and argument parsing.
"""

from .config import RunConfig, load_run_config
from .main import build_parser, main
from .runner import Verdict, report_paths, run

__all__ = ["RunConfig", "Verdict", "build_parser", "load_run_config", "main", "report_paths", "run"]
