"""Single-source publishing: one MyST-flavoured markdown source rendered as an
HTML book, Jupyter notebooks and a reveal.js slide deck."""

from .build import BuildReport, cmd_build, cmd_check, load_project
from .config import Config, load_config
from .parser import parse_source

__version__ = "0.1.0"

__all__ = ["BuildReport", "Config", "cmd_build", "cmd_check", "load_config", "load_project", "parse_source"]
