"""latereg CLI - pure modules, J_M ideals and their resolutions."""

from latereg.cli.main import cli

__all__ = ["cli"]
