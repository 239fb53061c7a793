"""
Infrastructure layer - File formats and the command line.

This layer reads scenario files, writes result tables and exposes the subcommands.
It depends on both Application and Domain layers.
"""

from . import cli, persistence

__all__ = [
    "cli",
    "persistence",
]
