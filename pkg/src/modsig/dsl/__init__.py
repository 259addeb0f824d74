"""Text formats: structure expressions, system files and distribution files."""

from .files import (
    SystemSpec,
    elaborate,
    format_distribution,
    format_partition,
    load_distribution,
    load_system,
    parse_distribution,
    parse_partition,
    parse_system,
)
from .parser import parse_structure, to_text

__all__ = [
    "SystemSpec",
    "elaborate",
    "format_distribution",
    "format_partition",
    "load_distribution",
    "load_system",
    "parse_distribution",
    "parse_partition",
    "parse_structure",
    "parse_system",
    "to_text",
]
