"""Workbench for non-deterministic communication complexity and instance complexity."""

__version__ = "0.3.0"
