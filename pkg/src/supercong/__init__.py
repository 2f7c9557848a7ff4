"""Verification toolkit for p-adic supercongruences of Ramanujan-Sato type."""

__version__ = "0.1.0"
