"""Computational companion for two-variable Iwasawa theory of CM Rankin-Selberg products."""

__version__ = "0.1.0"
