"""Core package for the lie-domains verification toolkit."""

__version__ = "0.3.0"
