"""Utility helpers for lie-domains."""
