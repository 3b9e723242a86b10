"""Report models and export for lie-domains."""
