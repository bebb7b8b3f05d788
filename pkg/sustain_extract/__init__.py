"""sustain-extract: constant-consumption extraction with externality-adjusted prices."""

__version__ = "0.1.0"
