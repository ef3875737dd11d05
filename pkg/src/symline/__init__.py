"""Linear symmetries of first-order ODEs."""

__version__ = "0.1.0"
