"""Certificate-checked chromatic numbers, amalgamation classes and predimension
graphs."""

__version__ = "0.1.0"
