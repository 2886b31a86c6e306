"""Version of the ancilla_cz package."""

__version__ = "1.0.0"
