"""Real-time resiliency management engine for distribution networks."""

__version__ = "0.1.0"
