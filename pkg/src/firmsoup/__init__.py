"""Long-run multi-sector equilibrium of Cobb-Douglas economies."""

__version__ = "0.1.0"
