# osim/__init__.py
"""osim: simulation and stochastic-ordering verification for ordered random vectors."""

__version__ = "0.3.0"
