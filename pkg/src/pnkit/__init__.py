"""Exact symbolic checks for Poisson-Nijenhuis type structures on a chart."""

__version__ = "0.1.0"
