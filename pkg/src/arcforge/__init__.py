"""Minimal grid diagrams from Dowker-Thistlethwaite codes via filtered spanning trees."""

__version__ = "0.1.0"
