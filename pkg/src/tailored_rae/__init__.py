"""Noise-tailored robust amplitude estimation: circuits, noise, simulation, twirling, inference."""

__version__ = "0.1.0"
