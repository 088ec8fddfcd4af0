"""Revealed-preference analysis of naive and sophisticated on-path choice."""

__version__ = "0.1.0"
