"""Capacity regions and bounds for discrete memoryless Z-interference channels."""

__version__ = "0.1.0"
