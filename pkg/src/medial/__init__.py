"""Deep-inference proof kernel over medial-shape rule systems."""

__version__ = "0.1.0"
