"""Rate regions and random-coding simulation for the state-dependent interference channel."""

__version__ = "0.1.0"
