"""Klein-Gordon waves on the Witten bubble of nothing and on the Hawking wormhole."""

__version__ = "0.1.0"
