"""LTE downlink mobility load balancing simulator backend."""

__version__ = "1.0.0"
