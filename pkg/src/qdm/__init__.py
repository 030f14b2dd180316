"""Quantum denoising model (QDM) with a bridged-MERA network."""

__version__ = "0.1.0"
