"""Bit-interleaved coded modulation with joint channel estimation and detection.

Short-block link simulation: polar and LDPC coding, QPSK over a pilot-bearing
OFDM grid, non-coherent SIMO/MIMO soft demappers and a Monte-Carlo BLER harness.
"""

from ._backend import backend_name
from .errors import ConfigError, DomainError

__version__ = "0.1.0"

__all__ = ["ConfigError", "DomainError", "backend_name", "__version__"]
