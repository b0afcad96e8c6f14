"""Channel coding chain: CRC, polar, LDPC, rate matching, interleaving."""

from .crc import CRC_POLYNOMIALS, crc_attach, crc_check, crc_parity, crc_remainder
from .ldpc import LdpcCode, ParityCheckMatrix, ldpc_bp_decode, read_alist, write_alist
from .polar import (
    DecodeResult,
    PolarCode,
    ca_scl_decode,
    frozen_mask,
    polar_encode,
    polar_transform,
    sc_decode,
    scl_decode_paths,
)
from .ratematch import deinterleave, derate_match, interleave, make_permutation, rate_match

__all__ = [
    "CRC_POLYNOMIALS",
    "DecodeResult",
    "LdpcCode",
    "ParityCheckMatrix",
    "PolarCode",
    "ca_scl_decode",
    "crc_attach",
    "crc_check",
    "crc_parity",
    "crc_remainder",
    "deinterleave",
    "derate_match",
    "frozen_mask",
    "interleave",
    "ldpc_bp_decode",
    "make_permutation",
    "polar_encode",
    "polar_transform",
    "rate_match",
    "read_alist",
    "sc_decode",
    "scl_decode_paths",
    "write_alist",
]
