"""QC-LDPC Niederreiter key encapsulation with a Q-decoder."""

from .errors import (DecodingFailure, FormatError, KeyGenerationError, LedaError,
                     ParameterError, SingularError)
from .keygen import PrivateKey, PublicKey, expand_private, gen_keypair
from .kem import Ciphertext, decap, decapsulate, encap
from .params import ParamSet, get, registry, toy_params
from .ring import RingElement, SparseRingElement

__version__ = "0.1.0"

__all__ = [
    "Ciphertext", "DecodingFailure", "FormatError", "KeyGenerationError", "LedaError",
    "ParamSet", "ParameterError", "PrivateKey", "PublicKey", "RingElement", "SingularError",
    "SparseRingElement", "decap", "decapsulate", "encap", "expand_private", "gen_keypair",
    "get", "registry", "toy_params",
]
