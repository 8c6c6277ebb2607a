"""RiffleScrambler: a memory-hard password hash on a salt-derived riffle graph."""

from .errors import InternalError, PhcDecodeError, ResourceError, RiffleScramblerError, UsageError
from .graph import RiffleGraph, export_graph, gen_graph, import_graph, validate_structure
from .hasher import HashParams, decode_phc, encode_phc, evaluate, hash_password, verify_password
from .permute import BitWord, Permutation, inverse_riffle_shuffle, riffle_permutation
from .trajectory import binary_representation, trace_trajectories

__version__ = "1.0.0"

__all__ = [
    "BitWord", "HashParams", "InternalError", "Permutation", "PhcDecodeError",
    "ResourceError", "RiffleGraph", "RiffleScramblerError", "UsageError",
    "binary_representation", "decode_phc", "encode_phc", "evaluate", "export_graph",
    "gen_graph", "hash_password", "import_graph", "inverse_riffle_shuffle",
    "riffle_permutation", "trace_trajectories", "validate_structure", "verify_password",
]
