"""Exact-arithmetic tools for odd unimodular lattices of rank 24 and the lattice L⁺."""

from .catalog import by_name
from .embed import embed_search, verify_witness
from .isometry import automorphism_group, is_isometric
from .lattice import IntegerLattice, from_gram, read_lattice, write_lattice
from .neighbors import genus_enumerate, mass_check
from .reduction import lll_reduce, minimum_norm, short_vectors
from .roots import root_decomposition

__all__ = [
    "IntegerLattice", "automorphism_group", "by_name", "embed_search", "from_gram", "genus_enumerate",
    "is_isometric", "lll_reduce", "mass_check", "minimum_norm", "read_lattice", "root_decomposition",
    "short_vectors", "verify_witness", "write_lattice",
]
__version__ = "0.1.0"
