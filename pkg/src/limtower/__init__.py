"""lim and lim^1 of group towers, and witness-producing Milnor sequence
constructions for towers of chain complexes."""

__version__ = "0.1.0"
