"""Desk-scale higher-category constructions with brute-force oracles.

Finite globular sets, graded enrichment bases, free (optionally
operad-weighted) category monads and their coinductive towers, approximant
chains for endofunctor coalgebras, and collection/contraction checkers.
"""

__version__ = "0.1.0"
