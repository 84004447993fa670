"""Hypercomplex Almost Abelian Lie algebra toolkit"""

__version__ = "1.0.0"
__author__ = "HAAL Team"
__description__ = "Exact classification and lattice tools for hypercomplex almost abelian Lie algebras"
