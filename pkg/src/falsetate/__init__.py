"""Twisted L-values and Iwasawa invariants of elliptic curves over false Tate extensions."""
__version__ = "0.1.0"
