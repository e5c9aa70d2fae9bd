"""Weil polynomials with prescribed value at 1: exact construction,
certification and exhaustive enumeration over small finite fields.

Everything on a certified path is computed in exact rational arithmetic;
irrational scalars only ever appear as directed rational enclosures.
"""

__version__ = "0.1.0"
