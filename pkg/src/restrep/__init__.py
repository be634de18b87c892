"""Exact tensor-product experiments over finite local algebras.

Modules over prime-power fields, several cocommutative comultiplication
structures on the same augmented algebra, tensor products of modules
under each, flat-point support, and the Green-ring scenario suite built
on top of them.
"""

__version__ = "0.1.0"
