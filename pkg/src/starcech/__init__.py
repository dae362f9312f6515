"""Exact computational engine for Cech-Deligne cohomology on finite
triangulated spaces: higher U(1)-gerbes with partial connections, their
gauge actions and moduli homotopy groups, and discrete exact Courant
algebroids.  All arithmetic is arbitrary-precision (int / Fraction);
there is no floating point anywhere in the package.
"""

from .homalg import MixedGroup

__all__ = ["MixedGroup"]
__version__ = "0.1.0"
