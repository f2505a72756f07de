"""Waldhausen structures from complete hereditary cotorsion pairs.

The package works over module categories of finite-dimensional algebras
over prime fields.  It provides exact linear algebra over GF(p) and over
the integers, module and morphism arithmetic, Ext^1 computations,
cotorsion-pair resolutions, map classification and factorization,
Waldhausen axiom checkers, the induced cotorsion pair on span categories,
degreewise-split chain complex structures, and K0 localization reports.
"""

__version__ = "0.1.0"
