"""Verification toolkit for metric reduction in generalized geometry.

Computes torsion (Bismut) connections and curvatures from metric-plus-flux
data on coordinate charts, performs quotient and zero-locus reduction with
independent cross-checks, validates compatible pairs of almost complex
structures, and reproduces the reduction theorems through exact Grassmann
(Berezin) localization of the corresponding zero-dimensional models.
"""

__version__ = "0.1.0"
