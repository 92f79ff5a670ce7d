"""Congruent-number toolkit.

Exact ternary-form counts, analytic L-values, 2-descent and class-group
invariants for the congruent-number and tiling-number twist families, with
every cross-identity between them checkable numerically.
"""

__version__ = "0.1.0"
