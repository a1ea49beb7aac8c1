"""Exact arithmetic for Markoff triples mod p.

Subpackages cover rational/cyclotomic arithmetic (`rings`), prime-field
utilities (`ffield`), the trivariate reduction calculus (`trired`), orbit
surveys over F_p (`orbits`), SL2 pair equivalence (`nielsen`), the spectral
matrix constructions (`spectral`), and matrix-rank certification
(`certify`).  Everything is exact; no floats anywhere.
"""

__version__ = "0.1.0"
