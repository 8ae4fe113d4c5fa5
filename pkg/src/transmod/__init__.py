"""transmod: discrete classical and transboundary 2-modulus on planar domains.

The package computes the 2-modulus of connecting curve families on a
quotient grid in which designated complementary continua are contracted
to single weighted vertices, and ships the geometric classifiers,
analytic density certificates, and counterexample-domain generators
needed to check the quantitative estimates the engine is built around.
"""
from . import errors, geom

__version__ = "0.1.0"

__all__ = ["errors", "geom", "__version__"]
