"""Finite-stage laboratory for two inductive systems of interval and circle algebras.

The systems share K-theory and traces up to summable errors, yet only one of
them admits a section of the determinant map compatible with corner
inclusions. Everything here is computed at finite stages with explicit
tolerances.
"""

from .kernels import BACKEND
from .systems import SystemParams, build_system_A, build_system_B

__all__ = ["BACKEND", "SystemParams", "build_system_A", "build_system_B"]
__version__ = "0.1.0"
