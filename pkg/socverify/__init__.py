"""
socverify: numerical verification of optimality conditions for ODE optimal control.

Candidate controls live on a finite metric control domain. The package checks
the maximum principle, the second-order necessary conditions for singular
controls and a fitted second-order sufficient condition, and measures how
relaxed and chattering controls approach their limits.
"""

from .errors import SocVerifyError
from .utils.version import __version__

__all__ = ["SocVerifyError", "__version__"]
