"""Critical points of characteristic polynomials of CUE matrices."""

from ._cuecrit import *  # noqa: F401,F403
from ._cuecrit import __doc__  # noqa: F401

__version__ = "0.1.0"
