"""Python access to the aisplan library."""

from ._aisplan import *  # noqa: F401,F403
from ._aisplan import __doc__  # noqa: F401

__version__ = "0.1.0"
