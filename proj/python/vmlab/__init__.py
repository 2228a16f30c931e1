"""Variable-mass inertial Newton lab."""

from ._vmlab import *  # noqa: F401,F403
from ._vmlab import VmlabError, __doc__  # noqa: F401

__version__ = "0.1.0"
