"""Diffusion in a drifted Brownian potential: a numerical laboratory.

The compiled extension carries the full API; this package re-exports it.
"""

try:
    from ._dbpot import *  # noqa: F401,F403
    from ._dbpot import __doc__  # noqa: F401
except ImportError:  # running against an in-tree build
    from _dbpot import *  # noqa: F401,F403

__version__ = "0.1.0"
