"""Reward-free exploration and planning with linear value models.

The heavy lifting lives in the compiled ``_core`` extension; this package
just re-exports it.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__doc__ = _core_doc
