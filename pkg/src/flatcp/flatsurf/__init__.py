"""Polygonal translation and half-translation surfaces with vertices in
``K^2`` for a real quadratic field ``K``."""

from .cover import *  # noqa: F401,F403
from .eigen import *  # noqa: F401,F403
from .flow import *  # noqa: F401,F403
from .homology import *  # noqa: F401,F403
from .prototype import *  # noqa: F401,F403
from .strata import *  # noqa: F401,F403
from .surface import *  # noqa: F401,F403
from . import cover, eigen, flow, homology, prototype, strata, surface

__all__ = (
    cover.__all__
    + eigen.__all__
    + flow.__all__
    + homology.__all__
    + prototype.__all__
    + strata.__all__
    + surface.__all__
)
