"""Native reasoner: consistency, explanations and inference."""

from .reasoner import *  # noqa: F401,F403
from .reasoner import __all__  # noqa: F401
