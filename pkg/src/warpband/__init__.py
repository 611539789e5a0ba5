"""Curvature, stability and comparison checks for warped bands with a weight."""
from .errors import *  # noqa: F401,F403
from .profiles import *  # noqa: F401,F403
from .geometry import *  # noqa: F401,F403
from .models import *  # noqa: F401,F403
from .stability import *  # noqa: F401,F403
from .convergence import *  # noqa: F401,F403
from .variation import *  # noqa: F401,F403
from .cone import *  # noqa: F401,F403
from .checker import *  # noqa: F401,F403
from .config import RunConfig, Command, load_config  # noqa: F401
from .cli import run_config, main  # noqa: F401

__version__ = "0.1.0"
