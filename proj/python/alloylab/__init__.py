from ._alloylab import *  # noqa: F401,F403
from ._alloylab import __version__  # noqa: F401
