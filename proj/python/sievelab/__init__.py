from ._sievelab import *  # noqa: F401,F403
from ._sievelab import __doc__  # noqa: F401
