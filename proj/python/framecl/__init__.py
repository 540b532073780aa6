"""Frame-semantic parsing with in-context learning.

Thin wrapper over the compiled extension; see the package README for the
pipeline (store -> split -> prompt -> client -> parser -> evaluator).
"""

try:
    from ._framecl import *  # noqa: F401,F403
    from ._framecl import __version__  # noqa: F401
except ImportError:  # running from a build tree without installation
    from _framecl import *  # noqa: F401,F403
    from _framecl import __version__  # noqa: F401
