"""Geometric variational inference toolkit."""

try:
    from ._geovi import *  # noqa: F401,F403  (installed layout)
    from ._geovi import version as _version
except ImportError:  # in-tree runs: the extension sits on sys.path directly
    from _geovi import *  # noqa: F401,F403
    from _geovi import version as _version

__version__ = _version()
