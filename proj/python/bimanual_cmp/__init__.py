"""Bimanual compliant movement primitive simulation workbench."""

try:
    from ._core import *  # noqa: F401,F403  (installed wheel layout)
    from ._core import __doc__ as _doc
except ImportError:  # in-tree build: the extension sits on PYTHONPATH
    from _core import *  # noqa: F401,F403
    from _core import __doc__ as _doc

__doc__ = _doc
__version__ = "0.1.0"
