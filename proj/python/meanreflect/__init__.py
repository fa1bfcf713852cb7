"""Reflection problems and SDEs whose constraint acts on the law of the solution."""

try:
    from ._meanreflect import *  # noqa: F401,F403  (installed package layout)
    from ._meanreflect import __doc__  # noqa: F401
except ImportError:  # in-tree builds put the extension on sys.path directly
    from _meanreflect import *  # noqa: F401,F403
    from _meanreflect import __doc__  # noqa: F401
