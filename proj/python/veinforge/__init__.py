"""Finger vein phantom toolkit: extraction, 3D phantom construction,
NIR transmission rendering, and vein-pattern matching."""

try:
    from ._veinforge import *  # noqa: F401,F403  (installed layout)
except ImportError:  # build-tree layout: module sits next to the package
    from _veinforge import *  # noqa: F401,F403

__version__ = "0.1.0"
