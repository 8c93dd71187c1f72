"""Tikhonov-regularized gradient flow laboratory.

The heavy lifting lives in the C++ extension `_tikflow`; this package
re-exports it. When developing against a plain CMake build, point
PYTHONPATH at both this directory and the build directory holding the
extension.
"""

try:
    from ._tikflow import *  # noqa: F401,F403
    from ._tikflow import __doc__ as _core_doc
except ImportError:  # CMake development layout: extension next to the build tree
    from _tikflow import *  # noqa: F401,F403
    from _tikflow import __doc__ as _core_doc

__version__ = "0.1.0"
