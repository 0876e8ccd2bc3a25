"""Exact solver for sparse 0/1 linear programs over tree decompositions."""

from treeopt.core.config import APP_VERSION as __version__

__all__ = ["__version__"]
