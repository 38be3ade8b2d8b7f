"""Offline batch-constrained Q-learning on CartPole, quantum and classical."""

try:
    from ._core import *  # noqa: F401,F403
    from . import _core as core  # noqa: F401
except ImportError:
    # Build-tree layout: the extension sits on sys.path, not in the package.
    from _core import *  # noqa: F401,F403
    import _core as core  # noqa: F401
