"""Distributed quantum sensing over noisy networks.

Closed-form metrology for GHZ-diagonal probes, Bell-diagonal entanglement
algebra, estimator combining and a deterministic discrete-event simulator of
Bell-pair distribution and probe assembly.
"""

try:
    from ._dqsnet import *  # noqa: F401,F403  (installed package layout)
except ImportError:  # in-tree builds put the extension on sys.path directly
    from _dqsnet import *  # noqa: F401,F403

__version__ = "0.1.0"
