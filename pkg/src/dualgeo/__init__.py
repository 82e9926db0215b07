"""Dual-affine information geometry toolkit.

Library + batch CLI covering Fisher-Rao metrics and dual connections on
statistical manifolds, Bregman/KL divergence geometry, geometric-phase
holonomy over parameter loops, Bloch-sphere coherence and entanglement
decomposition, CHSH correlators up to the Tsirelson bound, and membrane /
string continuum analogies.
"""

__version__ = "0.1.0"

from . import berry, chsh, continuum, distributions, geometry, lengths, quantum, tables  # noqa: F401
