"""Deterministic simulator and bound-verification suite for a
catalyst-assisted nonlocal state identification protocol and the
bipartite-gate simulation built from it."""

from . import analysis, catalyst_subspace, kernels, linalg, model, protocols

__version__ = "0.1.0"

__all__ = ["analysis", "catalyst_subspace", "kernels", "linalg", "model", "protocols", "__version__"]
