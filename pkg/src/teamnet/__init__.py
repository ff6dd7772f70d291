"""teamnet: team communication network analytics from email archives.

Reconstructs directed communication graphs from mailbox archives, computes
per-team structural and content metrics over sliding time windows (rotating
leadership, centralization, contribution balance, response times, sentiment),
and correlates them with team ratings.
"""

__version__ = "0.1.0"

from .kernels import BACKEND

__all__ = ["BACKEND", "__version__"]
