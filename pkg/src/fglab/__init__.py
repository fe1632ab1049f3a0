"""fg-lab: symbolic and numeric checks for asymptotically hyperbolic geometry."""
from __future__ import annotations

__version__ = "0.1.0"
