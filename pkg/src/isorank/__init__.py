"""Search tools for elliptic curves over Q with a rational isogeny and large rank."""

from .ec import WeierstrassModel, ShortModel, compute_invariants, minimal_model, twist
from .modp import ap_table, ApTable
from .errors import IsorankError

__all__ = ["WeierstrassModel", "ShortModel", "compute_invariants", "minimal_model", "twist",
           "ap_table", "ApTable", "IsorankError"]
__version__ = "0.1.0"
