"""Upper bounds on the ML frame error probability of binary linear codes."""

from .extended import bec_bound, bsc_bec_bound, extended_bound, quinary_bound
from .models import BoundResult, RectLimits, make_limits
from .poltyrev import poltyrev_bsc, poltyrev_split, zeta_star
from .rectangular import choose_rect, rect_bound, rect_bound_chernoff

__all__ = [
    "BoundResult",
    "RectLimits",
    "bec_bound",
    "bsc_bec_bound",
    "choose_rect",
    "extended_bound",
    "make_limits",
    "poltyrev_bsc",
    "poltyrev_split",
    "quinary_bound",
    "rect_bound",
    "rect_bound_chernoff",
    "zeta_star",
]
