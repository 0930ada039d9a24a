"""Contractive and C(phi) completions of 2x2 block matrices, operator balls and holes."""

from .balls import OperatorBall, OperatorHole, ball_member, hole_make, hole_member, hole_singleton
from .completion import (
    PI_OVER_TWO_ONLY,
    DualPair,
    complete,
    critical_angle,
    dual_pair_make,
    recover_k,
    sectorial_complete,
)
from .errors import OpExtError
from .matcore import Tolerances, current_tolerances, use_tolerances
from .sector import cayley, cayley_inv, in_cphi

__version__ = "0.1.0"

__all__ = [
    "PI_OVER_TWO_ONLY",
    "DualPair",
    "OpExtError",
    "OperatorBall",
    "OperatorHole",
    "Tolerances",
    "ball_member",
    "cayley",
    "cayley_inv",
    "complete",
    "critical_angle",
    "current_tolerances",
    "dual_pair_make",
    "hole_make",
    "hole_member",
    "hole_singleton",
    "in_cphi",
    "recover_k",
    "sectorial_complete",
    "use_tolerances",
]
