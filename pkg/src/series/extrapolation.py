"""
Richardson acceleration of slowly converging partial sums
"""
from typing import List, Sequence, Tuple

from mpmath import mp

from errors import InsufficientOrderError
from models.results import ExtrapolatedValue


def richardson_extrapolate(values: Sequence, nodes: Sequence[int], p: int) -> Tuple[List, List[int]]:
    """
    One Richardson level on a sequence indexed by integer nodes.

    Assumes values[k] = L + c * nodes[k]^-p + (higher order) and eliminates
    the c term between neighbours.

    Args:
        values: approximations of the limit L
        nodes: increasing indices the values belong to
        p: decay exponent of the leading error term

    Returns:
        The extrapolated values and the nodes they are attached to.

    Raises:
        InsufficientOrderError: fewer than two values
    """
    if len(values) < 2:
        raise InsufficientOrderError("Richardson extrapolation requires at least two values")
    out = []
    for k in range(1, len(values)):
        a = mp.mpf(nodes[k - 1]) ** p
        b = mp.mpf(nodes[k]) ** p
        out.append((b * values[k] - a * values[k - 1]) / (b - a))
    return out, list(nodes[1:])


def accelerate(values: Sequence, nodes: Sequence[int], powers: Sequence[int]) -> ExtrapolatedValue:
    """
    Apply successive Richardson levels with the given exponents.

    The estimate is the last value of the deepest level; the error is the
    spread of that level's last two values.
    """
    values = list(values)
    if not values:
        raise InsufficientOrderError("nothing to extrapolate")
    levels = [values]
    current, current_nodes = values, list(nodes)
    for p in powers:
        if len(current) < 3:
            break
        current, current_nodes = richardson_extrapolate(current, current_nodes, p)
        levels.append(current)

    if len(current) >= 2:
        error = abs(current[-1] - current[-2])
    else:
        error = mp.inf
    return ExtrapolatedValue(value=current[-1], error=error, partial_sums=values, levels=levels)
