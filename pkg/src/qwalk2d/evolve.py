"""
Direct time evolution of the coined walk.

One step applies the coin at every site and then shifts each chirality
component one site along its direction, with periodic wraparound:
R moves +x, L moves -x, U moves +y, D moves -y.  The update reads the old
grid and writes a fresh one; in-place updates would make the shift
order-dependent.
"""

from __future__ import annotations

import numpy as np

from .coins import Coin
from .state import WalkState

__all__ = ["evolve", "step"]

#: Displacement (dx, dy) applied to each chirality component, in (R, L, U, D) order.
SHIFTS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def step(state: WalkState, coin: Coin) -> WalkState:
    """
    Advance the walk by one step.

    The new R amplitude at (x, y) is the coin's first row applied to the
    chirality vector at (x-1, y), and analogously for L, U, D from
    (x+1, y), (x, y-1), (x, y+1), all mod N.
    """
    mixed = state.amplitudes @ coin.entries.T
    out = np.empty_like(mixed)
    for c, shift in enumerate(SHIFTS):
        out[:, :, c] = np.roll(mixed[:, :, c], shift, axis=(0, 1))
    return WalkState(out, state.t + 1, validate=False)


def evolve(state: WalkState, coin: Coin, steps: int) -> WalkState:
    """
    Apply `step` the given number of times; steps = 0 returns the input.
    """
    steps = int(steps)
    if steps < 0:
        raise ValueError(f"steps must be nonnegative, got {steps}")
    for _ in range(steps):
        state = step(state, coin)
    return state
