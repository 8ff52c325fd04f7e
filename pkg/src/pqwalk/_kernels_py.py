"""Pure-numpy step kernels (fallback twin of the Cython extension).

Both kernel modules share one contract: they mutate the amplitude arrays
in place, apply `nsteps` walk steps, and return 0 on success or a nonzero
code when an amplitude would be shifted past the window edge (1: lower
edge, down component; 2: upper edge, up component).
"""

import numpy as np

BACKEND = "python"


def run_full_steps(down, up, cos_table, sin_table, nsteps):
    """Apply `nsteps` coin-then-shift steps; angle per step from the tables."""
    n = down.shape[0]
    for s in range(nsteps):
        c = cos_table[s]
        mis = -1j * sin_table[s]
        new_down = c * down + mis * up
        new_up = mis * down + c * up
        if new_down[0] != 0:
            return 1
        if new_up[n - 1] != 0:
            return 2
        down[:-1] = new_down[1:]
        down[-1] = 0
        up[1:] = new_up[:-1]
        up[0] = 0
    return 0


def run_split_steps(down, up, cos1, sin1, cos2, sin2, nsteps):
    """Apply `nsteps` split steps: coin 1, down half-shift, coin 2, up half-shift."""
    n = down.shape[0]
    mis1 = -1j * sin1
    mis2 = -1j * sin2
    for s in range(nsteps):
        new_down = cos1 * down + mis1 * up
        new_up = mis1 * down + cos1 * up
        if new_down[0] != 0:
            return 1
        down[:-1] = new_down[1:]
        down[-1] = 0
        up[:] = new_up

        new_down = cos2 * down + mis2 * up
        new_up = mis2 * down + cos2 * up
        if new_up[n - 1] != 0:
            return 2
        up[1:] = new_up[:-1]
        up[0] = 0
        down[:] = new_down
    return 0
