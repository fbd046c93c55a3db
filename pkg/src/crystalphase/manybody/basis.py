"""Occupation-number basis for fermions on a finite mode set.

States are bitmasks in int64 (mode count is bounded by the desk-scale
clusters this package targets, far below 62), enumerated in increasing
numeric order so that lookup is a binary search instead of a hash map.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["space_dimension", "enumerate_occupations", "state_rank", "occupied_modes"]


def space_dimension(n_modes: int, n_particles: int) -> int:
    return math.comb(n_modes, n_particles)


def enumerate_occupations(n_modes: int, n_particles: int) -> np.ndarray:
    """All n_particles-subsets of n_modes as bitmasks, ascending.

    Gosper's hack walks the masks in numeric order directly.
    """
    if not 0 <= n_particles <= n_modes:
        raise ValueError(f"cannot place {n_particles} fermions in {n_modes} modes")
    if n_modes > 62:
        raise ValueError("mode count exceeds the int64 bitmask range")
    dim = space_dimension(n_modes, n_particles)
    out = np.empty(dim, dtype=np.int64)
    if n_particles == 0:
        out[0] = 0
        return out
    v = (1 << n_particles) - 1
    for i in range(dim):
        out[i] = v
        c = v & -v
        r = v + c
        v = (((r ^ v) >> 2) // c) | r
    return out


def state_rank(states: np.ndarray, mask: int) -> int:
    """Index of ``mask`` in the ascending state table."""
    idx = int(np.searchsorted(states, mask))
    if idx >= len(states) or states[idx] != mask:
        raise KeyError(f"state {mask:#x} not in basis")
    return idx


def occupied_modes(mask: int) -> tuple[int, ...]:
    out = []
    m = 0
    while mask:
        if mask & 1:
            out.append(m)
        mask >>= 1
        m += 1
    return tuple(out)
