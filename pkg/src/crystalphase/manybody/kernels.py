"""Hot loops for many-body operator assembly.

The two kernels below walk the full Fock basis once and emit sparse
structure: one-body terms as COO triples tagged with the term that
produced them, diagonal terms as a dense vector.  Both are written as
plain Python over numpy arrays and compiled with numba when it is
available; set ``CRYSTALPHASE_NO_NUMBA=1`` to force the interpreted
fallback (the arrays coming out are identical either way, which is what
``scripts/bench_kernels.py`` leans on).

Sign convention: a basis bitmask stands for the product of creation
operators applied in descending mode order, highest mode leftmost.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    _HAVE_NUMBA = False

__all__ = ["numba_active", "hopping_structure", "diagonal_vector"]


def numba_active() -> bool:
    return _HAVE_NUMBA and os.environ.get("CRYSTALPHASE_NO_NUMBA") != "1"


def _hopping_structure_impl(states, from_modes, to_modes):
    dim = states.shape[0]
    n_terms = from_modes.shape[0]
    cap = dim * n_terms
    rows = np.empty(cap, dtype=np.int64)
    cols = np.empty(cap, dtype=np.int64)
    signs = np.empty(cap, dtype=np.int8)
    term_ids = np.empty(cap, dtype=np.int32)
    k = 0
    for i in range(dim):
        s = states[i]
        for t in range(n_terms):
            f = from_modes[t]
            g = to_modes[t]
            if f == g:
                # displacement wrapped back onto the same mode: a density term
                if (s >> f) & 1:
                    rows[k] = i
                    cols[k] = i
                    signs[k] = 1
                    term_ids[k] = t
                    k += 1
                continue
            if ((s >> f) & 1) == 0 or ((s >> g) & 1) != 0:
                continue
            s1 = s ^ (np.int64(1) << f)
            # creation operators act in descending mode order, so each
            # operator anticommutes past the occupied modes above it
            above_f = s >> (f + 1)
            above_g = s1 >> (g + 1)
            # sign parity is popcount(above_f) + popcount(above_g), and the
            # xor has the same parity; shift-add popcount avoids the SWAR
            # multiply whose overflow behavior differs between int64 and
            # Python ints
            x = above_f ^ above_g
            x = x - ((x >> 1) & 0x5555555555555555)
            x = (x & 0x3333333333333333) + ((x >> 2) & 0x3333333333333333)
            x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0F
            x = x + (x >> 8)
            x = x + (x >> 16)
            x = x + (x >> 32)
            crossings = x & 0x7F
            s2 = s1 | (np.int64(1) << g)
            j = np.searchsorted(states, s2)
            rows[k] = j
            cols[k] = i
            signs[k] = 1 if (crossings & 1) == 0 else -1
            term_ids[k] = t
            k += 1
    return rows[:k], cols[:k], signs[:k], term_ids[:k]


def _diagonal_vector_impl(states, mode_energies, pair_a, pair_b, pair_strength):
    dim = states.shape[0]
    n_modes = mode_energies.shape[0]
    n_pairs = pair_a.shape[0]
    out = np.zeros(dim, dtype=np.float64)
    for i in range(dim):
        s = states[i]
        acc = 0.0
        for m in range(n_modes):
            if (s >> m) & 1:
                acc += mode_energies[m]
        for p in range(n_pairs):
            if ((s >> pair_a[p]) & 1) and ((s >> pair_b[p]) & 1):
                acc += pair_strength[p]
        out[i] = acc
    return out


if _HAVE_NUMBA:
    _hopping_structure_jit = njit(cache=True)(_hopping_structure_impl)
    _diagonal_vector_jit = njit(cache=True)(_diagonal_vector_impl)


def hopping_structure(states, from_modes, to_modes):
    """COO structure of sum_t amp_t c^dag_{to_t} c_{from_t} over the basis.

    Returns (rows, cols, signs, term_ids); the caller scales each entry by
    the amplitude of its term and adds the Hermitian conjugate.  The
    parity of crossings between annihilation and creation site fixes the
    fermionic sign.  Entries with from == to are emitted on the diagonal
    when the mode is occupied.
    """
    impl = _hopping_structure_jit if numba_active() else _hopping_structure_impl
    return impl(
        np.ascontiguousarray(states, dtype=np.int64),
        np.ascontiguousarray(from_modes, dtype=np.int64),
        np.ascontiguousarray(to_modes, dtype=np.int64),
    )


def diagonal_vector(states, mode_energies, pair_a, pair_b, pair_strength):
    """Diagonal of onsite energies plus density-density interactions."""
    impl = _diagonal_vector_jit if numba_active() else _diagonal_vector_impl
    return impl(
        np.ascontiguousarray(states, dtype=np.int64),
        np.ascontiguousarray(mode_energies, dtype=np.float64),
        np.ascontiguousarray(pair_a, dtype=np.int64),
        np.ascontiguousarray(pair_b, dtype=np.int64),
        np.ascontiguousarray(pair_strength, dtype=np.float64),
    )
