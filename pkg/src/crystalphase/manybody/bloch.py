"""Single-particle momentum-space Hamiltonians for cluster models.

Two builders share the model's displacement terms.  ``bloch_matrix``
works in the atomic gauge, with hopping phases measured between true
orbital positions; shifting k by a reciprocal lattice vector then
conjugates the matrix by a diagonal position phase instead of leaving it
untouched, which is exactly the bookkeeping quotient-domain invariants
need.  ``magnetic_bloch_matrix`` folds a Landau flux into a magnetic
supercell along y and drops position offsets, so it is strictly periodic
on the unit magnetic Brillouin zone.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from crystalphase.manybody.model import LatticeModel, ModelFormatError

__all__ = [
    "bloch_matrix",
    "bloch_position_phase",
    "magnetic_bloch_matrix",
    "allowed_momenta",
    "allowed_magnetic_momenta",
]


def _check_k(model: LatticeModel, k) -> np.ndarray:
    k = np.asarray(k, dtype=np.float64)
    if k.shape != (model.dimension,):
        raise ValueError(
            f"momentum needs {model.dimension} fractional components, got {k.shape}"
        )
    return k


def bloch_matrix(model: LatticeModel, k) -> np.ndarray:
    """Orbital-space Hamiltonian at fractional momentum k (no flux).

    Entry (b, a) collects hops a -> b with phase exp(2 pi i k . v) for
    the full bond vector v, cell displacement plus position offset.
    """
    if model.flux is not None:
        raise ModelFormatError(
            "model carries a flux field; use magnetic_bloch_matrix"
        )
    k = _check_k(model, k)
    pos = np.asarray(model.positions, dtype=np.float64)
    h = np.zeros((model.orbitals, model.orbitals), dtype=np.complex128)
    for term in model.hopping:
        v = np.asarray(term.cell) + pos[term.orbital_to] - pos[term.orbital_from]
        h[term.orbital_to, term.orbital_from] += term.amplitude * np.exp(
            2j * math.pi * float(k @ v)
        )
    h = h + h.conj().T
    h[np.diag_indices_from(h)] += np.asarray(model.onsite)
    return h


def bloch_position_phase(model: LatticeModel, shift) -> np.ndarray:
    """Diagonal sewing unitary for the atomic gauge, as a vector.

    For an integer reciprocal shift L the Bloch matrices obey
    H(k + L) = V H(k) V* with V = diag(exp(2 pi i L . r)) over orbital
    positions r, so multiplying an eigenvector by this vector carries it
    from the fiber at k to the fiber at k + L.
    """
    shift = _check_k(model, shift)
    pos = np.asarray(model.positions, dtype=np.float64)
    return np.exp(2j * math.pi * (pos @ shift))


def allowed_momenta(model: LatticeModel, twist=None) -> list[np.ndarray]:
    """Fractional momenta a finite cluster samples at a given twist."""
    offsets = (
        np.zeros(model.dimension)
        if twist is None
        else np.asarray(twist, dtype=np.float64) / (2.0 * math.pi)
    )
    grids = [
        (np.arange(n) + off) / n for n, off in zip(model.cells, offsets)
    ]
    return [np.array(combo) for combo in itertools.product(*grids)]


def magnetic_bloch_matrix(model: LatticeModel, k) -> np.ndarray:
    """Bloch Hamiltonian of a Landau-flux model on its magnetic cell.

    The magnetic cell stacks q structural cells along y; the matrix is
    (q * orbitals) square, indexed by (row within the cell, orbital),
    and exactly periodic under k -> k + e_mu.
    """
    if model.flux is None:
        raise ModelFormatError("model has no flux field; use bloch_matrix")
    if model.dimension != 2:
        raise ModelFormatError("magnetic Bloch reduction needs a 2d model")
    k = _check_k(model, k)
    q = model.flux.q
    phi = model.flux.per_plaquette
    n_orb = model.orbitals
    size = q * n_orb
    h = np.zeros((size, size), dtype=np.complex128)
    for term in model.hopping:
        dx, dy = term.cell
        for j in range(q):
            wrap, j2 = divmod(j + dy, q)
            amp = term.amplitude * np.exp(-2j * math.pi * phi * dx * j)
            amp *= np.exp(2j * math.pi * (k[0] * dx + k[1] * wrap))
            h[j2 * n_orb + term.orbital_to, j * n_orb + term.orbital_from] += amp
    h = h + h.conj().T
    onsite = np.tile(np.asarray(model.onsite), q)
    h[np.diag_indices_from(h)] += onsite
    return h


def allowed_magnetic_momenta(model: LatticeModel, twist=None) -> list[np.ndarray]:
    """Magnetic-cell momenta matching a finite cluster at a given twist."""
    if model.flux is None:
        raise ModelFormatError("model has no flux field")
    q = model.flux.q
    if model.cells[1] % q != 0:
        raise ModelFormatError(
            f"y extent {model.cells[1]} is not a multiple of the magnetic "
            f"cell height {q}"
        )
    n1, n2 = model.cells[0], model.cells[1] // q
    offsets = (
        (0.0, 0.0)
        if twist is None
        else tuple(a / (2.0 * math.pi) for a in twist)
    )
    out = []
    for j in range(n1):
        for m in range(n2):
            out.append(
                np.array([(j + offsets[0]) / n1, (m + offsets[1]) / n2])
            )
    return out
