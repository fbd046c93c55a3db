"""Many-body operators on a finite cluster with twisted boundaries.

``ClusterOperator`` expands a model's displacement terms over all cells
once, caches the sparse Fock-space structure, and then assembles the
Hamiltonian at any boundary twist by rescaling values; the expensive
basis walk never reruns during a twist sweep.

Boundary twists enter through winding numbers: a hop whose target cell
falls outside the cluster wraps around and picks up exp(i theta . w),
where w counts the wraps per direction.  A Landau flux field adds static
per-hop phases exp(-2 pi i phi m_x y) in the axial gauge, with the row
of the source cell; translations along y then need the matching
compensating gauge factor, which ``translation_operator`` applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from crystalphase.manybody.basis import enumerate_occupations
from crystalphase.manybody.kernels import diagonal_vector, hopping_structure
from crystalphase.manybody.model import LatticeModel, ModelFormatError, SymmetryData

__all__ = ["TwistPoint", "ClusterOperator"]


@dataclass(frozen=True)
class TwistPoint:
    """Boundary phases in radians, one per lattice direction."""

    angles: tuple[float, ...]

    @classmethod
    def zero(cls, dimension: int) -> "TwistPoint":
        return cls((0.0,) * dimension)

    def __post_init__(self):
        for a in self.angles:
            if not math.isfinite(a):
                raise ValueError("twist angles must be finite")


class ClusterOperator:
    """Operator factory for one model: Hamiltonians, translations, symmetries."""

    def __init__(self, model: LatticeModel):
        self.model = model
        self.states = enumerate_occupations(model.n_modes, model.particles)
        self._expand_terms()
        self._rows, self._cols, self._signs, self._term_ids = hopping_structure(
            self.states, self._from_modes, self._to_modes
        )
        self._diag = self._build_diagonal()

    @property
    def dimension(self) -> int:
        return len(self.states)

    # ------------------------------------------------------------ assembly

    def _flux_phase(self, cell: tuple[int, ...], displacement: tuple[int, ...]) -> complex:
        flux = self.model.flux
        if flux is None:
            return 1.0
        # axial gauge, x-leg taken at the source row
        return complex(
            np.exp(-2j * np.pi * flux.per_plaquette * displacement[0] * cell[1])
        )

    def _expand_terms(self):
        model = self.model
        froms, tos, amps, windings = [], [], [], []
        for term in model.hopping:
            for rank in range(model.n_cells):
                cell = model.cell_coords(rank)
                target = tuple(c + d for c, d in zip(cell, term.cell))
                froms.append(rank * model.orbitals + term.orbital_from)
                tos.append(model.mode_index(term.orbital_to, target))
                amps.append(term.amplitude * self._flux_phase(cell, term.cell))
                windings.append(
                    tuple(t // n for t, n in zip(target, model.cells))
                )
        self._from_modes = np.asarray(froms, dtype=np.int64)
        self._to_modes = np.asarray(tos, dtype=np.int64)
        self._amps = np.asarray(amps, dtype=np.complex128)
        self._windings = np.asarray(windings, dtype=np.int64).reshape(
            len(froms), model.dimension
        )

    def _build_diagonal(self) -> np.ndarray:
        model = self.model
        energies = np.empty(model.n_modes, dtype=np.float64)
        for mode in range(model.n_modes):
            orb, _ = model.mode_orbital_cell(mode)
            energies[mode] = model.onsite[orb]
        pair_a, pair_b, strength = [], [], []
        for term in model.interactions:
            for rank in range(model.n_cells):
                cell = model.cell_coords(rank)
                target = tuple(c + d for c, d in zip(cell, term.cell))
                pair_a.append(rank * model.orbitals + term.orbital_a)
                pair_b.append(model.mode_index(term.orbital_b, target))
                strength.append(term.strength)
        return diagonal_vector(
            self.states,
            energies,
            np.asarray(pair_a, dtype=np.int64),
            np.asarray(pair_b, dtype=np.int64),
            np.asarray(strength, dtype=np.float64),
        )

    def hamiltonian(self, twist: TwistPoint | None = None) -> sp.csr_matrix:
        """Sparse Hamiltonian at the given boundary twist (default: none)."""
        model = self.model
        if twist is None:
            twist = TwistPoint.zero(model.dimension)
        if len(twist.angles) != model.dimension:
            raise ValueError(
                f"twist has {len(twist.angles)} angles, model is {model.dimension}d"
            )
        theta = np.asarray(twist.angles, dtype=np.float64)
        phases = self._amps * np.exp(1j * (self._windings @ theta))
        values = self._signs * phases[self._term_ids]
        dim = self.dimension
        upper = sp.coo_matrix((values, (self._rows, self._cols)), shape=(dim, dim))
        h = (upper + upper.conj().T).tocsr()
        h += sp.diags(self._diag)
        return h.tocsr()

    # ------------------------------------------- one-body unitaries lifted

    def one_body_operator(self, perm: np.ndarray, phases: np.ndarray) -> sp.csr_matrix:
        """Lift mode -> perm[mode] with per-mode phases to the Fock basis.

        The operator sends each occupied mode through the permutation and
        multiplies the fermionic reordering sign, so it is unitary whenever
        the phases are unimodular.
        """
        states = self.states
        dim = len(states)
        rows = np.empty(dim, dtype=np.int64)
        vals = np.empty(dim, dtype=np.complex128)
        n_modes = self.model.n_modes
        for i in range(dim):
            s = int(states[i])
            images = []
            phase = complex(1.0)
            for m in range(n_modes):
                if (s >> m) & 1:
                    images.append(int(perm[m]))
                    phase *= phases[m]
            inversions = 0
            for a in range(len(images)):
                for b in range(a + 1, len(images)):
                    if images[a] > images[b]:
                        inversions += 1
            mask = 0
            for m in images:
                if (mask >> m) & 1:
                    raise ValueError("mode permutation is not injective")
                mask |= 1 << m
            j = int(np.searchsorted(states, mask))
            rows[i] = j
            vals[i] = phase * (-1 if inversions % 2 else 1)
        cols = np.arange(dim, dtype=np.int64)
        return sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()

    def translation_operator(self, direction: int) -> sp.csr_matrix:
        """Unit translation along one direction, flux-compensated if needed."""
        model = self.model
        if not 0 <= direction < model.dimension:
            raise ValueError(f"no direction {direction} in {model.dimension}d")
        perm = np.empty(model.n_modes, dtype=np.int64)
        phases = np.ones(model.n_modes, dtype=np.complex128)
        for mode in range(model.n_modes):
            orb, cell = model.mode_orbital_cell(mode)
            shifted = tuple(
                c + (1 if mu == direction else 0) for mu, c in enumerate(cell)
            )
            perm[mode] = model.mode_index(orb, shifted)
            if model.flux is not None and direction == 1:
                # moving one row in y shifts the axial gauge; undo it with
                # a phase linear in the column index
                phases[mode] = np.exp(
                    -2j * np.pi * model.flux.per_plaquette * cell[0]
                )
        return self.one_body_operator(perm, phases)

    def symmetry_operator(self, sym: SymmetryData) -> sp.csr_matrix:
        """Lift a point-type symmetry from the model description."""
        model = self.model
        rot = sym.rotation
        d = model.dimension
        for j in range(d):
            for i in range(d):
                if (rot[i][j] * model.cells[j]) % model.cells[i] != 0:
                    raise ModelFormatError(
                        f"symmetry {sym.name!r}: rotation is incompatible "
                        f"with cluster extents {model.cells}"
                    )
        perm = np.empty(model.n_modes, dtype=np.int64)
        phases = np.ones(model.n_modes, dtype=np.complex128)
        for mode in range(model.n_modes):
            orb, cell = model.mode_orbital_cell(mode)
            rotated = tuple(
                sum(rot[i][j] * cell[j] for j in range(d)) + sym.orbital_shifts[orb][i]
                for i in range(d)
            )
            perm[mode] = model.mode_index(sym.orbital_map[orb], rotated)
            phases[mode] = sym.phases[orb]
        return self.one_body_operator(perm, phases)

    # ---------------------------------------------------------- one body

    def single_particle_matrix(self, twist: TwistPoint | None = None) -> np.ndarray:
        """Dense one-body Hamiltonian on the cluster (mode basis)."""
        model = self.model
        if twist is None:
            twist = TwistPoint.zero(model.dimension)
        theta = np.asarray(twist.angles, dtype=np.float64)
        n = model.n_modes
        h = np.zeros((n, n), dtype=np.complex128)
        phases = self._amps * np.exp(1j * (self._windings @ theta))
        for f, t, amp in zip(self._from_modes, self._to_modes, phases):
            h[t, f] += amp
        h = h + h.conj().T
        for mode in range(n):
            orb, _ = model.mode_orbital_cell(mode)
            h[mode, mode] += model.onsite[orb]
        return h
