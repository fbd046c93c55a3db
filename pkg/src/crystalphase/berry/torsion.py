"""Torsion invariant of a band bundle over a quotient of the Brillouin torus.

For a face-centered 3d lattice with three two-fold rotation symmetries,
momentum space is most transparent in the conventional reciprocal
coordinates, where the rotations act as signed diagonal matrices and the
reciprocal lattice is the body-centered integer set (all coordinates of
equal parity).  The unit cube in these coordinates is a fundamental
domain for the torus modulo the rotations: each boundary face is glued
to the opposite one by the rotation fixing its axis, composed with a
reciprocal translation.

The glued bundle can be topologically nontrivial even when every Chern
number on the covering torus vanishes.  The obstruction is a half-integer
combination of a Wilson loop around a boundary cycle and the Berry flux
through the surface the cycle bounds twice: with the cycle l made of
three cube edges (closed by a reciprocal translation) and the surface X
made of the three cube faces meeting them, the boundary of X is 2l after
gluing, so

    value = (flux(X) / 4pi - arg Hol(l) / 2pi)  mod 1

is gauge invariant and, for a consistently glued sample, quantized to
{0, 1/2}.  Both the holonomy branch and the face orientations are fixed
conventions; the value is order two, so the opposite choice lands on the
same element of {0, 1/2}.
"""

from __future__ import annotations

import cmath
import math
from typing import Sequence

import numpy as np

from ..manybody import bloch
from ..manybody.model import LatticeModel, SymmetryData
from ..manybody.spectral import GapDegeneracyError
from .chern import (
    OVERLAP_FLOOR,
    BundleSample,
    InvariantReport,
    MeshTooCoarseError,
    SampleInconsistencyError,
    Seam,
    _overlap,
    _unit_overlap,
    wilson_holonomy,
)

# Columns of CUBE_FROM_FRACTIONAL are the reciprocal basis vectors in
# conventional cube coordinates; its inverse carries cube momenta back to
# fractional ones.  Valid for the face-centered lattice this chart is for.
CUBE_FROM_FRACTIONAL = np.array([[-1, 1, 1], [1, -1, 1], [1, 1, -1]], dtype=float)
FRACTIONAL_FROM_CUBE = np.linalg.inv(CUBE_FROM_FRACTIONAL)

# Gluing translation per face axis, in cube coordinates: it returns the
# rotated face to the opposite side of the cube and is a reciprocal
# (equal-parity) vector, so it acts on fibers by a position phase.
_FACE_SHIFT = {0: (-1, 1, 1), 1: (1, -1, 1), 2: (1, 1, -1)}


def bloch_symmetry_matrix(
    model: LatticeModel, sym: SymmetryData, k
) -> tuple[np.ndarray, np.ndarray]:
    """Momentum image and unitary of a symmetry on Bloch eigenvectors.

    Returns (k', U) with H(k') = U H(k) U*, where k' is the fractional
    momentum the symmetry sends k to.  The phases come from the cell-
    periodic gauge in which Bloch vectors carry the absolute positions
    of their orbitals.
    """
    rho = np.array(sym.rotation, dtype=float)
    rho_inv = np.rint(np.linalg.inv(rho))
    k = np.asarray(k, dtype=float)
    k_img = rho_inv.T @ k
    pos = np.array(model.positions, dtype=float)
    n = len(model.positions)
    u = np.zeros((n, n), dtype=np.complex128)
    for a in range(n):
        b = sym.orbital_map[a]
        shift = np.array(sym.orbital_shifts[a], dtype=float)
        expo = k @ pos[a] - k_img @ (shift + pos[b])
        u[b, a] = sym.phases[a] * cmath.exp(2j * math.pi * expo)
    return k_img, u


def _cube_action(sym: SymmetryData) -> np.ndarray:
    """Momentum action of a symmetry in cube coordinates, as integers."""
    rho = np.array(sym.rotation, dtype=float)
    action = CUBE_FROM_FRACTIONAL @ np.linalg.inv(rho).T @ FRACTIONAL_FROM_CUBE
    rounded = np.rint(action)
    if np.abs(action - rounded).max() > 1.0e-9:
        raise ValueError(
            f"symmetry {sym.name!r} does not act integrally on the cube chart"
        )
    return rounded.astype(int)


def _axis_rotations(model: LatticeModel) -> dict[int, tuple[SymmetryData, ...]]:
    """For each cube axis, a symmetry word acting as diag(+1 there, -1 else).

    Single stored symmetries are preferred; missing axes are filled by
    products of two stored ones.  The word is ordered right-to-left, the
    way it is applied.
    """
    found: dict[int, tuple[SymmetryData, ...]] = {}

    def classify(action: np.ndarray) -> int | None:
        for axis in range(3):
            want = -np.eye(3, dtype=int)
            want[axis, axis] = 1
            if np.array_equal(action, want):
                return axis
        return None

    actions = [(_cube_action(sym), sym) for sym in model.symmetries]
    for action, sym in actions:
        axis = classify(action)
        if axis is not None and axis not in found:
            found[axis] = (sym,)
    for action_a, sym_a in actions:
        for action_b, sym_b in actions:
            axis = classify(action_a @ action_b)
            if axis is not None and axis not in found:
                found[axis] = (sym_a, sym_b)
    if len(found) != 3:
        missing = sorted(set(range(3)) - set(found))
        raise ValueError(
            "model symmetries do not supply two-fold rotations about cube "
            f"axes {missing}; the quotient cube needs all three"
        )
    return found


def _word_matrix(
    model: LatticeModel, word: Sequence[SymmetryData], k
) -> tuple[np.ndarray, np.ndarray]:
    """Momentum image and unitary of a product of symmetries at ``k``."""
    k_cur = np.asarray(k, dtype=float)
    u_total = np.eye(len(model.positions), dtype=np.complex128)
    for sym in reversed(word):
        k_cur, u = bloch_symmetry_matrix(model, sym, k_cur)
        u_total = u @ u_total
    return k_cur, u_total


# Fixed irrational-looking momenta, away from high-symmetry points, at which
# declared rotations are checked against the Bloch matrix before any seam is
# built.  The seam overlap floor alone only notices gross breakage.
_SYMMETRY_PROBES = (
    (0.137, 0.291, 0.433),
    (0.618, 0.075, 0.854),
    (0.322, 0.766, 0.549),
)


def _check_axis_symmetry(model: LatticeModel, rotations) -> None:
    for axis, word in sorted(rotations.items()):
        for probe in _SYMMETRY_PROBES:
            k_img, u = _word_matrix(model, word, probe)
            h = bloch.bloch_matrix(model, np.asarray(probe))
            h_img = bloch.bloch_matrix(model, k_img)
            residual = float(np.max(np.abs(u @ h @ u.conj().T - h_img)))
            if residual > 1.0e-8:
                raise SampleInconsistencyError(
                    f"declared rotation about cube axis {axis} fails to map "
                    f"the bloch matrix onto itself (residual {residual:.2e}); "
                    "the hamiltonian does not descend to the quotient"
                )


def cube_quotient_sample(
    model: LatticeModel, mesh: int, bands: int = 1
) -> BundleSample:
    """Band frames on the quotient cube of a face-centered 3d model.

    Samples the lowest ``bands`` Bloch eigenvectors on a (mesh+1)^3 node
    grid over the unit cube in conventional reciprocal coordinates,
    boundary included, and attaches the seams gluing each upper face to
    the opposite one as well as the two corner-to-corner reciprocal
    translations that close the standard boundary loops.
    """
    if model.dimension != 3:
        raise ValueError(f"the quotient cube needs a 3d model, got {model.dimension}d")
    if mesh < 2:
        raise ValueError(f"mesh must be at least 2, got {mesh}")
    rotations = _axis_rotations(model)
    _check_axis_symmetry(model, rotations)

    shape = (mesh + 1,) * 3
    fibers = None
    for node in np.ndindex(shape):
        kappa = np.array(node, dtype=float) / mesh
        k = FRACTIONAL_FROM_CUBE @ kappa
        vals, vecs = np.linalg.eigh(bloch.bloch_matrix(model, k))
        if bands >= len(vals):
            raise ValueError(f"model has {len(vals)} bands, cannot take {bands}")
        split = float(vals[bands] - vals[bands - 1])
        if split < 1.0e-9:
            raise GapDegeneracyError(
                f"bands {bands - 1} and {bands} touch at cube momentum "
                f"{tuple(kappa)} (splitting {split:.3e})",
                gap=split,
            )
        if fibers is None:
            fibers = np.empty(shape + (len(vals), bands), dtype=np.complex128)
        fibers[node] = vecs[:, :bands]

    seams = []
    for axis, word in sorted(rotations.items()):
        action = _cube_action(word[0])
        for sym in word[1:]:
            action = action @ _cube_action(sym)
        shift = np.array(_FACE_SHIFT[axis], dtype=int)
        for node in np.ndindex(shape):
            if node[axis] != mesh:
                continue
            target = tuple(action @ np.array(node, dtype=int) + mesh * shift)
            k_source = FRACTIONAL_FROM_CUBE @ (np.array(node, dtype=float) / mesh)
            k_img, u = _word_matrix(model, word, k_source)
            lattice_shift = FRACTIONAL_FROM_CUBE @ shift
            k_target = FRACTIONAL_FROM_CUBE @ (np.array(target, dtype=float) / mesh)
            if not np.allclose(k_img + lattice_shift, k_target, atol=1.0e-9):
                raise SampleInconsistencyError(
                    f"face gluing for axis {axis} maps node {node} off the "
                    "grid; the model lattice does not fit the cube chart"
                )
            matrix = bloch.bloch_position_phase(model, lattice_shift)[:, None] * u
            seams.append(Seam(source=node, target=target, matrix=matrix))

    # Corner translations closing the two standard boundary loops.  Both
    # are pure reciprocal shifts, one fractional unit along the first
    # lattice direction (in opposite senses).
    for source, target, jump in (
        ((0, mesh, mesh), (mesh, 0, 0), (1, -1, -1)),
        ((mesh, 0, 0), (0, mesh, mesh), (-1, 1, 1)),
    ):
        lattice_shift = FRACTIONAL_FROM_CUBE @ np.array(jump, dtype=float)
        phases = bloch.bloch_position_phase(model, lattice_shift)
        matrix = np.diag(phases).astype(np.complex128)
        seams.append(Seam(source=source, target=target, matrix=matrix))

    return BundleSample(fibers=fibers, seams=tuple(seams))


def cube_loop_and_faces(
    mesh: int, choice: str = "upper"
) -> tuple[tuple[tuple[int, int, int], ...], tuple[tuple, ...]]:
    """The standard boundary cycle and the 2-chain it bounds twice.

    ``upper`` walks three edges of the far corner and takes the three far
    faces; ``lower`` is the antipodal choice.  Each plaquette is (node,
    axis pair) with the axis pair fixing its orientation; with these
    orientations the glued boundary of the face chain is the cycle twice.
    """
    m = mesh
    if choice == "upper":
        loop = (
            [(m, j, 0) for j in range(m + 1)]
            + [(m - i, m, 0) for i in range(1, m + 1)]
            + [(0, m, j) for j in range(1, m + 1)]
        )
        faces = (
            [((m, j, k), 1, 2) for j in range(m) for k in range(m)]
            + [((i, m, k), 2, 0) for i in range(m) for k in range(m)]
            + [((i, j, m), 0, 1) for i in range(m) for j in range(m)]
        )
    elif choice == "lower":
        loop = (
            [(0, m - j, m) for j in range(m + 1)]
            + [(i, 0, m) for i in range(1, m + 1)]
            + [(m, 0, m - j) for j in range(1, m + 1)]
        )
        faces = (
            [((0, j, k), 1, 2) for j in range(m) for k in range(m)]
            + [((i, 0, k), 2, 0) for i in range(m) for k in range(m)]
            + [((i, j, 0), 0, 1) for i in range(m) for j in range(m)]
        )
    else:
        raise ValueError(f"choice must be 'upper' or 'lower', got {choice!r}")
    return tuple(loop), tuple(faces)


def _plaquette_phase(sample: BundleSample, node, ax1: int, ax2: int) -> float:
    shape = sample.grid
    n0 = tuple(int(c) for c in node)
    n1 = list(n0)
    n1[ax1] += 1
    n12 = list(n1)
    n12[ax2] += 1
    n2 = list(n0)
    n2[ax2] += 1
    corners = [n0, tuple(n1), tuple(n12), tuple(n2)]
    for corner in corners:
        if any(not 0 <= c < g for c, g in zip(corner, shape)):
            raise ValueError(f"plaquette corner {corner} outside grid {shape}")
    loop = 1.0 + 0.0j
    for a, b in zip(corners, corners[1:] + corners[:1]):
        loop *= _unit_overlap(sample.frame(a), sample.frame(b), f"link {a} -> {b}")
    return cmath.phase(loop)


def torsion_invariant(
    sample: BundleSample,
    loop: Sequence[tuple[int, ...]],
    faces: Sequence[tuple],
    invariant: str = "torsion",
) -> InvariantReport:
    """Half-integer gluing obstruction from a loop and the chain it bounds.

    Checks every seam of the sample first: identified fibers must agree
    through their gluing matrix up to gauge, or no bundle over the
    quotient exists and the number would be meaningless.  The result is
    reported mod 1 together with its distance from the nearest element of
    {0, 1/2}; meaningful quantization additionally needs stability under
    mesh refinement, which stays the caller's responsibility.
    """
    for seam in sample.seams:
        glued = seam.matrix @ sample.frame(seam.source)
        modulus = abs(_overlap(glued, sample.frame(seam.target)))
        if modulus < OVERLAP_FLOOR:
            raise SampleInconsistencyError(
                f"fibers identified by the seam {seam.source} -> {seam.target} "
                f"overlap with modulus {modulus:.3f} through the gluing "
                "matrix; the sample does not descend to the quotient"
            )

    holonomy = wilson_holonomy(sample, loop)
    phases = [_plaquette_phase(sample, node, ax1, ax2) for node, ax1, ax2 in faces]
    margin = math.pi - max(abs(p) for p in phases)
    if margin <= 0.0:
        raise MeshTooCoarseError(
            f"a face plaquette reached phase magnitude {max(abs(p) for p in phases):.3f}"
            " >= pi; refine the mesh"
        )
    flux = math.fsum(phases)
    value = (flux / (4.0 * math.pi) - cmath.phase(holonomy) / (2.0 * math.pi)) % 1.0
    distance = min(value, abs(value - 0.5), 1.0 - value)
    return InvariantReport(
        invariant=invariant,
        value=value,
        admissibility_margin=margin,
        grid=sample.grid,
        plaquette_field=tuple(
            (node, (ax1, ax2), phase)
            for (node, ax1, ax2), phase in zip(faces, phases)
        ),
        details={
            "quantization_distance": distance,
            "holonomy_phase": cmath.phase(holonomy),
            "surface_flux": flux,
        },
    )


def cube_torsion_report(
    model: LatticeModel, mesh: int, bands: int = 1, choice: str = "upper"
) -> InvariantReport:
    """Sample the quotient cube of ``model`` and evaluate its obstruction."""
    sample = cube_quotient_sample(model, mesh, bands=bands)
    loop, faces = cube_loop_and_faces(mesh, choice=choice)
    report = torsion_invariant(sample, loop, faces)
    details = dict(report.details)
    details["choice"] = choice
    details["bands"] = bands
    return InvariantReport(
        invariant=report.invariant,
        value=report.value,
        admissibility_margin=report.admissibility_margin,
        grid=report.grid,
        plaquette_field=report.plaquette_field,
        details=details,
    )
