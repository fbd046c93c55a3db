"""Link-variable invariants of sampled ground-state bundles.

A family of ground spaces over a discretized parameter torus (Bloch
momenta or boundary twists) is stored as one orthonormal frame per grid
node.  Connection data is carried by normalized overlaps between
neighboring frames; for an m-dimensional ground space the determinant of
the m x m overlap matrix tracks the determinant line.  Plaquette phases
built from four links are gauge invariant, and their total over a full
torus is 2 pi times an exact integer, the Chern number of the sampled
bundle, as long as every plaquette phase stays clear of the branch cut.

Conventions.  The link from node a to node b is <psi_a | psi_b> (frame
determinant for m > 1), normalized to unit modulus.  The plaquette at n
in the oriented axis pair (mu, nu) is the phase of the loop product
n -> n+mu -> n+mu+nu -> n+nu -> n.  With these orientations the lowest
band of the flux-1/3 magnetic cell model carries Chern number +1,
matching the sign of the Berry curvature 2 Im tr(P dP dP).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..manybody.hamiltonian import ClusterOperator
from ..manybody.model import LatticeModel
from ..manybody.spectral import GapDegeneracyError, TwistSweep, sweep_twist_grid
from ..manybody import bloch

# Identified fibers must match through their sewing operator almost
# exactly; neighboring fibers on a coarse grid only need to stay well
# clear of orthogonal, since plaquette admissibility is checked anyway.
OVERLAP_FLOOR = 0.9
LINK_FLOOR = 0.1


class MeshTooCoarseError(RuntimeError):
    """Raised when links or plaquettes are too ambiguous to trust.

    A near-orthogonal pair of neighboring fibers, or a plaquette phase at
    the edge of the principal branch, means the grid undersamples the
    bundle; the remedy is always a finer mesh, never a looser tolerance.
    """


class SampleInconsistencyError(RuntimeError):
    """Raised when a sample violates its own identification data."""


class DegenerateGroundStateError(RuntimeError):
    """Raised when a unique ground state was required but m > 1 showed up."""


@dataclass(frozen=True, eq=False)
class Seam:
    """Identification of two boundary nodes of a fundamental domain.

    The fiber at ``target`` is the image of the fiber at ``source`` under
    ``matrix``, up to gauge.  Seams close loops that leave the sampled
    domain through a quotient identification.
    """

    source: tuple[int, ...]
    target: tuple[int, ...]
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class BundleSample:
    """Orthonormal m-frames on a uniform parameter grid.

    ``fibers`` has shape grid + (dim, m).  A sample without seams lives
    on a full torus and links wrap modularly; a sample with seams covers
    a fundamental domain boundary-to-boundary, and wrapping is only
    defined through an explicit seam.
    """

    fibers: np.ndarray
    seams: tuple[Seam, ...] = ()

    @property
    def grid(self) -> tuple[int, ...]:
        return self.fibers.shape[:-2]

    @property
    def degeneracy(self) -> int:
        return self.fibers.shape[-1]

    def frame(self, node: tuple[int, ...]) -> np.ndarray:
        return self.fibers[tuple(node)]


@dataclass(frozen=True, eq=False)
class InvariantReport:
    """One computed invariant with the evidence needed to trust it.

    ``admissibility_margin`` is pi minus the largest plaquette phase
    magnitude; a positive margin certifies that no plaquette wrapped the
    branch cut, which is what makes the Chern total exactly integral.
    ``plaquette_field`` keeps the per-plaquette phases for inspection or
    export.
    """

    invariant: str
    value: int | float
    admissibility_margin: float
    grid: tuple[int, ...]
    plaquette_field: np.ndarray | tuple
    details: dict = field(default_factory=dict)


def _normalize(values: np.ndarray, what: str) -> np.ndarray:
    mods = np.abs(values)
    if float(mods.min()) < LINK_FLOOR:
        worst = np.unravel_index(int(np.argmin(mods)), mods.shape)
        raise MeshTooCoarseError(
            f"{what} at node {tuple(worst)} has modulus {float(mods.min()):.3f}, "
            f"below the link floor {LINK_FLOOR}; refine the mesh"
        )
    return values / mods


def _overlap(frame_a: np.ndarray, frame_b: np.ndarray) -> complex:
    """Determinant of the frame overlap, before normalization."""
    gram = frame_a.conj().T @ frame_b
    if gram.shape == (1, 1):
        return complex(gram[0, 0])
    return complex(np.linalg.det(gram))


def _unit_overlap(frame_a: np.ndarray, frame_b: np.ndarray, what: str) -> complex:
    value = _overlap(frame_a, frame_b)
    if abs(value) < LINK_FLOOR:
        raise MeshTooCoarseError(
            f"{what} has overlap modulus {abs(value):.3f}, below the link "
            f"floor {LINK_FLOOR}; refine the mesh"
        )
    return value / abs(value)


def overlap_link(sample: BundleSample, node: tuple[int, ...], direction: int) -> complex:
    """Unit-modulus link from ``node`` one step forward along ``direction``.

    On a torus sample the step wraps modularly.  On a seamed sample both
    endpoints must be stored nodes; seam crossings are the business of
    holonomy and torsion routines, which know which identification to
    apply.
    """
    grid = sample.grid
    if not 0 <= direction < len(grid):
        raise ValueError(f"direction {direction} out of range for grid {grid}")
    node = tuple(int(c) for c in node)
    if any(not 0 <= c < g for c, g in zip(node, grid)):
        raise ValueError(f"node {node} outside grid {grid}")
    ahead = list(node)
    ahead[direction] += 1
    if ahead[direction] == grid[direction]:
        if sample.seams:
            raise ValueError(
                f"step from {node} along axis {direction} leaves the sampled "
                "fundamental domain; only seams cross its boundary"
            )
        ahead[direction] = 0
    return _unit_overlap(
        sample.frame(node),
        sample.frame(tuple(ahead)),
        f"link {node} -> {tuple(ahead)}",
    )


def _axis_links(fibers: np.ndarray, axis: int) -> np.ndarray:
    """All forward links along one axis of a torus sample, normalized."""
    ahead = np.roll(fibers, -1, axis=axis)
    grams = np.einsum("...dm,...dn->...mn", fibers.conj(), ahead)
    if fibers.shape[-1] == 1:
        dets = grams[..., 0, 0]
    else:
        dets = np.linalg.det(grams)
    return _normalize(dets, f"axis-{axis} link")


def plaquette_field(sample: BundleSample) -> np.ndarray:
    """Gauge-invariant plaquette phases of a 2d torus sample."""
    if len(sample.grid) != 2:
        raise ValueError(f"plaquette field needs a 2d grid, got {sample.grid}")
    if sample.seams:
        raise ValueError("plaquette field over a torus cannot carry seams")
    links_x = _axis_links(sample.fibers, 0)
    links_y = _axis_links(sample.fibers, 1)
    loops = (
        links_x
        * np.roll(links_y, -1, axis=0)
        * np.conj(np.roll(links_x, -1, axis=1))
        * np.conj(links_y)
    )
    return np.angle(loops)


def fhs_chern(sample: BundleSample, invariant: str = "chern") -> InvariantReport:
    """Chern number of a 2d torus sample by the plaquette method.

    The sum of plaquette phases is 2 pi times an integer whenever every
    phase sits strictly inside the principal branch, because each link
    enters two plaquettes with opposite orientation.
    """
    phases = plaquette_field(sample)
    margin = float(math.pi - np.abs(phases).max())
    if margin <= 0.0:
        worst = np.unravel_index(int(np.argmax(np.abs(phases))), phases.shape)
        raise MeshTooCoarseError(
            f"plaquette at node {tuple(worst)} has phase magnitude "
            f"{float(np.abs(phases).max()):.3f} >= pi; refine the mesh"
        )
    total = float(phases.sum()) / (2.0 * math.pi)
    value = int(round(total))
    if abs(total - value) > 1.0e-6:
        raise MeshTooCoarseError(
            f"plaquette total {total:.3e} strayed from an integer despite "
            f"margin {margin:.3f}; the sample is inconsistent"
        )
    return InvariantReport(
        invariant=invariant,
        value=value,
        admissibility_margin=margin,
        grid=sample.grid,
        plaquette_field=phases,
        details={"integer_residual": abs(total - value)},
    )


def wilson_holonomy(sample: BundleSample, path: Sequence[tuple[int, ...]]) -> complex:
    """Ordered product of links around a closed path of grid nodes.

    Consecutive nodes must be nearest neighbors (wrapping modularly on a
    torus sample).  A path whose endpoints differ may still close through
    a seam identifying them; anything else is an open path and rejected.
    """
    nodes = [tuple(int(c) for c in node) for node in path]
    if len(nodes) < 2:
        raise ValueError("a path needs at least two nodes")
    grid = sample.grid
    for node in nodes:
        if len(node) != len(grid) or any(not 0 <= c < g for c, g in zip(node, grid)):
            raise ValueError(f"node {node} outside grid {grid}")

    total = 1.0 + 0.0j
    for a, b in zip(nodes[:-1], nodes[1:]):
        diff = [(y - x) for x, y in zip(a, b)]
        if sample.seams:
            stepped = sum(d != 0 for d in diff) == 1 and max(map(abs, diff)) == 1
        else:
            diff = [(d + g // 2) % g - g // 2 for d, g in zip(diff, grid)]
            stepped = sum(d != 0 for d in diff) == 1 and max(map(abs, diff)) == 1
        if not stepped:
            raise ValueError(f"nodes {a} and {b} are not grid neighbors")
        total *= _unit_overlap(sample.frame(a), sample.frame(b), f"link {a} -> {b}")

    first, last = nodes[0], nodes[-1]
    if first == last:
        return total
    for seam in sample.seams:
        if seam.source == last and seam.target == first:
            closing = _unit_overlap(
                seam.matrix @ sample.frame(last),
                sample.frame(first),
                f"seam closure {last} -> {first}",
            )
            return total * closing
    raise ValueError(
        f"path from {first} to {last} is open: endpoints are neither equal "
        "nor identified by a seam"
    )


def sample_from_sweep(sweep: TwistSweep) -> BundleSample:
    """Bundle sample built from the ground frames of a twist sweep."""
    degeneracies = {s.degeneracy for s in sweep.slices}
    if len(degeneracies) != 1:
        raise SampleInconsistencyError(
            f"ground-space dimension varies across the sweep: {sorted(degeneracies)}"
        )
    dim = sweep.slices[0].vectors.shape[0]
    m = degeneracies.pop()
    fibers = np.empty(sweep.grid + (dim, m), dtype=np.complex128)
    for node, slc in zip(sweep.nodes, sweep.slices):
        fibers[node] = slc.vectors
    return BundleSample(fibers=fibers)


def bloch_band_sample(
    model: LatticeModel, grid: tuple[int, ...], bands: int = 1
) -> BundleSample:
    """Lowest ``bands`` Bloch eigenframes on a uniform momentum grid.

    Momenta run over the unit cell of the (magnetic, if the model carries
    flux) Brillouin zone.  The selected bands must stay separated from
    the rest of the spectrum at every node.
    """
    grid = tuple(int(n) for n in grid)
    if any(n < 2 for n in grid):
        raise ValueError(f"grid sizes must be at least 2, got {grid}")
    matrix = bloch.magnetic_bloch_matrix if model.flux else bloch.bloch_matrix
    fibers = None
    for node in np.ndindex(grid):
        k = tuple(c / n for c, n in zip(node, grid))
        vals, vecs = np.linalg.eigh(matrix(model, k))
        if bands >= len(vals):
            raise ValueError(f"model has {len(vals)} bands, cannot take {bands}")
        split = float(vals[bands] - vals[bands - 1])
        if split < 1.0e-9:
            raise GapDegeneracyError(
                f"bands {bands - 1} and {bands} touch at k={k} "
                f"(splitting {split:.3e}); the band frame is ill-defined there",
                gap=split,
            )
        if fibers is None:
            fibers = np.empty(grid + (len(vals), bands), dtype=np.complex128)
        fibers[node] = vecs[:, :bands]
    return BundleSample(fibers=fibers)


def manybody_chern(
    model: LatticeModel | ClusterOperator,
    grid: tuple[int, int],
    tol: float | None = None,
) -> InvariantReport:
    """Chern number of a nondegenerate many-body ground state.

    Sweeps the twist torus, demands a one-dimensional ground space at
    every node, and runs the plaquette sum over the resulting line
    bundle.  A degenerate node is not an error of the method, only of
    this entry point: build the m-frame sample yourself and take the
    determinant line through ``fhs_chern``.
    """
    sweep = sweep_twist_grid(model, grid, tol=tol)
    for node, slc in zip(sweep.nodes, sweep.slices):
        if slc.degeneracy != 1:
            raise DegenerateGroundStateError(
                f"ground space at twist node {node} has dimension "
                f"{slc.degeneracy}; sample the full frame and compute the "
                "determinant-line invariant with fhs_chern instead"
            )
    report = fhs_chern(sample_from_sweep(sweep), invariant="manybody_chern")
    details = dict(report.details)
    details["min_gap"] = sweep.min_gap
    return InvariantReport(
        invariant=report.invariant,
        value=report.value,
        admissibility_margin=report.admissibility_margin,
        grid=report.grid,
        plaquette_field=report.plaquette_field,
        details=details,
    )
