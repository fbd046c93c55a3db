"""Lattice model definitions and the JSON format they are shipped in.

A model is a finite periodic cluster: ``cells`` per direction, a fixed
orbital set per cell, fermionic particles, hopping and density-density
interaction terms given by cell displacements.  Everything is validated
up front so that the operator builders can assume a well-formed model.

Conventions worth stating once:

* orbital positions are in cell coordinates (fractions of the lattice
  vectors); they matter for momentum-space builders and for symmetry
  operators, not for the real-space Hamiltonian;
* each hopping entry contributes its term plus the Hermitian conjugate,
  so a bond is listed once;
* a ``flux`` block threads a uniform magnetic flux of p/q flux quanta per
  plaquette through a two-dimensional cluster (axial gauge: x-hops carry
  a phase growing with the y coordinate).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

__all__ = [
    "ModelFormatError",
    "HoppingTerm",
    "InteractionTerm",
    "FluxField",
    "SymmetryData",
    "LatticeModel",
    "load_model",
    "packaged_model_names",
]


class ModelFormatError(ValueError):
    """Model description is malformed or internally inconsistent."""


@dataclass(frozen=True)
class HoppingTerm:
    orbital_from: int
    orbital_to: int
    cell: tuple[int, ...]
    amplitude: complex


@dataclass(frozen=True)
class InteractionTerm:
    orbital_a: int
    orbital_b: int
    cell: tuple[int, ...]
    strength: float


@dataclass(frozen=True)
class FluxField:
    kind: str
    p: int
    q: int

    @property
    def per_plaquette(self) -> float:
        return self.p / self.q


@dataclass(frozen=True)
class SymmetryData:
    """One point-type symmetry of the finite cluster.

    ``rotation`` acts on cell coordinates, ``orbital_map`` permutes the
    orbitals, ``orbital_shifts`` gives the extra integer cell translation
    each orbital picks up, and ``phases`` the U(1) factor per orbital.
    """

    name: str
    rotation: tuple[tuple[int, ...], ...]
    orbital_map: tuple[int, ...]
    orbital_shifts: tuple[tuple[int, ...], ...]
    phases: tuple[complex, ...]


@dataclass(frozen=True)
class LatticeModel:
    name: str
    dimension: int
    cells: tuple[int, ...]
    orbitals: int
    positions: tuple[tuple[float, ...], ...]
    particles: int
    statistics: str
    hopping: tuple[HoppingTerm, ...]
    onsite: tuple[float, ...]
    interactions: tuple[InteractionTerm, ...] = ()
    flux: FluxField | None = None
    symmetries: tuple[SymmetryData, ...] = ()
    group: str | None = None
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def n_cells(self) -> int:
        return math.prod(self.cells)

    @property
    def n_modes(self) -> int:
        return self.orbitals * self.n_cells

    def cell_rank(self, cell: tuple[int, ...]) -> int:
        """Row-major rank of a cell index, coordinates taken mod the cluster."""
        rank = 0
        for extent, coord in zip(self.cells, cell):
            rank = rank * extent + (coord % extent)
        return rank

    def cell_coords(self, rank: int) -> tuple[int, ...]:
        coords = []
        for extent in reversed(self.cells):
            coords.append(rank % extent)
            rank //= extent
        return tuple(reversed(coords))

    def mode_index(self, orbital: int, cell: tuple[int, ...]) -> int:
        return self.cell_rank(cell) * self.orbitals + orbital

    def mode_orbital_cell(self, mode: int) -> tuple[int, tuple[int, ...]]:
        return mode % self.orbitals, self.cell_coords(mode // self.orbitals)


def _as_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ModelFormatError(f"amplitude must be a number or [re, im], got {value!r}")


def _check_cell(cell, dimension: int, what: str) -> tuple[int, ...]:
    if not isinstance(cell, (list, tuple)) or len(cell) != dimension:
        raise ModelFormatError(f"{what}: cell must have {dimension} entries")
    if not all(isinstance(x, int) for x in cell):
        raise ModelFormatError(f"{what}: cell entries must be integers")
    return tuple(cell)


def _parse(data: dict, origin: str) -> LatticeModel:
    def require(key):
        if key not in data:
            raise ModelFormatError(f"{origin}: missing field {key!r}")
        return data[key]

    dimension = require("dimension")
    if dimension not in (1, 2, 3):
        raise ModelFormatError(f"{origin}: dimension must be 1, 2 or 3")
    cells = tuple(require("cells"))
    if len(cells) != dimension or any(
        not isinstance(c, int) or c < 1 for c in cells
    ):
        raise ModelFormatError(f"{origin}: cells must be {dimension} positive integers")

    orbitals = require("orbitals")
    if not isinstance(orbitals, int) or orbitals < 1:
        raise ModelFormatError(f"{origin}: orbitals must be a positive integer")

    raw_positions = data.get("positions", [[0.0] * dimension] * orbitals)
    if len(raw_positions) != orbitals:
        raise ModelFormatError(f"{origin}: need one position per orbital")
    positions = tuple(
        tuple(float(x) for x in row) for row in raw_positions
    )
    for row in positions:
        if len(row) != dimension:
            raise ModelFormatError(f"{origin}: positions must have {dimension} coords")

    statistics = data.get("statistics", "fermion")
    if statistics != "fermion":
        raise ModelFormatError(f"{origin}: only fermionic statistics are supported")

    n_modes = orbitals * math.prod(cells)
    particles = require("particles")
    if not isinstance(particles, int) or not 0 <= particles <= n_modes:
        raise ModelFormatError(
            f"{origin}: particles must lie in [0, {n_modes}], got {particles!r}"
        )

    hopping = []
    for i, entry in enumerate(data.get("hopping", [])):
        what = f"{origin}: hopping[{i}]"
        a, b = entry.get("from"), entry.get("to")
        for orb in (a, b):
            if not isinstance(orb, int) or not 0 <= orb < orbitals:
                raise ModelFormatError(f"{what}: orbital out of range")
        cell = _check_cell(entry.get("cell"), dimension, what)
        amp = _as_complex(entry.get("amplitude"))
        if not math.isfinite(amp.real) or not math.isfinite(amp.imag):
            raise ModelFormatError(f"{what}: amplitude must be finite")
        if a == b and all(c == 0 for c in cell):
            raise ModelFormatError(f"{what}: zero-displacement self term; use onsite")
        hopping.append(HoppingTerm(a, b, cell, amp))

    onsite = tuple(float(x) for x in data.get("onsite", [0.0] * orbitals))
    if len(onsite) != orbitals:
        raise ModelFormatError(f"{origin}: need one onsite energy per orbital")

    interactions = []
    for i, entry in enumerate(data.get("interactions", [])):
        what = f"{origin}: interactions[{i}]"
        a, b = entry.get("a"), entry.get("b")
        for orb in (a, b):
            if not isinstance(orb, int) or not 0 <= orb < orbitals:
                raise ModelFormatError(f"{what}: orbital out of range")
        cell = _check_cell(entry.get("cell"), dimension, what)
        strength = float(entry.get("strength", 0.0))
        if a == b and all(c == 0 for c in cell):
            raise ModelFormatError(f"{what}: n^2 term on one mode; fold into onsite")
        interactions.append(InteractionTerm(a, b, cell, strength))

    flux = None
    if "flux" in data and data["flux"] is not None:
        raw = data["flux"]
        kind = raw.get("kind")
        if kind != "landau":
            raise ModelFormatError(f"{origin}: unknown flux kind {kind!r}")
        if dimension != 2:
            raise ModelFormatError(f"{origin}: flux needs a two-dimensional cluster")
        p, q = raw.get("p"), raw.get("q")
        if not isinstance(p, int) or not isinstance(q, int) or q < 1:
            raise ModelFormatError(f"{origin}: flux p, q must be integers with q >= 1")
        if (p * cells[1]) % q != 0:
            raise ModelFormatError(
                f"{origin}: axial-gauge flux is uniform on the torus only when "
                f"q divides p times the y extent; got p/q = {p}/{q} on "
                f"{cells[0]}x{cells[1]}"
            )
        flux = FluxField("landau", p, q)

    symmetries = []
    for i, entry in enumerate(data.get("symmetries", [])):
        what = f"{origin}: symmetries[{i}]"
        rotation = entry.get("rotation")
        if (
            not isinstance(rotation, list)
            or len(rotation) != dimension
            or any(len(row) != dimension for row in rotation)
        ):
            raise ModelFormatError(f"{what}: rotation must be {dimension}x{dimension}")
        orbital_map = tuple(entry.get("orbital_map", range(orbitals)))
        if sorted(orbital_map) != list(range(orbitals)):
            raise ModelFormatError(f"{what}: orbital_map must permute the orbitals")
        shifts = entry.get("orbital_shifts", [[0] * dimension] * orbitals)
        if len(shifts) != orbitals:
            raise ModelFormatError(f"{what}: need one shift per orbital")
        shifts = tuple(_check_cell(s, dimension, what) for s in shifts)
        phases = tuple(_as_complex(x) for x in entry.get("phases", [1.0] * orbitals))
        if len(phases) != orbitals:
            raise ModelFormatError(f"{what}: need one phase per orbital")
        for ph in phases:
            if abs(abs(ph) - 1.0) > 1.0e-12:
                raise ModelFormatError(f"{what}: phases must be unimodular")
        symmetries.append(
            SymmetryData(
                name=str(entry.get("name", f"s{i}")),
                rotation=tuple(tuple(int(x) for x in row) for row in rotation),
                orbital_map=orbital_map,
                orbital_shifts=shifts,
                phases=phases,
            )
        )

    return LatticeModel(
        name=str(data.get("name", origin)),
        dimension=dimension,
        cells=cells,
        orbitals=orbitals,
        positions=positions,
        particles=particles,
        statistics=statistics,
        hopping=tuple(hopping),
        onsite=onsite,
        interactions=tuple(interactions),
        flux=flux,
        symmetries=tuple(symmetries),
        group=data.get("group"),
        metadata=data.get("metadata", {}),
    )


def packaged_model_names() -> tuple[str, ...]:
    root = resources.files("crystalphase.data.models")
    return tuple(
        sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))
    )


def load_model(source: str | Path | dict) -> LatticeModel:
    """Load a model from a dict, a JSON file path, or a packaged model name."""
    if isinstance(source, dict):
        return _parse(source, "<dict>")
    text = None
    origin = str(source)
    if isinstance(source, str) and "/" not in source and not source.endswith(".json"):
        candidate = resources.files("crystalphase.data.models").joinpath(source + ".json")
        if candidate.is_file():
            text = candidate.read_text()
    if text is None:
        path = Path(source)
        if not path.is_file():
            raise ModelFormatError(
                f"no such model: {origin!r} is neither a packaged model "
                f"({', '.join(packaged_model_names())}) nor a file"
            )
        text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{origin}: invalid JSON ({exc})") from exc
    return _parse(data, origin)
