"""Command-line front end for classification and invariant runs.

Five subcommands cover the package surface.  ``classify`` prints the exact
interacting classification next to the shipped reference columns, ``chern``
and ``torsion`` evaluate many-body invariants of a lattice model, ``sectors``
reports the zero-twist momentum decomposition, and ``list-groups`` shows the
symmetry catalog.  A run is described by a strict `RunConfig` (unknown keys
are rejected by name) and produces `ResultRecord` values whose payloads are
plain JSON data and round-trip bit-exactly; identical inputs give
byte-identical json-lines output except for the single timestamp field.

Records are cached under a directory keyed by the content hash of the model
bytes together with the computational part of the configuration, so editing
a model file or changing a grid invalidates the entry while presentation
flags do not.  The directory comes from ``--cache``, then the
``CRYSTALPHASE_CACHE`` environment variable, then ``~/.cache/crystalphase``;
``--no-cache`` skips both lookup and store, and corrupted cache entries are
recomputed with a warning, never trusted.

Exit codes: 0 success, 2 validation error, 3 gap or degeneracy failure,
4 mesh admissibility failure.  Output assembly is single-threaded and
ordered, so record order is stable across runs.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Sequence, TextIO

from .berry import (
    DegenerateGroundStateError,
    MeshTooCoarseError,
    SampleInconsistencyError,
    bloch_band_sample,
    cube_torsion_report,
    fhs_chern,
    manybody_chern,
)
from .cohomology import classify_h2, reference_tables
from .crystal import GroupDataError, list_group_names, load_group
from .manybody import (
    GapDegeneracyError,
    ModelFormatError,
    SymmetryValidationError,
    load_model,
    momentum_sectors,
)

__all__ = [
    "ARTIFACT_VERSION",
    "ConfigError",
    "ResultRecord",
    "RunConfig",
    "emit_records",
    "main",
    "run_command",
]

ARTIFACT_VERSION = 1

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_GAP = 3
EXIT_MESH = 4

_SUBCOMMANDS = ("classify", "chern", "sectors", "torsion", "list-groups")
_FORMATS = ("text", "csv", "jsonl")
_STATISTICS = ("boson", "fermion")
_COMPUTED_LABEL = "exact, abelianization+rank"
_REFERENCE_LABEL = "reference, not computed"

# Fields that change how records are rendered or stored but not what they
# contain; they stay out of the cache key.
_PRESENTATION_FIELDS = ("format", "cache_dir", "no_cache", "emit_curvature")


class ConfigError(ValueError):
    """Raised when a run configuration cannot be validated."""


def _parse_grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        sizes = tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"grid must be N or NxN, got {text!r}") from None
    if len(sizes) == 1:
        sizes = (sizes[0], sizes[0])
    if len(sizes) != 2 or min(sizes) < 2:
        raise ConfigError(f"grid must be N or NxN with N >= 2, got {text!r}")
    return sizes


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one CLI invocation.

    Construct through `from_mapping`, which rejects unknown keys by name and
    normalizes the grid spelling; direct construction still runs the same
    validation.  Fields carrying no meaning for the chosen subcommand stay
    at their defaults.
    """

    subcommand: str
    group: str | None = None
    all_wallpaper: bool = False
    statistics: str | None = None
    model: str | None = None
    grid: tuple[int, int] | None = None
    mesh: int | None = None
    refine: bool = False
    tol: float | None = None
    check_direct_sum: bool = False
    format: str = "text"
    cache_dir: str | None = None
    no_cache: bool = False
    emit_curvature: str | None = None

    def __post_init__(self) -> None:
        if self.subcommand not in _SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        if self.format not in _FORMATS:
            raise ConfigError(f"unknown output format {self.format!r}")
        if self.statistics is not None and self.statistics not in _STATISTICS:
            raise ConfigError(f"unknown statistics {self.statistics!r}")
        if self.grid is not None:
            if len(self.grid) != 2 or min(self.grid) < 2:
                raise ConfigError(f"grid sizes must be >= 2, got {self.grid}")
        if self.mesh is not None and self.mesh < 2:
            raise ConfigError(f"mesh must be >= 2, got {self.mesh}")
        if self.tol is not None and not self.tol > 0.0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.subcommand == "classify":
            if self.all_wallpaper and self.group is not None:
                raise ConfigError("classify takes --group or --all-wallpaper, not both")
            if not self.all_wallpaper and self.group is None:
                raise ConfigError("classify needs --group NAME or --all-wallpaper")
        if self.subcommand in ("chern", "sectors", "torsion") and self.model is None:
            raise ConfigError(f"{self.subcommand} needs --model PATH")
        if self.emit_curvature is not None and self.subcommand not in ("chern", "torsion"):
            raise ConfigError("--emit-curvature applies to chern and torsion only")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise ConfigError("unknown config fields: " + ", ".join(unknown))
        data = dict(mapping)
        grid = data.get("grid")
        if isinstance(grid, str):
            data["grid"] = _parse_grid(grid)
        elif grid is not None:
            data["grid"] = tuple(int(n) for n in grid)
        return cls(**data)

    def cache_signature(self) -> str:
        """Canonical JSON of the fields that determine the records."""
        data = asdict(self)
        for name in _PRESENTATION_FIELDS:
            data.pop(name)
        return json.dumps(data, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class ResultRecord:
    """One result of a run, serialized as a single json-lines record.

    The payload holds only JSON-native values, so a record survives a dump
    and reload without drift; the timestamp is isolated in `computed_at` and
    is the only field that varies between identical runs.
    """

    inputs_hash: str
    subcommand: str
    payload: dict[str, Any]
    computed_at: str
    artifact_version: int = ARTIFACT_VERSION

    def to_mapping(self) -> dict[str, Any]:
        return {
            "artifact_version": self.artifact_version,
            "computed_at": self.computed_at,
            "inputs_hash": self.inputs_hash,
            "payload": self.payload,
            "subcommand": self.subcommand,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_mapping(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "ResultRecord":
        names = {f.name for f in fields(cls)}
        missing = sorted(names - set(mapping))
        if missing:
            raise ConfigError("result record missing fields: " + ", ".join(missing))
        extra = sorted(set(mapping) - names)
        if extra:
            raise ConfigError("result record has unknown fields: " + ", ".join(extra))
        return cls(**{name: mapping[name] for name in names})


def _model_bytes(token: str) -> bytes:
    """Raw bytes of the model source, resolved like `load_model`."""
    if "/" not in token and not token.endswith(".json"):
        candidate = resources.files("crystalphase.data.models").joinpath(token + ".json")
        if candidate.is_file():
            return candidate.read_bytes()
    path = Path(token)
    if not path.is_file():
        raise ModelFormatError(f"no such model: {token!r}")
    return path.read_bytes()


def inputs_hash(config: RunConfig, model_bytes: bytes) -> str:
    digest = hashlib.sha256()
    digest.update(config.cache_signature().encode())
    digest.update(b"\x00")
    digest.update(model_bytes)
    return digest.hexdigest()


# ---------------------------------------------------------------------------
# subcommand payloads


def _classify_payloads(config: RunConfig) -> list[dict[str, Any]]:
    refs = reference_tables()
    if config.all_wallpaper:
        names = list(refs["borel_spt_h4"]["values"])
    else:
        names = [config.group]
    statistics = config.statistics or "boson"
    payloads = []
    for name in names:
        group = classify_h2(name, fermionic=(statistics == "fermion"))
        payloads.append(
            {
                "group": name,
                "statistics": statistics,
                "classification": str(group),
                "free_rank": group.free_rank,
                "torsion": list(group.torsion),
                "method": _COMPUTED_LABEL,
                "reference": {
                    key: refs[key]["values"].get(name)
                    for key in ("borel_spt_h4", "free_fermion_k0")
                },
            }
        )
    return payloads


def _chern_payloads(config: RunConfig) -> list[dict[str, Any]]:
    model = load_model(config.model)
    if config.statistics is not None and config.statistics != model.statistics:
        raise ConfigError(
            f"--statistics {config.statistics} conflicts with the model's "
            f"declared statistics {model.statistics!r}"
        )
    grid = config.grid or (6, 6)
    report = manybody_chern(model, grid, tol=config.tol)
    payload: dict[str, Any] = {
        "model": model.name,
        "grid": list(grid),
        "invariant": report.invariant,
        "value": report.value,
        "admissibility_margin": report.admissibility_margin,
        "minimum_gap": report.details["min_gap"],
        "integer_residual": report.details["integer_residual"],
        "plaquette_phases": report.plaquette_field.tolist(),
        "single_particle": None,
    }
    # A model without interaction terms is free, so the many-body value has
    # an independent single-particle check on the same mesh.
    if not model.interactions and model.particles > 0:
        band = fhs_chern(bloch_band_sample(model, grid))
        payload["single_particle"] = {
            "value": band.value,
            "grid": list(grid),
            "agrees": band.value == report.value,
        }
    return [payload]


def _sectors_payloads(config: RunConfig) -> list[dict[str, Any]]:
    model = load_model(config.model)
    tol = config.tol if config.tol is not None else 1e-10
    decomposition = momentum_sectors(model, tol=tol)
    rows = []
    for sector, values in zip(decomposition.sectors, decomposition.sector_spectra()):
        rows.append(
            {
                "momentum": list(sector.momentum),
                "dimension": sector.dimension,
                "lowest": [float(v) for v in values[:3]],
            }
        )
    payload: dict[str, Any] = {
        "model": model.name,
        "dimension": decomposition.dimension,
        "tol": tol,
        "sectors": rows,
        "direct_sum_max_deviation": None,
        "within_tol": None,
    }
    if config.check_direct_sum:
        deviation = decomposition.check_direct_sum()
        payload["direct_sum_max_deviation"] = deviation
        payload["within_tol"] = bool(deviation < tol)
        if not payload["within_tol"]:
            raise SymmetryValidationError(
                f"sector spectra deviate from the full spectrum by "
                f"{deviation:.3e}, tolerance {tol:.1e}"
            )
    return [payload]


def _torsion_payloads(config: RunConfig) -> list[dict[str, Any]]:
    model = load_model(config.model)
    base = config.mesh if config.mesh is not None else 4
    meshes = [base, 2 * base] if config.refine else [base]
    payloads = []
    previous = None
    for mesh in meshes:
        report = cube_torsion_report(model, mesh)
        payload: dict[str, Any] = {
            "model": model.name,
            "mesh": mesh,
            "choice": report.details["choice"],
            "value": report.value,
            "quantization_distance": report.details["quantization_distance"],
            "admissibility_margin": report.admissibility_margin,
            "holonomy_phase": report.details["holonomy_phase"],
            "surface_flux": report.details["surface_flux"],
            "plaquette_phases": [
                {"node": list(node), "axes": list(axes), "phase": phase}
                for node, axes, phase in report.plaquette_field
            ],
            "refinement_drift": None,
        }
        if previous is not None:
            gap = abs(payload["value"] - previous) % 1.0
            payload["refinement_drift"] = min(gap, 1.0 - gap)
        previous = payload["value"]
        payloads.append(payload)
    return payloads


def _list_groups_payloads(config: RunConfig) -> list[dict[str, Any]]:
    payloads = []
    for name in list_group_names():
        group = load_group(name)
        payloads.append(
            {
                "group": name,
                "dimension": group.dimension,
                "lattice": group.lattice,
                "point_symbol": group.point_symbol,
                "point_order": group.point_order,
            }
        )
    return payloads


_DISPATCH = {
    "classify": _classify_payloads,
    "chern": _chern_payloads,
    "sectors": _sectors_payloads,
    "torsion": _torsion_payloads,
    "list-groups": _list_groups_payloads,
}


# ---------------------------------------------------------------------------
# cache


def _cache_directory(config: RunConfig, stderr: TextIO) -> Path | None:
    root = config.cache_dir or os.environ.get("CRYSTALPHASE_CACHE")
    path = Path(root) if root else Path.home() / ".cache" / "crystalphase"
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"warning: cache directory unusable ({exc}), continuing without cache", file=stderr)
        return None
    return path


def _read_cache(directory: Path, key: str, stderr: TextIO) -> list[ResultRecord] | None:
    path = directory / f"{key}.json"
    if not path.is_file():
        return None
    try:
        data = json.loads(path.read_text())
        if data["inputs_hash"] != key:
            raise ValueError("key mismatch")
        records = [ResultRecord.from_mapping(m) for m in data["records"]]
        if not records:
            raise ValueError("no records")
        for record in records:
            if record.artifact_version != ARTIFACT_VERSION:
                raise ValueError(f"artifact version {record.artifact_version}")
            if record.inputs_hash != key:
                raise ValueError("record key mismatch")
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"warning: corrupted cache entry {path.name}, recomputing ({exc})", file=stderr)
        return None
    return records


def _write_cache(directory: Path, key: str, records: Sequence[ResultRecord], stderr: TextIO) -> None:
    body = json.dumps(
        {"inputs_hash": key, "records": [r.to_mapping() for r in records]},
        sort_keys=True,
    )
    path = directory / f"{key}.json"
    scratch = directory / f"{key}.tmp"
    try:
        scratch.write_text(body)
        os.replace(scratch, path)
    except OSError as exc:
        print(f"warning: could not store cache entry ({exc})", file=stderr)


def run_command(config: RunConfig, stderr: TextIO | None = None) -> list[ResultRecord]:
    """Produce the records for one configuration, consulting the cache."""
    if stderr is None:
        # resolved at call time so test harnesses that swap the stream see it
        stderr = sys.stderr
    model_bytes = _model_bytes(config.model) if config.model is not None else b""
    key = inputs_hash(config, model_bytes)
    directory = None if config.no_cache else _cache_directory(config, stderr)
    if directory is not None:
        cached = _read_cache(directory, key, stderr)
        if cached is not None:
            return cached
    payloads = _DISPATCH[config.subcommand](config)
    stamp = datetime.now(timezone.utc).isoformat()
    records = [
        ResultRecord(inputs_hash=key, subcommand=config.subcommand, payload=payload, computed_at=stamp)
        for payload in payloads
    ]
    if directory is not None:
        _write_cache(directory, key, records, stderr)
    return records


# ---------------------------------------------------------------------------
# emitters


def _classify_line(payload: Mapping[str, Any]) -> str:
    parts = [f"{payload['group']}: {payload['classification']} [{payload['method']}]"]
    h4 = payload["reference"]["borel_spt_h4"]
    k0 = payload["reference"]["free_fermion_k0"]
    if h4 is not None:
        parts.append(f"H^4 SPT: {h4} [{_REFERENCE_LABEL}]")
    if k0 is not None:
        parts.append(f"free-fermion K^0: {k0} [{_REFERENCE_LABEL}]")
    return "  ".join(parts)


def _text_classify(payloads: Sequence[Mapping[str, Any]], stream: TextIO) -> None:
    for payload in payloads:
        print(_classify_line(payload), file=stream)


def _text_chern(payloads: Sequence[Mapping[str, Any]], stream: TextIO) -> None:
    payload = payloads[0]
    n1, n2 = payload["grid"]
    print(f"model: {payload['model']}", file=stream)
    print(f"twist grid: {n1}x{n2}", file=stream)
    print(f"many-body chern number: {payload['value']}", file=stream)
    print(f"admissibility margin: {payload['admissibility_margin']:.6f}", file=stream)
    print(f"minimum ground-state gap: {payload['minimum_gap']:.6f}", file=stream)
    single = payload["single_particle"]
    if single is not None:
        print(
            f"single-particle chern number (lowest band): {single['value']} "
            "[free model check]",
            file=stream,
        )
        print(f"agreement: {'yes' if single['agrees'] else 'NO'}", file=stream)


def _text_sectors(payloads: Sequence[Mapping[str, Any]], stream: TextIO) -> None:
    payload = payloads[0]
    print(f"model: {payload['model']} (dimension {payload['dimension']})", file=stream)
    for row in payload["sectors"]:
        momentum = ", ".join(str(k) for k in row["momentum"])
        lowest = ", ".join(f"{v:.10g}" for v in row["lowest"])
        print(f"k=({momentum})  dim={row['dimension']}  lowest=[{lowest}]", file=stream)
    deviation = payload["direct_sum_max_deviation"]
    if deviation is not None:
        verdict = "pass" if payload["within_tol"] else "FAIL"
        print(
            f"direct-sum check: max deviation {deviation:.3e} "
            f"(tol {payload['tol']:.1e}): {verdict}",
            file=stream,
        )


def _text_torsion(payloads: Sequence[Mapping[str, Any]], stream: TextIO) -> None:
    print(f"model: {payloads[0]['model']}", file=stream)
    for payload in payloads:
        print(
            f"mesh {payload['mesh']} ({payload['choice']} chain): "
            f"value mod 1 = {payload['value']:.10f}, "
            f"quantization distance = {payload['quantization_distance']:.3e}, "
            f"margin = {payload['admissibility_margin']:.6f}",
            file=stream,
        )
    drift = payloads[-1]["refinement_drift"]
    if drift is not None:
        print(f"refinement drift: {drift:.3e}", file=stream)


def _text_list_groups(payloads: Sequence[Mapping[str, Any]], stream: TextIO) -> None:
    for payload in payloads:
        print(
            f"{payload['group']}: dimension={payload['dimension']}, "
            f"lattice={payload['lattice']}, point symbol={payload['point_symbol']}, "
            f"point order={payload['point_order']}",
            file=stream,
        )


_TEXT_EMITTERS = {
    "classify": _text_classify,
    "chern": _text_chern,
    "sectors": _text_sectors,
    "torsion": _text_torsion,
    "list-groups": _text_list_groups,
}


def _csv_rows(subcommand: str, payloads: Sequence[Mapping[str, Any]]) -> list[list[Any]]:
    if subcommand == "classify":
        rows = [
            [
                "group",
                "statistics",
                "classification",
                "free_rank",
                "torsion",
                "borel_spt_h4",
                "free_fermion_k0",
            ]
        ]
        for p in payloads:
            rows.append(
                [
                    p["group"],
                    p["statistics"],
                    p["classification"],
                    p["free_rank"],
                    ";".join(str(d) for d in p["torsion"]),
                    p["reference"]["borel_spt_h4"] or "",
                    p["reference"]["free_fermion_k0"] or "",
                ]
            )
        return rows
    if subcommand == "chern":
        p = payloads[0]
        single = p["single_particle"]
        return [
            [
                "model",
                "grid",
                "value",
                "admissibility_margin",
                "minimum_gap",
                "single_particle_value",
                "agrees",
            ],
            [
                p["model"],
                "x".join(str(n) for n in p["grid"]),
                p["value"],
                repr(p["admissibility_margin"]),
                repr(p["minimum_gap"]),
                "" if single is None else single["value"],
                "" if single is None else single["agrees"],
            ],
        ]
    if subcommand == "sectors":
        p = payloads[0]
        deviation = p["direct_sum_max_deviation"]
        rows = [["model", "momentum", "dimension", "lowest", "direct_sum_max_deviation"]]
        for row in p["sectors"]:
            rows.append(
                [
                    p["model"],
                    ",".join(str(k) for k in row["momentum"]),
                    row["dimension"],
                    ";".join(repr(v) for v in row["lowest"]),
                    "" if deviation is None else repr(deviation),
                ]
            )
        return rows
    if subcommand == "torsion":
        rows = [
            [
                "model",
                "mesh",
                "choice",
                "value",
                "quantization_distance",
                "admissibility_margin",
                "refinement_drift",
            ]
        ]
        for p in payloads:
            drift = p["refinement_drift"]
            rows.append(
                [
                    p["model"],
                    p["mesh"],
                    p["choice"],
                    repr(p["value"]),
                    repr(p["quantization_distance"]),
                    repr(p["admissibility_margin"]),
                    "" if drift is None else repr(drift),
                ]
            )
        return rows
    rows = [["group", "dimension", "lattice", "point_symbol", "point_order"]]
    for p in payloads:
        rows.append(
            [p["group"], p["dimension"], p["lattice"], p["point_symbol"], p["point_order"]]
        )
    return rows


def emit_records(records: Sequence[ResultRecord], config: RunConfig, stream: TextIO) -> None:
    if config.format == "jsonl":
        for record in records:
            print(record.to_json(), file=stream)
        return
    payloads = [record.payload for record in records]
    if config.format == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerows(_csv_rows(config.subcommand, payloads))
        return
    _TEXT_EMITTERS[config.subcommand](payloads, stream)


def _write_curvature(records: Sequence[ResultRecord], config: RunConfig) -> None:
    """CSV dump of the plaquette phases from the finest computed sample."""
    payload = records[-1].payload
    with open(config.emit_curvature, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        if config.subcommand == "chern":
            writer.writerow(["i", "j", "phase"])
            for i, row in enumerate(payload["plaquette_phases"]):
                for j, phase in enumerate(row):
                    writer.writerow([i, j, repr(phase)])
        else:
            writer.writerow(["i", "j", "k", "axis_a", "axis_b", "phase"])
            for entry in payload["plaquette_phases"]:
                writer.writerow(
                    list(entry["node"]) + list(entry["axes"]) + [repr(entry["phase"])]
                )


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crystalphase",
        description="Exact symmetry classification and many-body invariants "
        "for crystalline lattice models.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=_FORMATS, default="text", help="output format")
    common.add_argument("--cache", dest="cache_dir", metavar="DIR", help="cache directory")
    common.add_argument("--no-cache", action="store_true", help="skip cache lookup and store")

    model_common = argparse.ArgumentParser(add_help=False)
    model_common.add_argument(
        "--model", required=True, metavar="PATH", help="model file or packaged model name"
    )
    model_common.add_argument("--tol", type=float, metavar="X", help="numerical tolerance")

    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    classify = sub.add_parser(
        "classify", parents=[common], help="exact classification of a symmetry group"
    )
    classify.add_argument("--group", metavar="NAME", help="catalog group name")
    classify.add_argument(
        "--all-wallpaper",
        action="store_true",
        help="classify every group carried by the reference table",
    )
    classify.add_argument("--statistics", choices=_STATISTICS, default="boson")

    chern = sub.add_parser(
        "chern", parents=[common, model_common], help="many-body chern number on a twist grid"
    )
    chern.add_argument("--grid", default="6", metavar="N[xN]", help="twist grid size")
    chern.add_argument(
        "--statistics", choices=_STATISTICS, help="must match the model when given"
    )
    chern.add_argument(
        "--emit-curvature", metavar="PATH", help="write plaquette phases to a CSV file"
    )

    sectors = sub.add_parser(
        "sectors", parents=[common, model_common], help="zero-twist momentum decomposition"
    )
    sectors.add_argument(
        "--check-direct-sum",
        action="store_true",
        help="compare sector spectra against the full diagonalization",
    )

    torsion = sub.add_parser(
        "torsion", parents=[common, model_common], help="torsion invariant on the quotient cube"
    )
    torsion.add_argument("--mesh", type=int, default=4, metavar="N", help="mesh points per edge")
    torsion.add_argument(
        "--refine", action="store_true", help="repeat at twice the mesh and report the drift"
    )
    torsion.add_argument(
        "--emit-curvature", metavar="PATH", help="write face plaquette phases to a CSV file"
    )

    sub.add_parser("list-groups", parents=[common], help="list the symmetry catalog")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    namespace = parser.parse_args(argv)
    mapping = {key: value for key, value in vars(namespace).items() if value is not None}
    try:
        config = RunConfig.from_mapping(mapping)
        records = run_command(config)
        emit_records(records, config, sys.stdout)
        if config.emit_curvature is not None:
            _write_curvature(records, config)
    except MeshTooCoarseError as exc:
        print(f"mesh admissibility failure: {exc}", file=sys.stderr)
        return EXIT_MESH
    except (GapDegeneracyError, DegenerateGroundStateError) as exc:
        print(f"gap or degeneracy failure: {exc}", file=sys.stderr)
        return EXIT_GAP
    except (
        ConfigError,
        ModelFormatError,
        GroupDataError,
        SymmetryValidationError,
        SampleInconsistencyError,
        ValueError,
        OSError,
    ) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
