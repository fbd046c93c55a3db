"""Topological invariants of sampled ground-state bundles."""

from .chern import (
    LINK_FLOOR,
    OVERLAP_FLOOR,
    BundleSample,
    DegenerateGroundStateError,
    InvariantReport,
    MeshTooCoarseError,
    SampleInconsistencyError,
    Seam,
    bloch_band_sample,
    fhs_chern,
    manybody_chern,
    overlap_link,
    plaquette_field,
    sample_from_sweep,
    wilson_holonomy,
)
from .torsion import (
    bloch_symmetry_matrix,
    cube_loop_and_faces,
    cube_quotient_sample,
    cube_torsion_report,
    torsion_invariant,
)

__all__ = [
    "LINK_FLOOR",
    "OVERLAP_FLOOR",
    "BundleSample",
    "DegenerateGroundStateError",
    "InvariantReport",
    "MeshTooCoarseError",
    "SampleInconsistencyError",
    "Seam",
    "bloch_band_sample",
    "bloch_symmetry_matrix",
    "cube_loop_and_faces",
    "cube_quotient_sample",
    "cube_torsion_report",
    "fhs_chern",
    "manybody_chern",
    "overlap_link",
    "plaquette_field",
    "sample_from_sweep",
    "torsion_invariant",
    "wilson_holonomy",
]
