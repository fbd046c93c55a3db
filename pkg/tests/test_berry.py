"""Link variables, Chern numbers, holonomies, and the quotient obstruction.

The integer results are pinned two ways: frozen values fixed beforehand
by the projector-curvature oracle (a finite-difference integration that
shares no code with the plaquette method), and structural identities
that hold exactly (constant fields, pure gauges, plaquette versus loop
holonomy, additivity of the determinant line).  The quotient-cube
invariant is pinned by its atomic limits, where the value is readable
off the gluing phases by hand.
"""

import cmath
import dataclasses
import json
import math
from importlib import resources

import numpy as np
import pytest

from crystalphase.berry import (
    LINK_FLOOR,
    BundleSample,
    DegenerateGroundStateError,
    MeshTooCoarseError,
    SampleInconsistencyError,
    Seam,
    bloch_band_sample,
    bloch_symmetry_matrix,
    cube_loop_and_faces,
    cube_quotient_sample,
    cube_torsion_report,
    fhs_chern,
    manybody_chern,
    overlap_link,
    plaquette_field,
    sample_from_sweep,
    torsion_invariant,
    wilson_holonomy,
)
from crystalphase.manybody import (
    GapDegeneracyError,
    bloch_matrix,
    load_model,
    magnetic_bloch_matrix,
    sweep_twist_grid,
)
from oracles import projector_chern


def two_band_model(mass: float) -> dict:
    """Two-orbital square-lattice model with a Chern transition in ``mass``.

    The Bloch matrix is sin(2 pi k1) sx + sin(2 pi k2) sy plus
    (mass + cos(2 pi k1) + cos(2 pi k2)) sz; the lower band carries Chern
    number +1 for 0 < mass < 2, -1 for -2 < mass < 0, and 0 outside.
    """
    return {
        "dimension": 2,
        "cells": [1, 1],
        "orbitals": 2,
        "particles": 1,
        "onsite": [mass, -mass],
        "hopping": [
            {"from": 0, "to": 0, "cell": [1, 0], "amplitude": 0.5},
            {"from": 1, "to": 1, "cell": [1, 0], "amplitude": -0.5},
            {"from": 1, "to": 0, "cell": [1, 0], "amplitude": [0.0, -0.5]},
            {"from": 0, "to": 1, "cell": [1, 0], "amplitude": [0.0, -0.5]},
            {"from": 0, "to": 0, "cell": [0, 1], "amplitude": 0.5},
            {"from": 1, "to": 1, "cell": [0, 1], "amplitude": -0.5},
            {"from": 1, "to": 0, "cell": [0, 1], "amplitude": -0.5},
            {"from": 0, "to": 1, "cell": [0, 1], "amplitude": 0.5},
        ],
    }


def constant_sample(grid, vector) -> BundleSample:
    vector = np.asarray(vector, dtype=np.complex128)
    fibers = np.broadcast_to(
        vector[:, None], grid + vector.shape + (1,)
    ).copy()
    return BundleSample(fibers=fibers)


def rephased(sample: BundleSample, rng) -> BundleSample:
    phases = np.exp(2j * np.pi * rng.random(sample.grid))
    return BundleSample(
        fibers=sample.fibers * phases[..., None, None], seams=sample.seams
    )


# ---------------------------------------------------------------- links


def test_constant_field_links_are_one():
    sample = constant_sample((4, 5), [1.0, 0.0, 0.0])
    for node in [(0, 0), (3, 4), (2, 1)]:
        for direction in (0, 1):
            assert overlap_link(sample, node, direction) == pytest.approx(1.0)


def test_pure_gauge_link_is_phase_difference():
    rng = np.random.default_rng(11)
    phi = 2.0 * np.pi * rng.random((3, 3))
    fibers = np.exp(1j * phi)[..., None, None].astype(np.complex128)
    sample = BundleSample(fibers=fibers)
    link = overlap_link(sample, (1, 2), 0)
    assert link == pytest.approx(cmath.exp(1j * (phi[2, 2] - phi[1, 2])))
    wrapped = overlap_link(sample, (2, 2), 0)
    assert wrapped == pytest.approx(cmath.exp(1j * (phi[0, 2] - phi[2, 2])))


def test_link_modulus_invariant_under_frame_mixing():
    rng = np.random.default_rng(5)
    sample = bloch_band_sample(load_model("hofstadter_q3"), (9, 9), bands=2)
    mixed = np.empty_like(sample.fibers)
    for node in np.ndindex(sample.grid):
        q, _ = np.linalg.qr(
            rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        )
        mixed[node] = sample.fibers[node] @ q
    remixed = BundleSample(fibers=mixed)
    for node in [(0, 0), (4, 7), (8, 3)]:
        for direction in (0, 1):
            a = overlap_link(sample, node, direction)
            b = overlap_link(remixed, node, direction)
            assert abs(a) == pytest.approx(abs(b))
    assert np.allclose(plaquette_field(sample), plaquette_field(remixed))


def test_orthogonal_neighbors_rejected():
    fibers = np.zeros((2, 2, 2, 1), dtype=np.complex128)
    fibers[..., 0, 0] = 1.0
    fibers[1, 0] = [[0.0], [1.0]]
    sample = BundleSample(fibers=fibers)
    with pytest.raises(MeshTooCoarseError, match="link floor"):
        overlap_link(sample, (0, 0), 0)


def test_link_argument_validation():
    sample = constant_sample((3, 3), [1.0])
    with pytest.raises(ValueError, match="direction"):
        overlap_link(sample, (0, 0), 2)
    with pytest.raises(ValueError, match="outside grid"):
        overlap_link(sample, (3, 0), 0)


# ------------------------------------------------------- chern numbers


def test_constant_field_chern_zero():
    report = fhs_chern(constant_sample((5, 5), [0.6, 0.8]))
    assert report.value == 0
    assert report.admissibility_margin == pytest.approx(math.pi)
    assert report.plaquette_field.shape == (5, 5)


def test_hofstadter_lowest_band_chern_matches_oracle():
    model = load_model("hofstadter_q3")
    report = fhs_chern(bloch_band_sample(model, (24, 24), bands=1))
    # Frozen in advance from the projector-curvature oracle below.
    assert report.value == 1
    assert report.admissibility_margin > 0
    oracle = projector_chern(
        lambda kx, ky: magnetic_bloch_matrix(model, (kx, ky)), 1, mesh=31
    )
    assert round(oracle) == report.value
    assert abs(oracle - report.value) < 1.0e-3


def test_hofstadter_determinant_line_of_two_bands():
    model = load_model("hofstadter_q3")
    report = fhs_chern(bloch_band_sample(model, (24, 24), bands=2))
    assert report.value == -1
    oracle = projector_chern(
        lambda kx, ky: magnetic_bloch_matrix(model, (kx, ky)), 2, mesh=31
    )
    assert round(oracle) == report.value


@pytest.mark.parametrize(
    "mass,expected", [(1.0, 1), (-1.0, -1), (3.0, 0)]
)
def test_two_band_model_against_oracle(mass, expected):
    model = load_model(two_band_model(mass))
    report = fhs_chern(bloch_band_sample(model, (18, 18), bands=1))
    assert report.value == expected
    oracle = projector_chern(
        lambda kx, ky: bloch_matrix(model, (kx, ky)), 1, mesh=41
    )
    assert round(oracle) == expected


def test_chern_gauge_invariance_twenty_trials():
    sample = bloch_band_sample(load_model("hofstadter_q3"), (12, 12), bands=1)
    base = fhs_chern(sample)
    rng = np.random.default_rng(17)
    for _ in range(20):
        report = fhs_chern(rephased(sample, rng))
        assert report.value == base.value
        assert np.max(
            np.abs(report.plaquette_field - base.plaquette_field)
        ) < 1.0e-12


def test_chern_mesh_doubling_stable():
    model = load_model("hofstadter_q3")
    coarse = fhs_chern(bloch_band_sample(model, (12, 12), bands=1))
    fine = fhs_chern(bloch_band_sample(model, (24, 24), bands=1))
    assert coarse.value == fine.value == 1


def test_inadmissible_plaquette_rejected():
    # Real frames at 0, 120 and 240 degrees make three links -1/2, so one
    # plaquette product is negative real: phase exactly pi, margin zero.
    def rot(angle):
        return [math.cos(angle), math.sin(angle)]

    fibers = np.zeros((2, 2, 2, 1), dtype=np.complex128)
    fibers[0, 0, :, 0] = rot(0.0)
    fibers[1, 0, :, 0] = rot(0.0)
    fibers[1, 1, :, 0] = rot(2.0 * math.pi / 3.0)
    fibers[0, 1, :, 0] = rot(4.0 * math.pi / 3.0)
    with pytest.raises(MeshTooCoarseError, match="refine the mesh"):
        fhs_chern(BundleSample(fibers=fibers))


def test_seamed_sample_refuses_torus_plaquettes():
    sample = constant_sample((3, 3), [1.0])
    seamed = BundleSample(
        fibers=sample.fibers,
        seams=(Seam((2, 0), (0, 0), np.eye(1)),),
    )
    with pytest.raises(ValueError, match="seams"):
        plaquette_field(seamed)


# ------------------------------------------------- many-body invariants


def test_manybody_chern_matches_single_particle():
    model = load_model("hofstadter_q3")
    many = manybody_chern(model, (6, 6))
    single = fhs_chern(bloch_band_sample(model, (24, 24), bands=1))
    assert many.value == single.value == 1
    assert many.details["min_gap"] > 0


def test_manybody_chern_survives_interaction():
    report = manybody_chern(load_model("hofstadter_q3_interacting"), (6, 6))
    assert report.value == 1
    assert report.details["min_gap"] > 0


def test_manybody_chern_grid_doubling_stable():
    model = load_model("hofstadter_q3")
    assert manybody_chern(model, (4, 4)).value == 1
    assert manybody_chern(model, (8, 8)).value == 1


def test_vacuum_chern_is_zero():
    model = dataclasses.replace(load_model("hofstadter_q3"), particles=0)
    report = manybody_chern(model, (4, 4))
    assert report.value == 0


SQUARE22 = {
    "dimension": 2,
    "cells": [2, 2],
    "orbitals": 1,
    "particles": 1,
    "hopping": [
        {"from": 0, "to": 0, "cell": [1, 0], "amplitude": -1.0},
        {"from": 0, "to": 0, "cell": [0, 1], "amplitude": -1.0},
    ],
}


def test_degenerate_node_names_determinant_line_remedy():
    # At twist (pi, pi) every single-particle level of the 2x2 square
    # cluster sits at zero, so the one-particle ground space is fourfold.
    with pytest.raises(DegenerateGroundStateError, match="determinant-line"):
        manybody_chern(load_model(SQUARE22), (2, 2))


def test_sweep_sample_demands_uniform_degeneracy():
    sweep = sweep_twist_grid(load_model(SQUARE22), (2, 2))
    with pytest.raises(SampleInconsistencyError, match="varies"):
        sample_from_sweep(sweep)


def test_band_sample_refuses_touching_bands():
    flat = {
        "dimension": 2,
        "cells": [1, 1],
        "orbitals": 2,
        "particles": 1,
        "onsite": [0.0, 0.0],
    }
    with pytest.raises(GapDegeneracyError):
        bloch_band_sample(load_model(flat), (4, 4), bands=1)


# ------------------------------------------------------------ holonomy


def test_constant_field_holonomy_one():
    sample = constant_sample((4, 4), [1.0, 0.0])
    loop = [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]
    assert wilson_holonomy(sample, loop) == pytest.approx(1.0)


def test_holonomy_around_one_plaquette_is_field_exponential():
    sample = bloch_band_sample(load_model("hofstadter_q3"), (12, 12), bands=1)
    field = plaquette_field(sample)
    loop = [(3, 4), (4, 4), (4, 5), (3, 5), (3, 4)]
    hol = wilson_holonomy(sample, loop)
    assert hol == pytest.approx(cmath.exp(1j * field[3, 4]), abs=1.0e-12)


def test_holonomy_gauge_invariance():
    sample = bloch_band_sample(load_model("hofstadter_q3"), (9, 9), bands=1)
    loop = [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1), (0, 0)]
    base = wilson_holonomy(sample, loop)
    rng = np.random.default_rng(23)
    for _ in range(5):
        assert abs(wilson_holonomy(rephased(sample, rng), loop) - base) < 1.0e-12


def test_holonomy_closes_through_a_seam():
    fibers = np.ones((3, 3, 1, 1), dtype=np.complex128)
    seam = Seam(source=(2, 0), target=(0, 0), matrix=np.array([[-1.0]]))
    sample = BundleSample(fibers=fibers, seams=(seam,))
    hol = wilson_holonomy(sample, [(0, 0), (1, 0), (2, 0)])
    assert hol == pytest.approx(-1.0)


def test_open_paths_rejected():
    sample = constant_sample((4, 4), [1.0])
    with pytest.raises(ValueError, match="open"):
        wilson_holonomy(sample, [(0, 0), (1, 0), (2, 0)])
    with pytest.raises(ValueError, match="neighbors"):
        wilson_holonomy(sample, [(0, 0), (2, 0), (0, 0)])
    with pytest.raises(ValueError, match="at least two"):
        wilson_holonomy(sample, [(0, 0)])


# ------------------------------------------------- quotient obstruction


def test_f222_obstruction_is_half_and_mesh_stable():
    model = load_model("f222_tb")
    values = {}
    for mesh in (4, 8):
        report = cube_torsion_report(model, mesh)
        values[mesh] = report.value
        assert report.details["quantization_distance"] < 1.0e-8
        assert abs((2.0 * report.value) % 1.0) < 1.0e-3
        assert report.admissibility_margin > 0
    assert values[4] == pytest.approx(values[8], abs=1.0e-9)
    assert values[8] == pytest.approx(0.5, abs=1.0e-8)


def test_f222_obstruction_choice_independent():
    model = load_model("f222_tb")
    upper = cube_torsion_report(model, 4, choice="upper")
    lower = cube_torsion_report(model, 4, choice="lower")
    assert upper.value == pytest.approx(lower.value, abs=1.0e-9)


def atomic_sample(model, mesh, orbital) -> BundleSample:
    built = cube_quotient_sample(model, mesh)
    fibers = np.zeros_like(built.fibers)
    fibers[..., orbital, 0] = 1.0
    return BundleSample(fibers=fibers, seams=built.seams)


def test_atomic_limits_pin_the_two_classes():
    # The orbital at the cell origin glues trivially (value 0); the one at
    # the face-centered position picks up a sign under the corner
    # translation, which is exactly the nontrivial class (value 1/2).
    model = load_model("f222_tb")
    trivial = torsion_invariant(
        atomic_sample(model, 4, 0), *cube_loop_and_faces(4)
    )
    assert trivial.value == pytest.approx(0.0, abs=1.0e-12)
    nontrivial = torsion_invariant(
        atomic_sample(model, 4, 1), *cube_loop_and_faces(4)
    )
    assert nontrivial.value == pytest.approx(0.5, abs=1.0e-12)


def test_torsion_gauge_invariance_twenty_trials():
    model = load_model("f222_tb")
    sample = cube_quotient_sample(model, 4)
    loop, faces = cube_loop_and_faces(4)
    base = torsion_invariant(sample, loop, faces).value
    rng = np.random.default_rng(31)
    for _ in range(20):
        value = torsion_invariant(rephased(sample, rng), loop, faces).value
        assert abs(value - base) < 1.0e-12


def doubled(sample: BundleSample) -> BundleSample:
    """Determinant line of the direct sum of a sample with itself."""
    grid = sample.grid
    dim, m = sample.fibers.shape[-2:]
    fibers = np.zeros(grid + (2 * dim, 2 * m), dtype=np.complex128)
    fibers[..., :dim, :m] = sample.fibers
    fibers[..., dim:, m:] = sample.fibers
    seams = tuple(
        Seam(
            source=s.source,
            target=s.target,
            matrix=np.block(
                [
                    [s.matrix, np.zeros_like(s.matrix)],
                    [np.zeros_like(s.matrix), s.matrix],
                ]
            ),
        )
        for s in sample.seams
    )
    return BundleSample(fibers=fibers, seams=seams)


def test_doubled_bundle_has_trivial_determinant_line():
    model = load_model("f222_tb")
    sample = cube_quotient_sample(model, 4)
    loop, faces = cube_loop_and_faces(4)
    single = torsion_invariant(sample, loop, faces).value
    double = torsion_invariant(doubled(sample), loop, faces).value
    assert abs(single - 0.5) < 1.0e-8
    assert min(double, 1.0 - double) < 1.0e-8
    drift = abs(double - ((2.0 * single) % 1.0))
    assert min(drift, 1.0 - drift) < 1.0e-8


def test_torsion_determinant_frame_mixing_invariance():
    model = load_model("f222_tb")
    sample = doubled(cube_quotient_sample(model, 4))
    loop, faces = cube_loop_and_faces(4)
    base = torsion_invariant(sample, loop, faces).value
    rng = np.random.default_rng(41)
    mixed = np.empty_like(sample.fibers)
    for node in np.ndindex(sample.grid):
        q, _ = np.linalg.qr(
            rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        )
        mixed[node] = sample.fibers[node] @ q
    value = torsion_invariant(
        BundleSample(fibers=mixed, seams=sample.seams), loop, faces
    ).value
    assert abs(value - base) < 1.0e-12


def test_inconsistent_gluing_rejected():
    model = load_model("f222_tb")
    sample = atomic_sample(model, 4, 0)
    fibers = sample.fibers.copy()
    fibers[4, 0, 0] = [[0.0], [1.0]]
    broken = BundleSample(fibers=fibers, seams=sample.seams)
    with pytest.raises(SampleInconsistencyError, match="descend"):
        torsion_invariant(broken, *cube_loop_and_faces(4))


def test_declared_symmetry_checked_against_hamiltonian():
    # hermitian but no longer two-fold symmetric: the bond pair exchanged by
    # the rotations gets unequal amplitudes, which the overlap floor alone
    # would miss because the bands stay far apart
    data = json.loads(
        resources.files("crystalphase.data.models")
        .joinpath("f222_tb.json")
        .read_text()
    )
    data["hopping"][-1]["amplitude"] = 0.4
    with pytest.raises(SampleInconsistencyError, match="descend"):
        cube_quotient_sample(load_model(data), 2)


def test_quotient_sample_validation():
    with pytest.raises(ValueError, match="3d"):
        cube_quotient_sample(load_model("hofstadter_q3"), 4)
    with pytest.raises(ValueError, match="mesh"):
        cube_quotient_sample(load_model("f222_tb"), 1)
    with pytest.raises(ValueError, match="choice"):
        cube_loop_and_faces(4, choice="sideways")


def test_missing_axis_rotations_reported():
    lonely = {
        "dimension": 3,
        "cells": [2, 2, 2],
        "orbitals": 1,
        "particles": 1,
        "hopping": [
            {"from": 0, "to": 0, "cell": [1, 0, 0], "amplitude": -1.0}
        ],
    }
    with pytest.raises(ValueError, match="axes"):
        cube_quotient_sample(load_model(lonely), 4)


def test_bloch_symmetry_matrices_conjugate_the_hamiltonian():
    model = load_model("f222_tb")
    rng = np.random.default_rng(53)
    for sym in model.symmetries:
        for _ in range(3):
            k = rng.uniform(-1.0, 1.0, size=3)
            k_img, u = bloch_symmetry_matrix(model, sym, k)
            lhs = bloch_matrix(model, k_img)
            rhs = u @ bloch_matrix(model, k) @ u.conj().T
            assert np.abs(lhs - rhs).max() < 1.0e-12
