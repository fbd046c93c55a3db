"""Cluster models, Fock assembly, spectra, sectors, Bloch reductions.

Frozen numbers come from closed-form diagonalization of tiny clusters
(a dimer, a 3-ring) and from binomial dimensions; everything larger is
cross-checked through an independent route: free-fermion eigenvalue
sums, Bloch unions over the allowed momenta, and momentum-sector unions
against dense diagonalization.
"""

import dataclasses
import itertools
import math

import numpy as np
import pytest
import scipy.sparse as sp

from crystalphase.manybody import (
    ClusterOperator,
    GapDegeneracyError,
    ModelFormatError,
    SymmetryValidationError,
    TwistPoint,
    allowed_magnetic_momenta,
    allowed_momenta,
    bloch_matrix,
    bloch_position_phase,
    enumerate_occupations,
    ground_state,
    load_model,
    magnetic_bloch_matrix,
    momentum_sectors,
    occupied_modes,
    packaged_model_names,
    space_dimension,
    state_rank,
    sweep_twist_grid,
)
from crystalphase.manybody.kernels import (
    diagonal_vector,
    hopping_structure,
    numba_active,
)

DIMER = {
    "dimension": 1,
    "cells": [1],
    "orbitals": 2,
    "particles": 1,
    "hopping": [{"from": 0, "to": 1, "cell": [0], "amplitude": 0.7}],
}

RING3 = {
    "dimension": 1,
    "cells": [3],
    "orbitals": 1,
    "particles": 1,
    "hopping": [{"from": 0, "to": 0, "cell": [1], "amplitude": -1.0}],
}


def random_2d_model(rng, particles=2):
    def amp(scale=1.0):
        z = scale * (rng.normal() + 1j * rng.normal())
        return [z.real, z.imag]

    return load_model(
        {
            "dimension": 2,
            "cells": [2, 3],
            "orbitals": 2,
            "positions": [[0.0, 0.0], [0.25, 0.6]],
            "particles": particles,
            "onsite": [0.3, -0.4],
            "hopping": [
                {"from": 0, "to": 0, "cell": [1, 0], "amplitude": amp()},
                {"from": 1, "to": 1, "cell": [0, 1], "amplitude": amp()},
                {"from": 0, "to": 1, "cell": [0, 0], "amplitude": amp()},
                {"from": 0, "to": 1, "cell": [1, 1], "amplitude": amp(0.5)},
            ],
        }
    )


# ------------------------------------------------------------------ basis


def test_basis_dimensions():
    assert space_dimension(4, 2) == 6
    assert space_dimension(9, 3) == 84
    assert len(enumerate_occupations(4, 2)) == 6
    assert len(enumerate_occupations(9, 3)) == 84
    assert list(enumerate_occupations(3, 0)) == [0]


def test_basis_order_and_lookup():
    states = enumerate_occupations(5, 2)
    assert all(states[i] < states[i + 1] for i in range(len(states) - 1))
    for i, s in enumerate(states):
        assert bin(int(s)).count("1") == 2
        assert state_rank(states, int(s)) == i
    assert occupied_modes(0b10110) == (1, 2, 4)
    with pytest.raises(KeyError):
        state_rank(states, 0b1)


def test_basis_rejects_bad_counts():
    with pytest.raises(ValueError):
        enumerate_occupations(4, 5)
    with pytest.raises(ValueError):
        enumerate_occupations(63, 1)


# ------------------------------------------------------- frozen spectra


def test_dimer_levels():
    op = ClusterOperator(load_model(DIMER))
    vals = np.linalg.eigvalsh(op.hamiltonian().toarray())
    assert np.allclose(vals, [-0.7, 0.7], atol=1e-12)


def test_ring3_levels():
    op = ClusterOperator(load_model(RING3))
    vals = np.linalg.eigvalsh(op.hamiltonian().toarray())
    assert np.allclose(vals, [-2.0, 1.0, 1.0], atol=1e-12)


def test_full_twist_is_gauge_transparent():
    op = ClusterOperator(load_model(RING3))
    base = np.linalg.eigvalsh(op.hamiltonian().toarray())
    wrapped = np.linalg.eigvalsh(
        op.hamiltonian(TwistPoint((2.0 * math.pi,))).toarray()
    )
    assert np.allclose(base, wrapped, atol=1e-10)


def test_self_wrap_term_is_a_density():
    # one cell, displacement 1: the hop lands back on its own mode
    model = load_model(
        {
            "dimension": 1,
            "cells": [1],
            "orbitals": 1,
            "particles": 1,
            "hopping": [{"from": 0, "to": 0, "cell": [1], "amplitude": 0.5}],
        }
    )
    op = ClusterOperator(model)
    theta = 1.0
    expected = 2.0 * 0.5 * math.cos(theta)
    h = op.hamiltonian(TwistPoint((theta,))).toarray()
    assert np.allclose(h, [[expected]], atol=1e-12)
    assert np.allclose(op.single_particle_matrix(TwistPoint((theta,))), h)


def test_free_fermion_pair_sums():
    rng = np.random.default_rng(7)
    model = random_2d_model(rng, particles=2)
    op = ClusterOperator(model)
    twist = TwistPoint((0.9, 2.2))
    single = np.linalg.eigvalsh(op.single_particle_matrix(twist))
    pair_sums = np.sort(
        [single[i] + single[j] for i, j in itertools.combinations(range(len(single)), 2)]
    )
    many = np.linalg.eigvalsh(op.hamiltonian(twist).toarray())
    assert np.allclose(many, pair_sums, atol=1e-10)


def test_hermitian_and_twist_periodic():
    rng = np.random.default_rng(21)
    for trial in range(4):
        model = random_2d_model(rng, particles=2)
        op = ClusterOperator(model)
        angles = tuple(rng.uniform(0.0, 2.0 * math.pi, size=2))
        h = op.hamiltonian(TwistPoint(angles))
        assert abs(h - h.getH()).max() < 1e-12
        for mu in range(2):
            shifted = tuple(
                a + (2.0 * math.pi if i == mu else 0.0) for i, a in enumerate(angles)
            )
            h2 = op.hamiltonian(TwistPoint(shifted))
            assert np.allclose(
                np.linalg.eigvalsh(h.toarray()),
                np.linalg.eigvalsh(h2.toarray()),
                atol=1e-10,
            )


def test_interactions_enter_the_diagonal():
    # two fermions pinned next to each other pay exactly V once
    model = load_model(
        {
            "dimension": 1,
            "cells": [3],
            "orbitals": 1,
            "particles": 2,
            "hopping": [],
            "interactions": [{"a": 0, "b": 0, "cell": [1], "strength": 0.8}],
        }
    )
    op = ClusterOperator(model)
    h = op.hamiltonian().toarray()
    assert np.allclose(np.diag(h).real, [0.8, 0.8, 0.8], atol=1e-12)
    # on 3 sites every pair of distinct sites is adjacent on the ring


def test_kernel_paths_agree(monkeypatch):
    states = enumerate_occupations(10, 3)
    rng = np.random.default_rng(3)
    froms = rng.integers(0, 10, size=14).astype(np.int64)
    tos = rng.integers(0, 10, size=14).astype(np.int64)
    energies = rng.normal(size=10)
    pa = rng.integers(0, 10, size=5).astype(np.int64)
    pb = rng.integers(0, 10, size=5).astype(np.int64)
    st = rng.normal(size=5)

    monkeypatch.setenv("CRYSTALPHASE_NO_NUMBA", "1")
    assert not numba_active()
    slow = hopping_structure(states, froms, tos)
    slow_diag = diagonal_vector(states, energies, pa, pb, st)
    monkeypatch.delenv("CRYSTALPHASE_NO_NUMBA")
    fast = hopping_structure(states, froms, tos)
    fast_diag = diagonal_vector(states, energies, pa, pb, st)
    for a, b in zip(slow, fast):
        assert np.array_equal(a, b)
    assert np.array_equal(slow_diag, fast_diag)


# ------------------------------------------------------------ spectral


def test_ground_state_simple_gap():
    slice_ = ground_state(np.diag([0.0, 1.0]))
    assert slice_.degeneracy == 1
    assert slice_.gap == pytest.approx(1.0)
    assert slice_.vectors.shape == (2, 1)


def test_ground_state_exact_degeneracy():
    slice_ = ground_state(np.diag([0.0, 0.0, 1.0]), tol=1e-8)
    assert slice_.degeneracy == 2
    assert slice_.gap == pytest.approx(1.0)
    gram = slice_.vectors.conj().T @ slice_.vectors
    assert np.allclose(gram, np.eye(2), atol=1e-10)


def test_ground_state_merges_tiny_splitting():
    slice_ = ground_state(np.diag([0.0, 1e-12, 1.0]), tol=1e-8)
    assert slice_.degeneracy == 2


def test_ground_state_rejects_unresolved_cluster():
    with pytest.raises(GapDegeneracyError) as info:
        ground_state(np.diag([0.0, 0.6e-8, 1.4e-8, 1.0]), tol=1e-8)
    assert info.value.gap == pytest.approx(0.8e-8, rel=1e-6)


def test_ground_state_lanczos_path():
    h = sp.diags(np.arange(2100, dtype=np.float64)).tocsr()
    slice_ = ground_state(h)
    assert slice_.degeneracy == 1
    assert slice_.energies[0] == pytest.approx(0.0, abs=1e-8)
    assert slice_.gap == pytest.approx(1.0, rel=1e-6)


def test_sweep_ring3():
    sweep = sweep_twist_grid(load_model(RING3), (2,))
    assert len(sweep.slices) == 2
    assert sweep.slices[0].degeneracy == 1
    # at theta = pi the two lowest ring levels cross exactly
    assert sweep.slices[1].degeneracy == 2
    assert sweep.min_gap == pytest.approx(3.0, abs=1e-10)
    assert sweep.slice_at((1,)) is sweep.slices[1]


def test_sweep_vacuum_reports_insertion_cost():
    model = load_model(
        {
            "dimension": 1,
            "cells": [1],
            "orbitals": 2,
            "particles": 0,
            "onsite": [1.0, 2.0],
            "hopping": [{"from": 0, "to": 1, "cell": [0], "amplitude": 0.4}],
        }
    )
    sweep = sweep_twist_grid(model, (2,))
    lowest = np.linalg.eigvalsh(np.array([[1.0, 0.4], [0.4, 2.0]]))[0]
    for slice_ in sweep.slices:
        assert slice_.degeneracy == 1
        assert slice_.energies[0] == 0.0
        assert slice_.gap == pytest.approx(lowest, abs=1e-12)


def test_sweep_validates_grid():
    model = load_model(RING3)
    with pytest.raises(ValueError, match="at least 2"):
        sweep_twist_grid(model, (1,))
    with pytest.raises(ValueError, match="directions"):
        sweep_twist_grid(model, (2, 2))


def test_sweep_names_failing_node():
    model = load_model(
        {
            "dimension": 1,
            "cells": [1],
            "orbitals": 4,
            "particles": 1,
            "onsite": [0.0, 0.6e-8, 1.4e-8, 1.0],
            "hopping": [],
        }
    )
    with pytest.raises(GapDegeneracyError, match=r"twist node \(0,\)"):
        sweep_twist_grid(model, (2,), tol=1e-8)


# ------------------------------------------------------------- sectors


def test_ring3_single_particle_sectors():
    dec = momentum_sectors(load_model(RING3))
    assert [s.dimension for s in dec.sectors] == [1, 1, 1]
    assert [s.angles[0] for s in dec.sectors] == pytest.approx(
        [0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0]
    )
    assert dec.check_direct_sum() < 1e-12


def test_ring3_two_particle_sectors():
    model = load_model({**RING3, "particles": 2})
    dec = momentum_sectors(model)
    assert sorted(s.dimension for s in dec.sectors) == [1, 1, 1]
    pooled = np.sort(np.concatenate(dec.sector_spectra()))
    assert np.allclose(pooled, [-1.0, -1.0, 2.0], atol=1e-10)


@pytest.mark.parametrize("name", ["hofstadter_q3", "hofstadter_q3_interacting", "f222_tb"])
def test_shipped_models_decompose(name):
    dec = momentum_sectors(load_model(name))
    assert sum(s.dimension for s in dec.sectors) == dec.dimension
    assert dec.check_direct_sum() < 1e-10


def test_translation_breaker_is_named():
    # valid flux model (q divides p * y extent) whose x wraps still
    # clash with the gauge: translation along y cannot be repaired
    model = load_model(
        {
            "dimension": 2,
            "cells": [2, 3],
            "orbitals": 1,
            "particles": 2,
            "hopping": [
                {"from": 0, "to": 0, "cell": [1, 0], "amplitude": -1.0},
                {"from": 0, "to": 0, "cell": [0, 1], "amplitude": -1.0},
            ],
            "flux": {"kind": "landau", "p": 1, "q": 3},
        }
    )
    with pytest.raises(SymmetryValidationError, match="hopping term 0.*direction 1"):
        momentum_sectors(model)


def test_symmetry_operators_commute_with_f222():
    model = load_model("f222_tb")
    op = ClusterOperator(model)
    h = op.hamiltonian()
    eye = np.eye(op.dimension)
    for sym in model.symmetries:
        s = op.symmetry_operator(sym)
        assert abs(s @ s.getH() - sp.identity(op.dimension)).max() < 1e-12
        assert abs(s @ h - h @ s).max() < 1e-10
        assert not np.allclose(s.toarray(), eye)


def test_symmetry_rejects_incompatible_extents():
    model = load_model("f222_tb")
    stretched = dataclasses.replace(model, cells=(2, 2, 3), particles=1)
    op = ClusterOperator(stretched)
    with pytest.raises(ModelFormatError, match="incompatible"):
        op.symmetry_operator(model.symmetries[0])


# --------------------------------------------------------------- bloch


def test_bloch_matches_ring():
    model = load_model(RING3)
    vals = sorted(
        float(np.linalg.eigvalsh(bloch_matrix(model, k))[0])
        for k in allowed_momenta(model)
    )
    assert np.allclose(vals, [-2.0, 1.0, 1.0], atol=1e-12)


def test_bloch_union_matches_cluster_at_twist():
    rng = np.random.default_rng(11)
    model = random_2d_model(rng, particles=1)
    op = ClusterOperator(model)
    twist = TwistPoint((0.9, 2.2))
    cluster = np.linalg.eigvalsh(op.single_particle_matrix(twist))
    pooled = np.sort(
        np.concatenate(
            [
                np.linalg.eigvalsh(bloch_matrix(model, k))
                for k in allowed_momenta(model, twist.angles)
            ]
        )
    )
    assert np.allclose(pooled, cluster, atol=1e-10)


def test_bloch_reciprocal_shift_conjugates():
    rng = np.random.default_rng(13)
    model = random_2d_model(rng)
    k = np.array([0.37, -0.81])
    for shift in ([1, 0], [0, 1], [2, -1]):
        v = bloch_position_phase(model, shift)
        lhs = bloch_matrix(model, k + np.asarray(shift))
        rhs = np.diag(v) @ bloch_matrix(model, k) @ np.diag(v).conj().T
        assert np.allclose(lhs, rhs, atol=1e-10)


def test_bloch_rejects_flux_models():
    model = load_model("hofstadter_q3")
    with pytest.raises(ModelFormatError, match="magnetic_bloch_matrix"):
        bloch_matrix(model, [0.0, 0.0])
    with pytest.raises(ModelFormatError, match="no flux"):
        magnetic_bloch_matrix(load_model(RING3), [0.0])


def test_magnetic_bloch_union_matches_cluster():
    model = load_model("hofstadter_q3")
    op = ClusterOperator(model)
    for angles in [(0.0, 0.0), (1.1, 2.5)]:
        twist = TwistPoint(angles)
        cluster = np.linalg.eigvalsh(op.single_particle_matrix(twist))
        pooled = np.sort(
            np.concatenate(
                [
                    np.linalg.eigvalsh(magnetic_bloch_matrix(model, k))
                    for k in allowed_magnetic_momenta(model, angles)
                ]
            )
        )
        assert np.allclose(pooled, cluster, atol=1e-10)


def test_magnetic_bloch_is_periodic():
    model = load_model("hofstadter_q3")
    k = np.array([0.21, 0.55])
    base = magnetic_bloch_matrix(model, k)
    for shift in ([1, 0], [0, 1]):
        assert np.allclose(
            magnetic_bloch_matrix(model, k + np.asarray(shift)), base, atol=1e-12
        )


def test_f222_bands_are_split():
    model = load_model("f222_tb")
    lower, upper = [], []
    for k in itertools.product(np.linspace(0.0, 1.0, 8, endpoint=False), repeat=3):
        vals = np.linalg.eigvalsh(bloch_matrix(model, k))
        lower.append(vals[0])
        upper.append(vals[1])
    assert min(upper) - max(lower) > 0.5


# ------------------------------------------------------- model parsing


def test_packaged_models_enumerate():
    names = packaged_model_names()
    assert {"hofstadter_q3", "hofstadter_q3_interacting", "f222_tb"} <= set(names)


def test_model_rejects_bosons():
    with pytest.raises(ModelFormatError, match="fermionic"):
        load_model({**RING3, "statistics": "boson"})


def test_model_rejects_nonuniform_flux():
    with pytest.raises(ModelFormatError, match="axial-gauge"):
        load_model(
            {
                "dimension": 2,
                "cells": [3, 2],
                "orbitals": 1,
                "particles": 1,
                "hopping": [],
                "flux": {"kind": "landau", "p": 1, "q": 3},
            }
        )


def test_model_rejects_self_term():
    with pytest.raises(ModelFormatError, match="onsite"):
        load_model(
            {
                "dimension": 1,
                "cells": [2],
                "orbitals": 1,
                "particles": 1,
                "hopping": [{"from": 0, "to": 0, "cell": [0], "amplitude": 1.0}],
            }
        )


def test_model_unknown_name():
    with pytest.raises(ModelFormatError, match="packaged"):
        load_model("not_a_model")
