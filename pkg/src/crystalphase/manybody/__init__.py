"""Finite-cluster many-body engine: models, Fock bases, spectra, sectors."""

from crystalphase.manybody.basis import (
    enumerate_occupations,
    occupied_modes,
    space_dimension,
    state_rank,
)
from crystalphase.manybody.bloch import (
    allowed_magnetic_momenta,
    allowed_momenta,
    bloch_matrix,
    bloch_position_phase,
    magnetic_bloch_matrix,
)
from crystalphase.manybody.hamiltonian import ClusterOperator, TwistPoint
from crystalphase.manybody.kernels import numba_active
from crystalphase.manybody.model import (
    FluxField,
    HoppingTerm,
    InteractionTerm,
    LatticeModel,
    ModelFormatError,
    SymmetryData,
    load_model,
    packaged_model_names,
)
from crystalphase.manybody.sectors import (
    MomentumSector,
    SectorDecomposition,
    SymmetryValidationError,
    momentum_sectors,
)
from crystalphase.manybody.spectral import (
    GapDegeneracyError,
    SpectralSlice,
    TwistSweep,
    ground_state,
    sweep_twist_grid,
)

__all__ = [
    "ClusterOperator",
    "FluxField",
    "GapDegeneracyError",
    "HoppingTerm",
    "InteractionTerm",
    "LatticeModel",
    "ModelFormatError",
    "MomentumSector",
    "SectorDecomposition",
    "SpectralSlice",
    "SymmetryData",
    "SymmetryValidationError",
    "TwistPoint",
    "TwistSweep",
    "allowed_magnetic_momenta",
    "allowed_momenta",
    "bloch_matrix",
    "bloch_position_phase",
    "enumerate_occupations",
    "ground_state",
    "load_model",
    "magnetic_bloch_matrix",
    "momentum_sectors",
    "numba_active",
    "occupied_modes",
    "packaged_model_names",
    "space_dimension",
    "state_rank",
    "sweep_twist_grid",
]
