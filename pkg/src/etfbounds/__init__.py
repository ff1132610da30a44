"""Equiangular tight frames, the POVMs they induce, and numerical checks of
the entropic uncertainty bounds, separability and steering criteria those
measurements satisfy."""

from .bounds import BoundReport, certify
from .frames import (
    EquiangularTightFrame,
    FrameParameters,
    FrameReport,
    InvalidFrameError,
    etf_parameters,
    load_frame,
    naimark_complement,
    optimize_etf,
    orthonormal_basis_frame,
    save_frame,
    simplex_etf,
    validate_frame,
)
from .measurement import EtfPovm, OutcomeDistribution, outcome_distribution, povm_from_frame, psi_family
from .numerics import InvalidStateError, random_density

__version__ = "0.1.0"
