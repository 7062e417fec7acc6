"""Random purification channel for passive Gaussian bosons in truncated Fock space."""

from .channel import (
    ChannelOutput,
    TwirlMethod,
    apply_channel,
    build_Rnk,
    rhs_theorem,
    thermal_tail,
    verify_commutation,
    verify_lemma2,
    verify_theorem,
)
from .errors import (
    ConvergenceError,
    DomainError,
    NotPSDError,
    PurifyError,
    ResourceError,
    StructureError,
    TruncationError,
)
from .fock import (
    BlockOperator,
    FockBasis,
    SectorOperator,
    SectorVector,
    enumerate_sector,
    enumerate_truncated,
    joint_basis,
)
from .howe import howe_identity_check, partitions, u_irrep_dim
from .interferometer import BACKEND, haar_unitary, permanent, sym_power
from .report import VerificationReport
from .states import (
    passive_state_fock,
    purification_via_lemma1,
    standard_purification,
    thermal_fock,
    tmsv_fock,
)
from .symplectic import CovarianceState, cov_from_fock, tmsv_cov
from .twirl import GroupSpec, fixed_point_twirl, mc_twirl

__version__ = "0.1.0"
