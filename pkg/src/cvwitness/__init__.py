"""Trace-norm separability criteria for continuous-variable quantum states."""

__version__ = "0.1.0"

from .exceptions import CVWitnessError, InapplicableError, InputError, NumericError
from .reports import CriterionReport
from .matcore import svd, trace_norm, sym_eigvals
from .gaussian import (
    CovarianceMatrix,
    ModePartition,
    WeightVector,
    builtin,
    duan_check,
    gaussian_ppt_check,
    mancini_check,
    prop1a_check,
    prop1b_check,
    symplectic_eigenvalues,
    tlur_check,
    tmsv,
    vacuum,
    werner_wolf_state,
)
from .optimizer import OptimizerConfig, optimize_weights
from .hlstate import HLParams, hl_truncated_block, prop2_check, scan_hl_region, su_n_basis
