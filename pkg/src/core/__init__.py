"""__init__ for core module."""
from .cloneropt import (
    ChoiOperator, CloneCoefficients, CloningIsometry, CrossoverResult, DualCertificate,
    FidelityOperator, OptimizationResult,
    analytic_alpha, build_A, build_isometry, choi_from_isometry, clone_fidelities, crossover,
    dual_certificate, extremal_residual, fidelity_parallel, fidelity_perp, fidelity_perp_general,
    optimize_choi,
)
from .exceptions import ClonerError, NonConvergenceError
from .pdcsim import (
    FockState4, GainParameter, PdcBlock,
    fock_oracle, gain_scan, optimal_gain, pdc_amplitudes, pdc_fidelity,
)
from .settings import OptimizerSettings, OracleSettings, OutputSettings
from .su2kit import BlochAngles, WignerD, bloch_matrix, haar_monomial, wigner_bigD

__all__ = [
    'ChoiOperator',
    'CloneCoefficients',
    'CloningIsometry',
    'CrossoverResult',
    'DualCertificate',
    'FidelityOperator',
    'OptimizationResult',
    'analytic_alpha',
    'build_A',
    'build_isometry',
    'choi_from_isometry',
    'clone_fidelities',
    'crossover',
    'dual_certificate',
    'extremal_residual',
    'fidelity_parallel',
    'fidelity_perp',
    'fidelity_perp_general',
    'optimize_choi',
    'ClonerError',
    'NonConvergenceError',
    'FockState4',
    'GainParameter',
    'PdcBlock',
    'fock_oracle',
    'gain_scan',
    'optimal_gain',
    'pdc_amplitudes',
    'pdc_fidelity',
    'OptimizerSettings',
    'OracleSettings',
    'OutputSettings',
    'BlochAngles',
    'WignerD',
    'bloch_matrix',
    'haar_monomial',
    'wigner_bigD',
]
