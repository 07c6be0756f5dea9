"""Solver and output settings.

All parameters arrive through CLI flags or keyword arguments; nothing is
read from the environment.
"""
from pydantic import BaseModel, ConfigDict, Field


class OptimizerSettings(BaseModel):
    """Stopping rule and regularization for the Choi fixed-point iteration."""

    model_config = ConfigDict(frozen=True)

    tol: float = Field(1e-12, gt=0, description="Fidelity change threshold")
    max_iter: int = Field(10_000, ge=1)
    lambda_floor: float = Field(1e-14, gt=0, description="Eigenvalue floor of Tr_K[A chi A]")
    residual_factor: float = Field(1e3, gt=0, description="Stationarity residual bound as a multiple of tol")
    log_every: int = Field(100, ge=1)


class OracleSettings(BaseModel):
    """Truncation control for the Fock-space propagator."""

    model_config = ConfigDict(frozen=True)

    tail_tol: float = Field(1e-8, gt=0)
    margin: int = Field(4, ge=1, description="Extra photon pairs kept beyond the cutoff")
    margin_step: int = Field(4, ge=1)
    max_margin: int = Field(40, ge=1)


class OutputSettings(BaseModel):
    """Significant digits used by the table emitters."""

    model_config = ConfigDict(frozen=True)

    json_digits: int = Field(15, ge=1, le=17)
    csv_digits: int = Field(12, ge=1, le=17)


DEFAULT_OPTIMIZER = OptimizerSettings()
DEFAULT_ORACLE = OracleSettings()
DEFAULT_OUTPUT = OutputSettings()
