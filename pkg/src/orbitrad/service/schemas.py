"""Request/response models for the HTTP surface.

MatrixPayload mirrors the on-disk matrix format {"n", "re", "im"} so the
CLI can forward file contents verbatim.
"""

from typing import Literal, Optional

from pydantic import BaseModel, Field

import numpy as np

from .. import matio


class MatrixPayload(BaseModel):
    n: int
    re: list[list[float]]
    im: list[list[float]]

    def to_array(self) -> np.ndarray:
        return matio.matrix_from_dict(self.model_dump())

    @classmethod
    def from_array(cls, m: np.ndarray) -> "MatrixPayload":
        return cls(**matio.matrix_to_dict(m))


class RadiusRequest(BaseModel):
    c: MatrixPayload
    a: MatrixPayload
    starts: int = Field(default=16, ge=1)
    max_iters: int = Field(default=500, ge=1)
    seed: int = 42
    oracle: Literal["grid", "hermitian", "none"] = "none"


class RadiusResponse(BaseModel):
    value: float
    phase: float
    maximizer: MatrixPayload
    per_start_values: list[float]
    iterations_used: list[int]
    converged_flags: list[bool]
    oracle: str
    oracle_value: Optional[float] = None


class SpectrumRequest(BaseModel):
    t: MatrixPayload


class SpectrumResponse(BaseModel):
    eigenvalues_re: list[float]
    eigenvalues_im: list[float]


class AluthgeRequest(BaseModel):
    t: MatrixPayload
    lam: float = Field(default=0.5, ge=0.0, le=1.0)
    iterate: int = Field(default=0, ge=0)


class IterationPayload(BaseModel):
    sequence: list[MatrixPayload]
    normality_defects: list[float]
    spectrum_drifts: list[float]
    truncated_at: Optional[int] = None


class AluthgeResponse(BaseModel):
    lam: float
    transformed: MatrixPayload
    unitary_factor: MatrixPayload
    modulus: MatrixPayload
    similarity_defect: float
    iteration: Optional[IterationPayload] = None


class MembershipRequest(BaseModel):
    a: MatrixPayload
    b: MatrixPayload
    max_fw_iters: int = Field(default=300, ge=1)
    member_tol: float = Field(default=1e-2, gt=0.0)
    lmo_starts: int = Field(default=4, ge=1)
    lmo_max_iters: int = Field(default=150, ge=1)
    seed: int = 42


class AtomPayload(BaseModel):
    z_re: float
    z_im: float
    u: MatrixPayload


class MembershipResponse(BaseModel):
    verdict: Literal["Member", "Separated", "Undecided"]
    final_distance: float
    fw_gap: float
    iterations: int
    coefficient_budget: float
    atoms: list[AtomPayload]
    certificate: Optional[MatrixPayload] = None
    separation_margin: float


class WitnessRequest(BaseModel):
    a: MatrixPayload
    b: MatrixPayload
    starts: int = Field(default=8, ge=1)
    max_iters: int = Field(default=200, ge=1)
    seed: int = 42


class WitnessResponse(BaseModel):
    commutator_norm: float
    u: MatrixPayload


class VerifyRequest(BaseModel):
    suite: Literal["t51", "p52", "p53", "c41", "all"]
    trials: int = Field(default=20, ge=1)
    dims: list[int] = Field(default=[2, 3])
    seed: int = 42


class VerifyResponse(BaseModel):
    passed: bool
    total_trials: int
    total_passes: int
    reports: list[dict]
    csv: str
