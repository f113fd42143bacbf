"""Pydantic request/response models for the HTTP service."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..io.config import COMMANDS

CommandName = Literal[
    "resonances", "average", "equilibria", "bifdiag",
    "portrait", "reconnect", "map-orbits", "verify",
]
assert set(CommandName.__args__) == set(COMMANDS)


class RunRequest(BaseModel):
    command: CommandName
    config_text: str = ""
    jobs: int = Field(default=1, ge=1)
    svg: bool = False


class ArtifactModel(BaseModel):
    name: str
    kind: Literal["csv", "json", "svg", "text"]
    text: str


class RunResponse(BaseModel):
    status: str
    artifacts: list[ArtifactModel]
    metadata: dict


class ZoneRequest(BaseModel):
    a: float = 2.0
    b: float = 1.0
    p: int = Field(default=1, ge=1)
    mu1: float
    mu2: float
    b3: float = 0.0


class EquilibriumModel(BaseModel):
    label: str
    u: float
    v: float
    kind: str
    delta: float
    energy: float


class EquilibriaResponse(BaseModel):
    equilibria: list[EquilibriumModel]


class PortraitRequest(ZoneRequest):
    u_min: float
    u_max: float
    n_levels: int = Field(default=9, ge=3)
    grid: int = Field(default=512, ge=16)
    svg: bool = False


class PortraitResponse(BaseModel):
    saddle_levels: list[float]
    n_contour_segments: int
    equilibria: list[EquilibriumModel]
    svg: Optional[str] = None


class DiagramRequest(BaseModel):
    a: float = 2.0
    b: float = 1.0
    p: int = Field(default=1, ge=1)
    mu1_min: float = -3.0
    mu1_max: float = 3.0
    mu2_min: float = -3.5
    mu2_max: float = 3.5
    grid_n1: int = Field(default=601, ge=51)
    grid_n2: int = Field(default=701, ge=51)
    trace_points: int = Field(default=240, ge=2)


class CurveModel(BaseModel):
    id: str
    pair: Optional[list[str]] = None
    points: list[list[float]]


class SignatureModel(BaseModel):
    n_saddles: int
    n_centers: int
    has_off_axis: bool
    kinds: list[list[str]]
    saddle_energy_order: list[tuple[str, float]]
    energy_ties: list[list[str]]


class RegionModel(BaseModel):
    mu1: float
    mu2: float
    signature: SignatureModel


class DiagramResponse(BaseModel):
    curves: list[CurveModel]
    regions: list[RegionModel]
    component_count: int


class ReconnectRequest(BaseModel):
    a: float = 2.0
    b: float = 1.0
    p: int = Field(default=1, ge=1)
    mu1_values: list[float]
    mu2_lo: float
    mu2_hi: float
    pair: tuple[str, str] = ("O1+", "O2-")


class ReconnectPoint(BaseModel):
    mu1: float
    mu2: float
    residual: float


class ReconnectResponse(BaseModel):
    points: list[ReconnectPoint]
    skipped: list[tuple[float, str]]


class MapOrbitRequest(BaseModel):
    variant: Literal["standard", "euler"] = "euler"
    a: float = 2.0
    beta: float = 0.5
    alpha: float = Field(default=0.17, gt=0)
    b: float = 1.0
    p: int = Field(default=1, ge=1)
    mu1: float = 1.0
    mu2: float = 2.1
    u0: float = 0.1
    v0: float = 0.1
    n_steps: int = Field(default=2000, ge=1)


class MapOrbitResponse(BaseModel):
    u: list[float]
    v: list[float]
    v_unwrapped: list[float]


class ResonancesRequest(BaseModel):
    omega_poly: list[float]
    i_min: float
    i_max: float
    nu: float = Field(gt=0)
    p_max: int = Field(default=3, ge=1)
    q_max: int = Field(default=3, ge=1)


class ResonanceModel(BaseModel):
    p: int
    q: int
    i_pq: float
    j: int
    s: float
    bj: float
    bj1: float


class ResonancesResponse(BaseModel):
    resonances: list[ResonanceModel]


class VerifyRequest(BaseModel):
    seed: int = 0
    fast: bool = False


class CheckModel(BaseModel):
    name: str
    passed: bool
    detail: str


class VerifyResponse(BaseModel):
    checks: list[CheckModel]
    all_passed: bool


class HealthResponse(BaseModel):
    status: str
    version: str
