"""HTTP service wrapping the analysis package.

POST /run executes any CLI command from a config document and returns the
artifacts; the typed endpoints expose the core computations directly for
programmatic clients.
"""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..diagram import build_parameter_diagram, trace_reconnection_curve
from ..equilibria import closed_form_equilibria
from ..errors import ConfigError, RezoneError
from ..flow import sample_phase_portrait
from ..io.config import parse_config
from ..io.runner import compute
from ..io.svg import render_portrait_svg
from ..io.writers import VERSION
from ..maps import EulerMapParams, PhaseState, StandardMapParams, iterate_orbit
from ..averaging import FrequencyProfile, find_resonance_levels
from ..verification import run_all
from ..zone_model import ZoneParameters
from . import schemas

app = FastAPI(
    title="rezone",
    description="Resonance-zone bifurcation analysis and cylinder-map service",
    version=VERSION,
)


@app.get("/health", response_model=schemas.HealthResponse)
def health() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok", version=VERSION)


@app.post("/run", response_model=schemas.RunResponse)
def run_command(request: schemas.RunRequest) -> schemas.RunResponse:
    try:
        config = parse_config(request.config_text, command=request.command)
        result = compute(config, jobs=request.jobs, svg=request.svg)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    except RezoneError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    return schemas.RunResponse(
        status=result.status,
        artifacts=[
            schemas.ArtifactModel(name=a.name, kind=a.kind, text=a.text)
            for a in result.artifacts
        ],
        metadata={k: str(v) for k, v in result.metadata.items()},
    )


def _zone_from(request: schemas.ZoneRequest) -> ZoneParameters:
    try:
        return ZoneParameters(
            a=request.a, b=request.b, p=request.p,
            mu1=request.mu1, mu2=request.mu2, b3=request.b3,
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


def _equilibrium_models(params: ZoneParameters) -> list[schemas.EquilibriumModel]:
    return [
        schemas.EquilibriumModel(
            label=e.label, u=e.state.u, v=e.state.v,
            kind=e.kind, delta=e.delta, energy=e.energy,
        )
        for e in closed_form_equilibria(params)
    ]


@app.post("/equilibria", response_model=schemas.EquilibriaResponse)
def equilibria(request: schemas.ZoneRequest) -> schemas.EquilibriaResponse:
    return schemas.EquilibriaResponse(equilibria=_equilibrium_models(_zone_from(request)))


@app.post("/portrait", response_model=schemas.PortraitResponse)
def portrait(request: schemas.PortraitRequest) -> schemas.PortraitResponse:
    params = _zone_from(request)
    try:
        result = sample_phase_portrait(
            params, (request.u_min, request.u_max), request.n_levels, grid=request.grid
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    return schemas.PortraitResponse(
        saddle_levels=list(result.saddle_levels),
        n_contour_segments=sum(len(level.segments) for level in result.levels),
        equilibria=[
            schemas.EquilibriumModel(
                label=e.label, u=e.state.u, v=e.state.v,
                kind=e.kind, delta=e.delta, energy=e.energy,
            )
            for e in result.equilibria
        ],
        svg=render_portrait_svg(result) if request.svg else None,
    )


@app.post("/diagram", response_model=schemas.DiagramResponse)
def diagram(request: schemas.DiagramRequest) -> schemas.DiagramResponse:
    result = build_parameter_diagram(
        request.p, request.a, request.b,
        (request.mu1_min, request.mu1_max, request.mu2_min, request.mu2_max),
        grid=(request.grid_n1, request.grid_n2),
        trace_mu1_points=request.trace_points,
    )
    curves = [
        schemas.CurveModel(id=c.curve_id, points=[[m1, m2] for m1, m2 in c.points])
        for c in result.analytic_curves
    ] + [
        schemas.CurveModel(
            id=c.curve_id, pair=list(c.pair or ()),
            points=[[m1, m2] for m1, m2 in c.points],
        )
        for c in result.reconnection_curves
    ]
    regions = [
        schemas.RegionModel(
            mu1=point[0],
            mu2=point[1],
            signature=schemas.SignatureModel(
                n_saddles=sig.n_saddles,
                n_centers=sig.n_centers,
                has_off_axis=sig.has_off_axis,
                kinds=[list(k) for k in sig.kinds],
                saddle_energy_order=list(sig.saddle_energy_order),
                energy_ties=[list(t) for t in sig.energy_ties],
            ),
        )
        for point, sig in result.region_samples
    ]
    return schemas.DiagramResponse(
        curves=curves, regions=regions, component_count=result.component_count
    )


@app.post("/reconnect", response_model=schemas.ReconnectResponse)
def reconnect(request: schemas.ReconnectRequest) -> schemas.ReconnectResponse:
    curve = trace_reconnection_curve(
        request.p, request.a, request.b,
        request.mu1_values, (request.mu2_lo, request.mu2_hi), request.pair,
    )
    return schemas.ReconnectResponse(
        points=[
            schemas.ReconnectPoint(mu1=p.mu1, mu2=p.mu2, residual=p.residual)
            for p in curve.points
        ],
        skipped=list(curve.skipped),
    )


@app.post("/map/orbit", response_model=schemas.MapOrbitResponse)
def map_orbit(request: schemas.MapOrbitRequest) -> schemas.MapOrbitResponse:
    if request.variant == "standard":
        spec = StandardMapParams(a=request.a, beta=request.beta)
    else:
        try:
            zone = ZoneParameters(
                a=request.a, b=request.b, p=request.p,
                mu1=request.mu1, mu2=request.mu2,
            )
            spec = EulerMapParams(alpha=request.alpha, zone=zone)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
    try:
        orbit = iterate_orbit(spec, PhaseState(request.u0, request.v0), request.n_steps)
    except RezoneError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    return schemas.MapOrbitResponse(
        u=[float(x) for x in orbit.u],
        v=[float(x) for x in orbit.v_mod],
        v_unwrapped=[float(x) for x in orbit.v_unwrapped],
    )


@app.post("/resonances", response_model=schemas.ResonancesResponse)
def resonances(request: schemas.ResonancesRequest) -> schemas.ResonancesResponse:
    coeffs = list(request.omega_poly)

    def omega(i: float) -> float:
        acc = 0.0
        for c in reversed(coeffs):
            acc = acc * i + c
        return acc

    try:
        profile = FrequencyProfile(
            omega=omega, i_range=(request.i_min, request.i_max), nu=request.nu
        )
        specs = find_resonance_levels(profile, request.p_max, request.q_max)
    except (ValueError, RezoneError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    return schemas.ResonancesResponse(
        resonances=[
            schemas.ResonanceModel(
                p=s.p, q=s.q, i_pq=s.i_pq, j=s.j, s=s.s, bj=s.bj, bj1=s.bj1
            )
            for s in specs
        ]
    )


@app.post("/verify", response_model=schemas.VerifyResponse)
def verify(request: schemas.VerifyRequest) -> schemas.VerifyResponse:
    results = run_all(seed=request.seed, fast=request.fast)
    return schemas.VerifyResponse(
        checks=[
            schemas.CheckModel(name=r.name, passed=r.passed, detail=r.detail)
            for r in results
        ],
        all_passed=all(r.passed for r in results),
    )
