"""Command dispatch: each run configuration maps to core-module calls whose
results are rendered into named text artifacts (CSV/JSON/SVG). File writing
is atomic and separated from computation so the service can return artifacts
in-memory.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import perturbations
from ..averaging import (
    FrequencyProfile,
    ResonanceSpec,
    classify_resonance,
    compute_averaged_coefficients,
    find_resonance_levels,
    harmonic_reduction,
    verify_hamiltonian_identities,
)
from ..diagram import build_parameter_diagram, trace_reconnection_curve
from ..equilibria import closed_form_equilibria
from ..errors import ConfigError, RezoneError
from ..flow import sample_phase_portrait
from ..maps import (
    EulerMapParams,
    StandardMapParams,
    approximating_hamiltonian,
    iterate_orbit,
)
from ..verification import format_table, run_all
from ..zone_model import PhaseState, ZoneParameters, eval_hamiltonian
from .config import RunConfig
from .svg import render_diagram_svg, render_portrait_svg
from .writers import atomic_write, render_csv, render_json

EXIT_OK = 0
EXIT_COMPUTATION = 1
EXIT_CONFIG = 2


@dataclass(frozen=True)
class Artifact:
    name: str
    kind: str  # csv | json | svg | text
    text: str


@dataclass(frozen=True)
class RunResult:
    status: str
    artifacts: tuple[Artifact, ...]
    metadata: dict
    all_passed: bool = True


def _zone(values: dict) -> ZoneParameters:
    return ZoneParameters(
        a=values["a"], b=values["b"], p=values["p"],
        mu1=values["mu1"], mu2=values["mu2"], b3=values.get("b3", 0.0),
    )


def _equilibria_rows(params: ZoneParameters):
    for eq in closed_form_equilibria(params):
        yield (
            float(params.mu1), float(params.mu2), params.p, float(params.a),
            float(params.b), eq.label, float(eq.state.u), float(eq.state.v),
            eq.kind, float(eq.delta), float(eq.energy),
        )


EQUILIBRIA_HEADER = ("mu1", "mu2", "p", "a", "b", "label", "u", "v", "kind", "delta", "energy")
ORBIT_HEADER = ("step_or_tau", "u", "v", "v_unwrapped", "energy")
CURVE_HEADER = ("curve_id", "mu1", "mu2")


def _run_equilibria(config: RunConfig, jobs: int, svg: bool) -> list[Artifact]:
    params = _zone(config.values)
    text = render_csv(EQUILIBRIA_HEADER, _equilibria_rows(params), config.resolved())
    return [Artifact("equilibria.csv", "csv", text)]


def _run_portrait(config: RunConfig, jobs: int, svg: bool) -> list[Artifact]:
    v = config.values
    params = _zone(v)
    portrait = sample_phase_portrait(
        params, (v["u_min"], v["u_max"]), v["n_levels"], grid=v["grid"]
    )
    rows = []
    for level in portrait.levels:
        for x0, y0, x1, y1 in level.segments:
            rows.append((float(level.level), level.kind, float(x0), float(y0), float(x1), float(y1)))
    artifacts = [
        Artifact(
            "portrait.csv",
            "csv",
            render_csv(
                ("level", "level_kind", "v0", "u0", "v1", "u1"), rows, config.resolved()
            ),
        ),
        Artifact(
            "equilibria.csv",
            "csv",
            render_csv(EQUILIBRIA_HEADER, _equilibria_rows(params), config.resolved()),
        ),
    ]
    if svg:
        artifacts.append(
            Artifact("portrait.svg", "svg", render_portrait_svg(portrait, config.resolved()))
        )
    return artifacts


def _run_bifdiag(config: RunConfig, jobs: int, svg: bool) -> list[Artifact]:
    v = config.values
    diagram = build_parameter_diagram(
        v["p"], v["a"], v["b"],
        (v["mu1_min"], v["mu1_max"], v["mu2_min"], v["mu2_max"]),
        grid=(v["grid_n1"], v["grid_n2"]),
        curve_points=v["curve_points"],
        trace_mu1_points=v["trace_points"],
    )
    curves_payload = [
        {"id": c.curve_id, "points": [[m1, m2] for m1, m2 in c.points]}
        for c in diagram.analytic_curves
    ] + [
        {"id": c.curve_id, "pair": list(c.pair or ()), "points": [[m1, m2] for m1, m2 in c.points]}
        for c in diagram.reconnection_curves
    ]
    regions_payload = [
        {
            "mu1": point[0],
            "mu2": point[1],
            "signature": {
                "n_saddles": sig.n_saddles,
                "n_centers": sig.n_centers,
                "has_off_axis": sig.has_off_axis,
                "kinds": [list(k) for k in sig.kinds],
                "saddle_energy_order": [[lbl, en] for lbl, en in sig.saddle_energy_order],
                "energy_ties": [list(t) for t in sig.energy_ties],
            },
        }
        for point, sig in diagram.region_samples
    ]
    json_text = render_json(
        {"curves": curves_payload, "regions": regions_payload,
         "component_count": diagram.component_count},
        config.resolved(),
    )
    rows = []
    for c in list(diagram.analytic_curves) + list(diagram.reconnection_curves):
        for m1, m2 in c.points:
            rows.append((c.curve_id, float(m1), float(m2)))
    artifacts = [
        Artifact("diagram.json", "json", json_text),
        Artifact("curves.csv", "csv", render_csv(CURVE_HEADER, rows, config.resolved())),
    ]
    if svg:
        artifacts.append(
            Artifact("diagram.svg", "svg", render_diagram_svg(diagram, config.resolved()))
        )
    return artifacts


def _run_reconnect(config: RunConfig, jobs: int, svg: bool) -> list[Artifact]:
    v = config.values
    mu1_values = list(v["mu1_values"])

    def solve_one(mu1: float):
        return trace_reconnection_curve(
            v["p"], v["a"], v["b"], [mu1], (v["mu2_lo"], v["mu2_hi"]), v["pair"]
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            curves = list(pool.map(solve_one, mu1_values))
    else:
        curves = [solve_one(m) for m in mu1_values]
    rows = []
    skipped = []
    for curve in curves:
        for pt in curve.points:
            rows.append(("m6", float(pt.mu1), float(pt.mu2)))
        skipped.extend(curve.skipped)
    meta = dict(config.resolved())
    if skipped:
        meta["skipped"] = ";".join(f"{m1}:{reason}" for m1, reason in skipped)
    return [Artifact("reconnection.csv", "csv", render_csv(CURVE_HEADER, rows, meta))]


def _run_map_orbits(config: RunConfig, jobs: int, svg: bool) -> list[Artifact]:
    v = config.values
    if v["variant"] == "standard":
        spec = StandardMapParams(a=v["a"], beta=v["beta"])

        def energy(state: PhaseState) -> float:
            return approximating_hamiltonian("T", v["a"], v["beta"], state)
    else:
        zone = ZoneParameters(a=v["a"], b=v["b"], p=v["p"], mu1=v["mu1"], mu2=v["mu2"])
        spec = EulerMapParams(alpha=v["alpha"], zone=zone)

        def energy(state: PhaseState) -> float:
            return eval_hamiltonian(zone, state)

    starts = list(v["starts"])
    if v["n_random_starts"]:
        rng = np.random.default_rng(config.seed)
        for _ in range(v["n_random_starts"]):
            starts.append(
                (float(rng.uniform(-v["u_spread"], v["u_spread"])),
                 float(rng.uniform(0.0, 2.0 * np.pi)))
            )
    if not starts:
        starts = [(0.1, 0.1)]

    def run_orbit(start):
        u0, v0 = start
        orbit = iterate_orbit(spec, PhaseState(u0, v0), v["n_steps"])
        rows = []
        for k in range(len(orbit.u)):
            state = PhaseState(float(orbit.u[k]), float(orbit.v_mod[k]))
            rows.append(
                (
                    k,
                    float(orbit.u[k]),
                    float(orbit.v_mod[k]),
                    float(orbit.v_unwrapped[k]),
                    float(energy(state)),
                )
            )
        return rows

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            all_rows = list(pool.map(run_orbit, starts))
    else:
        all_rows = [run_orbit(s) for s in starts]
    artifacts = []
    for index, rows in enumerate(all_rows):
        artifacts.append(
            Artifact(
                f"orbit_{index:03d}.csv",
                "csv",
                render_csv(ORBIT_HEADER, rows, {**config.resolved(), "start_index": index}),
            )
        )
    return artifacts


def _run_resonances(config: RunConfig, jobs: int, svg: bool) -> list[Artifact]:
    v = config.values
    coeffs = list(v["omega_poly"])

    def omega(i: float) -> float:
        acc = 0.0
        for c in reversed(coeffs):
            acc = acc * i + c
        return acc

    profile = FrequencyProfile(omega=omega, i_range=(v["i_min"], v["i_max"]), nu=v["nu"])
    specs = find_resonance_levels(
        profile, v["p_max"], v["q_max"], scan_points=v["scan_points"]
    )
    rows = [
        (s.p, s.q, float(s.i_pq), s.j, float(s.s), float(s.bj), float(s.bj1))
        for s in specs
    ]
    return [
        Artifact(
            "resonances.csv",
            "csv",
            render_csv(("p", "q", "i_pq", "j", "s", "bj", "bj1"), rows, config.resolved()),
        )
    ]


def _run_average(config: RunConfig, jobs: int, svg: bool) -> list[Artifact]:
    v = config.values
    pert = perturbations.CATALOG[v["perturbation"]](v)
    spec = ResonanceSpec(
        p=v["p"], q=v["q"], i_pq=v["i_pq"], j=v["j"], bj=v["bj"], bj1=v["bj1"]
    )
    coeffs = compute_averaged_coefficients(
        pert, spec, v["n_nodes"], v_points=v["v_points"]
    )
    rows = [
        (float(coeffs.v_grid[i]), float(coeffs.a0[i]), float(coeffs.p0[i]), float(coeffs.q0[i]))
        for i in range(len(coeffs.v_grid))
    ]
    report = verify_hamiltonian_identities(coeffs)
    payload = {
        "b0": coeffs.b0,
        "b1": coeffs.b1,
        "classification": classify_resonance(coeffs).value,
        "identity_residual": report.max_identity_residual,
        "identities_pass": report.passed,
    }
    if v["reduce"]:
        red = harmonic_reduction(
            coeffs, spec, v["epsilon"], deformation_b1=v["deformation_b1"]
        )
        payload["reduction"] = {
            "a_p1": red.a_p1,
            "c_p1": red.c_p1,
            "d_p1": red.d_p1,
            "zone": {
                "a": red.zone.a, "b": red.zone.b, "p": red.zone.p,
                "mu1": red.zone.mu1, "mu2": red.zone.mu2, "b3": red.zone.b3,
            },
        }
    return [
        Artifact(
            "averaged.csv", "csv",
            render_csv(("v", "a0", "p0", "q0"), rows, config.resolved()),
        ),
        Artifact("averaged.json", "json", render_json(payload, config.resolved())),
    ]


def _run_verify(config: RunConfig, jobs: int, svg: bool) -> tuple[list[Artifact], bool]:
    results = run_all(seed=config.seed, fast=config.values.get("fast", False))
    table = format_table(results)
    payload = {
        "checks": [
            {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    artifacts = [
        Artifact("verify.txt", "text", table + "\n"),
        Artifact("verify.json", "json", render_json(payload, config.resolved())),
    ]
    return artifacts, all(r.passed for r in results)


_DISPATCH = {
    "equilibria": _run_equilibria,
    "portrait": _run_portrait,
    "bifdiag": _run_bifdiag,
    "reconnect": _run_reconnect,
    "map-orbits": _run_map_orbits,
    "resonances": _run_resonances,
    "average": _run_average,
}


def compute(config: RunConfig, *, jobs: int = 1, svg: bool = False) -> RunResult:
    """Run the command and return in-memory artifacts.

    Raises ConfigError for configuration problems and RezoneError subclasses
    for computation failures.
    """
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")
    if config.command == "verify":
        artifacts, all_passed = _run_verify(config, jobs, svg)
        return RunResult(
            status="ok" if all_passed else "failed",
            artifacts=tuple(artifacts),
            metadata=config.resolved(),
            all_passed=all_passed,
        )
    handler = _DISPATCH.get(config.command)
    if handler is None:
        raise ConfigError(f"unknown command {config.command!r}")
    artifacts = handler(config, jobs, svg)
    return RunResult(status="ok", artifacts=tuple(artifacts), metadata=config.resolved())


def run(config: RunConfig, out_dir: str, *, jobs: int = 1, svg: bool = False) -> int:
    """Compute and write all artifacts atomically into ``out_dir``.

    Exit status: 0 on success, 1 on computation error, 2 on config error.
    The ``verify`` command exits 1 when any check fails.
    """
    try:
        result = compute(config, jobs=jobs, svg=svg)
    except ConfigError:
        raise
    except RezoneError as exc:
        print(f"computation error: {exc}")
        return EXIT_COMPUTATION
    for artifact in result.artifacts:
        atomic_write(os.path.join(out_dir, artifact.name), artifact.text)
    if config.command == "verify":
        print(result.artifacts[0].text, end="")
        return EXIT_OK if result.all_passed else EXIT_COMPUTATION
    return EXIT_OK
