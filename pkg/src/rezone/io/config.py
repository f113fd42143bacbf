"""Run configuration: flat ``key = value`` files with ``#`` comments and an
optional ``[command]`` header. Every key is validated against the owning
command's schema before dispatch; unknown and duplicate keys are rejected
with line numbers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from ..errors import ConfigError

COMMANDS = (
    "resonances",
    "average",
    "equilibria",
    "bifdiag",
    "portrait",
    "reconnect",
    "map-orbits",
    "verify",
)


@dataclass(frozen=True)
class Field:
    parse: Callable[[str], Any]
    default: Any = None
    required: bool = False
    check: Callable[[Any], bool] | None = None
    range_text: str = ""


def _float(s: str) -> float:
    return float(s)


def _int(s: str) -> int:
    v = float(s)
    if v != int(v):
        raise ValueError(f"{s!r} is not an integer")
    return int(v)


def _bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"{s!r} is not a boolean")


def _float_list(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.split(",") if x.strip())


def _str(s: str) -> str:
    return s.strip()


def _pair(s: str) -> tuple[str, str]:
    parts = [x.strip() for x in s.split(",")]
    if len(parts) != 2:
        raise ValueError("expected two comma-separated labels")
    return parts[0], parts[1]


def _starts(s: str) -> tuple[tuple[float, float], ...]:
    out = []
    for item in s.split(";"):
        item = item.strip()
        if not item:
            continue
        u, v = item.split(":")
        out.append((float(u), float(v)))
    return tuple(out)


_ZONE_FIELDS = {
    "a": Field(_float, default=2.0),
    "b": Field(_float, default=1.0, check=lambda x: x != 0, range_text="b != 0"),
    "p": Field(_int, default=1, check=lambda x: x >= 1, range_text="p >= 1"),
    "mu1": Field(_float, required=True),
    "mu2": Field(_float, required=True),
    "b3": Field(_float, default=0.0),
}

SCHEMAS: dict[str, dict[str, Field]] = {
    "equilibria": dict(_ZONE_FIELDS),
    "portrait": {
        **_ZONE_FIELDS,
        "u_min": Field(_float, required=True),
        "u_max": Field(_float, required=True),
        "n_levels": Field(_int, default=9, check=lambda x: x >= 3, range_text="n_levels >= 3"),
        "grid": Field(_int, default=512, check=lambda x: x >= 16, range_text="grid >= 16"),
    },
    "bifdiag": {
        "a": Field(_float, default=2.0),
        "b": Field(_float, default=1.0, check=lambda x: x != 0, range_text="b != 0"),
        "p": Field(_int, default=1, check=lambda x: x >= 1, range_text="p >= 1"),
        "mu1_min": Field(_float, default=-3.0),
        "mu1_max": Field(_float, default=3.0),
        "mu2_min": Field(_float, default=-3.5),
        "mu2_max": Field(_float, default=3.5),
        "grid_n1": Field(_int, default=601, check=lambda x: x >= 51, range_text="grid_n1 >= 51"),
        "grid_n2": Field(_int, default=701, check=lambda x: x >= 51, range_text="grid_n2 >= 51"),
        "curve_points": Field(_int, default=600, check=lambda x: x >= 2, range_text="curve_points >= 2"),
        "trace_points": Field(_int, default=240, check=lambda x: x >= 2, range_text="trace_points >= 2"),
    },
    "reconnect": {
        "a": Field(_float, default=2.0),
        "b": Field(_float, default=1.0, check=lambda x: x != 0, range_text="b != 0"),
        "p": Field(_int, default=1, check=lambda x: x >= 1, range_text="p >= 1"),
        "mu1_values": Field(_float_list, required=True),
        "mu2_lo": Field(_float, required=True),
        "mu2_hi": Field(_float, required=True),
        "pair": Field(_pair, default=("O1+", "O2-")),
    },
    "map-orbits": {
        "variant": Field(
            _str,
            default="euler",
            check=lambda x: x in ("standard", "euler"),
            range_text="variant in {standard, euler}",
        ),
        "a": Field(_float, default=2.0),
        "beta": Field(_float, default=0.5),
        "alpha": Field(_float, default=0.17, check=lambda x: x > 0, range_text="alpha > 0"),
        "b": Field(_float, default=1.0, check=lambda x: x != 0, range_text="b != 0"),
        "p": Field(_int, default=1, check=lambda x: x >= 1, range_text="p >= 1"),
        "mu1": Field(_float, default=1.0),
        "mu2": Field(_float, default=2.1),
        "n_steps": Field(_int, default=2000, check=lambda x: x >= 1, range_text="n_steps >= 1"),
        "starts": Field(_starts, default=()),
        "n_random_starts": Field(
            _int, default=0, check=lambda x: x >= 0, range_text="n_random_starts >= 0"
        ),
        "u_spread": Field(_float, default=2.0, check=lambda x: x > 0, range_text="u_spread > 0"),
    },
    "resonances": {
        "omega_poly": Field(_float_list, required=True),
        "i_min": Field(_float, required=True),
        "i_max": Field(_float, required=True),
        "nu": Field(_float, required=True, check=lambda x: x > 0, range_text="nu > 0"),
        "p_max": Field(_int, default=3, check=lambda x: x >= 1, range_text="p_max >= 1"),
        "q_max": Field(_int, default=3, check=lambda x: x >= 1, range_text="q_max >= 1"),
        "scan_points": Field(_int, default=2048, check=lambda x: x >= 16, range_text="scan_points >= 16"),
    },
    "average": {
        "perturbation": Field(
            _str,
            default="sin_theta_minus_phi",
            check=lambda x: x in ("sin_theta_minus_phi", "resonant_harmonic", "hamiltonian_cos_wave", "resonant_family"),
            range_text="perturbation in {sin_theta_minus_phi, resonant_harmonic, hamiltonian_cos_wave, resonant_family}",
        ),
        "amplitude": Field(_float, default=1.0),
        "decay": Field(_float, default=0.6, check=lambda x: 0 < x < 1, range_text="0 < decay < 1"),
        "p": Field(_int, default=1, check=lambda x: x >= 1, range_text="p >= 1"),
        "q": Field(_int, default=1, check=lambda x: x >= 1, range_text="q >= 1"),
        "i_pq": Field(_float, default=1.0),
        "j": Field(_int, default=2, check=lambda x: x >= 1, range_text="j >= 1"),
        "bj": Field(_float, default=1.0),
        "bj1": Field(_float, default=0.0),
        "n_nodes": Field(
            _int, default=2048, check=lambda x: x >= 64 and x % 2 == 0, range_text="n_nodes even and >= 64"
        ),
        "v_points": Field(_int, default=256, check=lambda x: x >= 16, range_text="v_points >= 16"),
        "epsilon": Field(_float, default=0.001, check=lambda x: x >= 0, range_text="epsilon >= 0"),
        "deformation_b1": Field(_float, default=0.0),
        "reduce": Field(_bool, default=False),
    },
    "verify": {
        "fast": Field(_bool, default=False),
    },
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    values: dict[str, Any]
    seed: int = 0
    raw_lines: tuple[str, ...] = field(default=())

    def resolved(self) -> dict[str, Any]:
        out = dict(sorted(self.values.items()))
        out["command"] = self.command
        out["seed"] = self.seed
        return out


def parse_config(text: str, command: str | None = None) -> RunConfig:
    """Parse and validate a configuration document.

    The command comes from the ``[command]`` header or the ``command``
    argument; when both are present they must agree. Errors carry line
    numbers; range violations name the key and the valid range.
    """
    header: str | None = None
    header_line = 0
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            if header is not None:
                raise ConfigError("duplicate [command] header", line=lineno)
            header = line[1:-1].strip()
            header_line = lineno
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = line.split("=", 1)
        key = key.strip()
        if key in entries:
            raise ConfigError(f"duplicate key {key!r} (first on line {entries[key][1]})", line=lineno)
        entries[key] = (value.strip(), lineno)

    if header is not None and header not in COMMANDS:
        raise ConfigError(f"unknown command {header!r}; expected one of {', '.join(COMMANDS)}", line=header_line)
    if command is not None and header is not None and command != header:
        raise ConfigError(f"config header [{header}] does not match requested command {command!r}", line=header_line)
    cmd = command or header
    if cmd is None:
        raise ConfigError("no command: pass one explicitly or add a [command] header")
    if cmd not in COMMANDS:
        raise ConfigError(f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}")

    schema = SCHEMAS[cmd]
    seed = 0
    if "seed" in entries:
        raw_value, lineno = entries.pop("seed")
        try:
            seed = _int(raw_value)
        except ValueError as exc:
            raise ConfigError(f"seed: {exc}", line=lineno) from None

    values: dict[str, Any] = {}
    for key, (raw_value, lineno) in entries.items():
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} for command {cmd!r}", line=lineno)
        spec = schema[key]
        try:
            parsed = spec.parse(raw_value)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", line=lineno) from None
        if spec.check is not None and not spec.check(parsed):
            raise ConfigError(f"{key} = {raw_value}: out of range ({spec.range_text})", line=lineno)
        values[key] = parsed
    for key, spec in schema.items():
        if key in values:
            continue
        if spec.required:
            raise ConfigError(f"missing required key {key!r} for command {cmd!r}")
        values[key] = spec.default
    return RunConfig(command=cmd, values=values, seed=seed, raw_lines=tuple(text.splitlines()))
