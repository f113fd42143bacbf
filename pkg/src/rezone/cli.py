"""Thin command-line client of the service.

Every analysis command is sent to the HTTP service (in-process by default,
remote with --server) as a /run request; the returned artifacts are written
atomically into the output directory. ``serve`` starts the service.
"""
from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigError
from .io.config import COMMANDS
from .io.runner import EXIT_COMPUTATION, EXIT_CONFIG, EXIT_OK
from .io.writers import VERSION, atomic_write


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rezone",
        description="Resonance-zone bifurcation analysis and cylinder maps",
    )
    parser.add_argument("--version", action="version", version=f"rezone {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=f"run the {name} command")
        cmd.add_argument("--config", required=(name != "verify"), help="path to a key = value config file")
        cmd.add_argument("--out", default=".", help="output directory (default: current)")
        cmd.add_argument("--jobs", type=int, default=1, help="worker pool size for sweeps")
        cmd.add_argument("--svg", action="store_true", help="also emit SVG renderings")
        cmd.add_argument("--server", default=None, help="remote service URL (default: in-process)")
    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    config_text = ""
    if args.config is not None:
        try:
            with open(args.config) as handle:
                config_text = handle.read()
        except OSError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    if args.jobs < 1:
        print("config error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    try:
        with _client(args.server) as client:
            response = client.post(
                "/run",
                json={
                    "command": args.command,
                    "config_text": config_text,
                    "jobs": args.jobs,
                    "svg": bool(args.svg),
                },
            )
    except ConfigError as exc:  # pragma: no cover - defensive
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"service error: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION

    if response.status_code == 400:
        print(f"config error: {response.json().get('detail')}", file=sys.stderr)
        return EXIT_CONFIG
    if response.status_code != 200:
        detail = response.json().get("detail", response.text)
        print(f"computation error: {detail}", file=sys.stderr)
        return EXIT_COMPUTATION

    payload = response.json()
    for artifact in payload["artifacts"]:
        path = os.path.join(args.out, artifact["name"])
        atomic_write(path, artifact["text"])
        print(f"wrote {path}")
    if args.command == "verify":
        table = next(a for a in payload["artifacts"] if a["name"] == "verify.txt")
        print(table["text"], end="")
        if payload["status"] != "ok":
            return EXIT_COMPUTATION
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
