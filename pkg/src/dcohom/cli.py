"""dcohom command line: a thin client of the FastAPI service.

By default requests run against an in-process ASGI transport (no socket); a
remote service started with `dcohom serve` can be targeted with --server.
Exit status is zero iff every stabilization flag is true and every
cross-route comparison passed; every error class maps to its own code.
"""

from __future__ import annotations

import argparse
import sys

import httpx

from .engine import COMMANDS, ResultDocument, emit

INTERNAL_ERROR = 70


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcohom",
        description="Exact Hochschild / de Rham cohomology of differential operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} computation")
        p.add_argument("space", help="space expression, e.g. torus(1) or product(torus(1), affine(1))")
        p.add_argument("--window", type=int, default=6, help="filtration window (default 6)")
        p.add_argument("--omega", default=None, help="closed 2-form expression")
        p.add_argument("--lambda", dest="lam", default=None, help="closed 1-form expression")
        p.add_argument("--json", action="store_true", help="emit the JSON document")
        p.add_argument("--server", default=None, help="URL of a running dcohom service")
    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8754)
    return parser


def _post(payload: dict, server: str | None) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            return client.post("/v1/run", json=payload)

    import asyncio

    from .service import app

    async def call():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://dcohom.internal", timeout=None
        ) as client:
            return await client.post("/v1/run", json=payload)

    return asyncio.run(call())


def run_request(args) -> int:
    payload = {
        "command": args.command,
        "space": args.space,
        "window": args.window,
        "omega": args.omega,
        "lambda": args.lam,
    }
    response = _post(payload, args.server)
    body = response.json()
    if response.status_code != 200:
        sys.stderr.write(f"error [{body.get('name')}]: {body.get('message')}\n")
        return int(body.get("exit_code", INTERNAL_ERROR))
    doc = ResultDocument.from_json_dict(body)
    sys.stdout.buffer.write(emit(doc, args.json))
    if doc.ok:
        return 0
    if not all(doc.stabilized):
        return 5
    return 6


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    try:
        return run_request(args)
    except httpx.HTTPError as exc:
        sys.stderr.write(f"transport error: {exc}\n")
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
