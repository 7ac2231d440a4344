"""Command-line client.

The CLI never runs the analyzer directly: it talks HTTP to the service
API, by default against an in-process instance (no sockets involved),
or against a remote one via --server.  Exit codes: 0 on success, 1 on
analysis or verification failures, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional

import httpx

from . import __version__
from .domains import DOMAIN_NAMES
from .normalize import NORMALIZE_SITES
from .report import render_table


def _client(server: Optional[str]) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    from .api import app

    return TestClient(app, raise_server_exceptions=False)


def _fail(message: str, code: int) -> int:
    print(message, file=sys.stderr)
    return code


def _detail(resp: httpx.Response) -> str:
    try:
        detail = resp.json().get("detail", {})
    except ValueError:
        return resp.text
    if isinstance(detail, dict):
        msg = detail.get("message", json.dumps(detail))
        return f"{detail['error']}: {msg}" if "error" in detail else msg
    return str(detail)


def _add_server(p: argparse.ArgumentParser) -> None:
    p.add_argument("--server", metavar="URL", help="analyze via a running service instead of in-process")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cliquesh",
        description="Set-sharing analysis for logic programs, with clique "
        "compression and freeness tracking.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analyze a program and print a report")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("file", nargs="?", help="program file")
    src.add_argument("--corpus", metavar="NAME", help="analyze a bundled corpus program")
    a.add_argument("--domain", choices=DOMAIN_NAMES, default="sharing")
    a.add_argument(
        "--normalize-at",
        action="append",
        choices=NORMALIZE_SITES,
        metavar="SITE",
        help=f"normalization site, repeatable; one of {', '.join(NORMALIZE_SITES)}",
    )
    a.add_argument("--widening-threshold", type=float, metavar="F")
    a.add_argument("--clsh-limit", type=int, default=24, metavar="N")
    a.add_argument("--free-head-call2entry", action="store_true")
    a.add_argument("--on-unknown", choices=("top", "error"), default="top")
    a.add_argument("--max-variants", type=int, metavar="N")
    a.add_argument("--report", choices=("table", "json"), default="table")
    a.add_argument("--verify", action="store_true", help="cross-check the run and fail on mismatch")
    _add_server(a)

    b = sub.add_parser("bench", help="run the benchmark matrix")
    b.add_argument("dir", nargs="?", help="directory of .pl programs (default: bundled corpus)")
    b.add_argument("--programs", nargs="+", metavar="NAME")
    b.add_argument("--domains", nargs="+", choices=DOMAIN_NAMES, metavar="DOMAIN")
    b.add_argument("--policies", nargs="+", metavar="POLICY")
    b.add_argument("--repeats", type=int, default=3, metavar="K")
    b.add_argument("--report", choices=("md", "json"), default="md")
    _add_server(b)

    c = sub.add_parser("corpus", help="list bundled programs or print one")
    c.add_argument("name", nargs="?", help="program to print")
    _add_server(c)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    return parser


def _cmd_analyze(args: argparse.Namespace) -> int:
    payload: dict[str, Any] = {
        "domain": args.domain,
        "normalize_at": args.normalize_at,
        "widening_threshold": args.widening_threshold,
        "clsh_limit": args.clsh_limit,
        "free_head_call2entry": args.free_head_call2entry,
        "on_unknown": args.on_unknown,
        "max_variants": args.max_variants,
        "verify": args.verify,
    }
    if args.corpus:
        payload["program"] = args.corpus
    else:
        path = Path(args.file)
        if not path.is_file():
            return _fail(f"no such file: {path}", 2)
        payload["source"] = path.read_text()
        payload["name"] = str(path)

    with _client(args.server) as client:
        resp = client.post("/analyze", json=payload)
    if resp.status_code != 200:
        return _fail(_detail(resp), 1)
    body = resp.json()

    if args.report == "json":
        print(json.dumps(body, indent=2))
    else:
        print(render_table(body["report"]), end="")
        if body.get("verify"):
            v = body["verify"]
            print(f"\nverify against {v['twin']}: {'passed' if v['passed'] else 'FAILED'}")
            for check in v["checks"]:
                mark = "ok" if check["passed"] else "FAIL"
                suffix = f"  ({check['detail']})" if check["detail"] else ""
                print(f"  [{mark}] {check['name']}{suffix}")
    if args.verify and not body["verify"]["passed"]:
        return 1
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    payload: dict[str, Any] = {
        "programs": args.programs,
        "domains": args.domains,
        "policies": args.policies,
        "repeats": args.repeats,
    }
    if args.dir:
        root = Path(args.dir)
        if not root.is_dir():
            return _fail(f"no such directory: {root}", 2)
        sources = {p.stem: p.read_text() for p in sorted(root.glob("*.pl"))}
        if not sources:
            return _fail(f"no .pl programs in {root}", 2)
        payload["sources"] = sources

    with _client(args.server) as client:
        resp = client.post("/bench", json=payload)
    if resp.status_code != 200:
        return _fail(_detail(resp), 1)
    body = resp.json()
    if args.report == "json":
        print(json.dumps(body["report"], indent=2))
    else:
        print(body["markdown"], end="")
    return 0


def _cmd_corpus(args: argparse.Namespace) -> int:
    with _client(args.server) as client:
        if args.name:
            resp = client.get(f"/corpus/{args.name}")
            if resp.status_code != 200:
                return _fail(_detail(resp), 1)
            print(resp.json()["source"], end="")
        else:
            resp = client.get("/corpus")
            if resp.status_code != 200:
                return _fail(_detail(resp), 1)
            for name in resp.json()["programs"]:
                print(name)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("cliquesh.api:app", host=args.host, port=args.port)
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "analyze": _cmd_analyze,
        "bench": _cmd_bench,
        "corpus": _cmd_corpus,
        "serve": _cmd_serve,
    }[args.command]
    try:
        return handler(args)
    except httpx.HTTPError as exc:
        return _fail(f"service unreachable: {exc}", 1)


if __name__ == "__main__":
    sys.exit(main())
