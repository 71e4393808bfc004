"""Command-line front end.

Every subcommand is a thin client of the HTTP service: by default requests
run against an in-process instance of the app, and ``--url`` points them at
a live server instead.  Exit codes: 0 ok, 1 usage/error, 2 capacity,
3 matcher disagreement.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

import httpx

from .patterns import dumps_document

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CAPACITY = 2
EXIT_DISAGREEMENT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class ServiceClient:
    """Minimal JSON-over-HTTP client; in-process app unless a URL is given."""

    def __init__(self, url: str | None = None):
        self._url = url
        self._transport = None
        if url is None:
            from .service.app import create_app

            self._transport = httpx.ASGITransport(app=create_app())

    def request(self, method: str, path: str, body: dict | None = None):
        return asyncio.run(self._request(method, path, body))

    async def _request(self, method, path, body):
        base = self._url or "http://nandstpm.local"
        async with httpx.AsyncClient(
            transport=self._transport, base_url=base, timeout=None
        ) as client:
            resp = await client.request(method, path, json=body)
        try:
            payload = resp.json()
        except ValueError:
            payload = {"detail": resp.text}
        return resp.status_code, payload


def _report_error(payload) -> int:
    detail = payload.get("detail")
    if isinstance(detail, dict):
        message = detail.get("message", str(detail))
        code = detail.get("code")
    else:
        message, code = str(detail), None
    print(f"error: {message}", file=sys.stderr)
    return EXIT_CAPACITY if code == "capacity" else EXIT_USAGE


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_text(path: str | None) -> str | None:
    if path is None:
        return None
    try:
        return Path(path).read_text()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _geometry_body(args) -> dict:
    return {"blocks": args.blocks, "dsl": args.dsl, "wl": args.wl, "bl": args.bl}


def _add_geometry_flags(p):
    p.add_argument("--blocks", type=int, default=64)
    p.add_argument("--dsl", type=int, default=3)
    p.add_argument("--wl", type=int, default=32)
    p.add_argument("--bl", type=int, default=13824)


def _add_dataset_flags(p, default_queries: int):
    p.add_argument("-n", "--patterns", type=int, default=500, dest="n")
    p.add_argument("--shapes", default="cross,plus")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--jitter", type=float, default=0.1)
    p.add_argument("--flip", type=float, default=0.02)
    p.add_argument("--queries", type=int, default=default_queries)
    p.add_argument("--query-jitter", type=float, default=0.05)
    p.add_argument("--query-flip", type=float, default=0.01)


def _add_bench_flags(p):
    _add_dataset_flags(p, default_queries=1)
    _add_geometry_flags(p)
    p.add_argument("--matchers", default="nand,brute,lsh")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--delta-t", type=float, default=1e-7)
    p.add_argument("--device-params", metavar="FILE")
    p.add_argument("--perf-params", metavar="FILE")
    p.add_argument("--out", default="bench-out")


def _bench_body(args) -> dict:
    return {
        "n": args.n,
        "grid": args.grid,
        "steps": args.steps,
        "seed": args.seed,
        "p_jitter": args.jitter,
        "p_flip": args.flip,
        "queries": args.queries,
        "query_p_jitter": args.query_jitter,
        "query_p_flip": args.query_flip,
        "geometry": _geometry_body(args),
        "matchers": [m for m in args.matchers.split(",") if m],
        "repeats": args.repeats,
        "warmup": args.warmup,
        "delta_t": args.delta_t,
        "device_params_text": _read_text(args.device_params),
        "perf_params_text": _read_text(args.perf_params),
    }


def cmd_gen(client: ServiceClient, args) -> int:
    body = {
        "n": args.n,
        "shapes": [s for s in args.shapes.split(",") if s],
        "seed": args.seed,
        "grid": args.grid,
        "steps": args.steps,
        "p_jitter": args.jitter,
        "p_flip": args.flip,
        "queries": args.queries,
        "query_p_jitter": args.query_jitter,
        "query_p_flip": args.query_flip,
    }
    status, payload = client.request("POST", "/datasets/generate", body)
    if status != 200:
        return _report_error(payload)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "references.json").write_text(dumps_document(payload["references"]))
    (out / "queries.json").write_text(dumps_document(payload["queries"]))
    print(f"wrote {out / 'references.json'} and {out / 'queries.json'}")
    return EXIT_OK


def cmd_program(client: ServiceClient, args) -> int:
    refs_doc = _read_json(args.refs)
    body = {"geometry": _geometry_body(args), "references": refs_doc}
    status, payload = client.request("POST", "/arrays", body)
    if status != 200:
        return _report_error(payload)
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        status, dump = client.request("GET", f"/arrays/{payload['array_id']}/dump")
        if status != 200:
            return _report_error(dump)
        Path(args.out).write_text(dumps_document(dump))
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_query(client: ServiceClient, args) -> int:
    if bool(args.state) == bool(args.array_id):
        print("error: exactly one of --state/--array-id is required", file=sys.stderr)
        return EXIT_USAGE
    if args.state:
        status, payload = client.request("POST", "/arrays/load", _read_json(args.state))
        if status != 200:
            return _report_error(payload)
        array_id = payload["array_id"]
    else:
        array_id = args.array_id
    queries_doc = _read_json(args.queries)
    entries = queries_doc.get("patterns", [])
    if not 0 <= args.index < len(entries):
        print(
            f"error: query index {args.index} outside 0..{len(entries) - 1}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    body = {
        "pattern": {
            "height": queries_doc["height"],
            "width": queries_doc["width"],
            "steps": queries_doc["steps"],
            "patterns": [entries[args.index]],
        },
        "device_params_text": _read_text(args.device_params),
        "delta_t": args.delta_t,
        "compact_rounds": not args.all_rounds,
        "include_block_hits": args.block_hits,
    }
    status, payload = client.request("POST", f"/arrays/{array_id}/query", body)
    if status != 200:
        return _report_error(payload)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_bench(client: ServiceClient, args) -> int:
    status, payload = client.request("POST", "/bench/run", _bench_body(args))
    if status != 200:
        return _report_error(payload)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(payload["csv"])
    (out / "summary.json").write_text(
        json.dumps(payload["report"], indent=2, sort_keys=True) + "\n"
    )
    print(f"wrote {out / 'results.csv'} and {out / 'summary.json'}")
    ratios = payload["report"].get("ratios", {})
    for name, value in sorted(ratios.items()):
        if value is not None:
            print(f"{name}: {value:.3g}")
    if not payload["agreement_ok"]:
        print("error: matcher disagreement detected", file=sys.stderr)
        return EXIT_DISAGREEMENT
    return EXIT_OK


def cmd_sweep(client: ServiceClient, args) -> int:
    body = _bench_body(args)
    try:
        body["counts"] = [int(c) for c in args.counts.split(",") if c]
    except ValueError:
        print(f"error: bad counts {args.counts!r}", file=sys.stderr)
        return EXIT_USAGE
    status, payload = client.request("POST", "/bench/sweep", body)
    if status != 200:
        return _report_error(payload)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.csv").write_text(payload["csv"])
    (out / "sweep_summary.json").write_text(
        json.dumps(payload["report"], indent=2, sort_keys=True) + "\n"
    )
    print(f"wrote {out / 'sweep.csv'} and {out / 'sweep_summary.json'}")
    for name, value in sorted(payload["checks"].items()):
        print(f"{name}: {value}")
    for count, ratio in payload["report"].get("ratios", {}).get(
        "brute_over_nand_latency", {}
    ).items():
        print(f"brute/modeled latency at {count} patterns: {ratio:.3g}x")
    if not payload["agreement_ok"]:
        print("error: matcher disagreement detected", file=sys.stderr)
        return EXIT_DISAGREEMENT
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="nandstpm", description=__doc__)
    parser.add_argument("--url", help="target a running service instead of in-process")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a reference/query dataset")
    _add_dataset_flags(p, default_queries=20)
    p.add_argument("--out", default="dataset")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("program", help="program references into an array")
    p.add_argument("--refs", required=True, metavar="FILE")
    _add_geometry_flags(p)
    p.add_argument("--out", metavar="FILE", help="write the array dump here")
    p.set_defaults(fn=cmd_program)

    p = sub.add_parser("query", help="run one query against an array")
    p.add_argument("--state", metavar="FILE", help="array dump to load")
    p.add_argument("--array-id", help="existing array on the target service")
    p.add_argument("--queries", required=True, metavar="FILE")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--device-params", metavar="FILE")
    p.add_argument("--delta-t", type=float, default=1e-7)
    p.add_argument("--all-rounds", action="store_true", help="sense every DSL")
    p.add_argument("--block-hits", action="store_true")
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("bench", help="run the full benchmark")
    _add_bench_flags(p)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("sweep", help="latency/energy scaling sweep")
    _add_bench_flags(p)
    p.add_argument("--counts", default="50,100,200,500")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    client = ServiceClient(args.url)
    try:
        return args.fn(client, args)
    except httpx.HTTPError as exc:
        print(f"error: request failed: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
