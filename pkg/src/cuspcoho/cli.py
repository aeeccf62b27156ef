"""Command-line client for the cuspcoho service.

The CLI never computes anything itself: it loads input files, posts requests
to the FastAPI app (in-process by default, or to --server URL), and formats
the JSON reports as json, text or csv.

Exit codes: 0 success, 1 validation/admissibility/consistency failure,
2 parse or structural input error.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import io
import json
import sys

import httpx

from . import __version__

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARSE = 2


class ClientError(Exception):
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


def _post(server: str | None, path: str, body: dict) -> dict:
    """POST to the service, in-process unless a server URL is given."""
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            response = client.post(path, json=body)
    else:
        from .service.app import create_app

        async def go():
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://cuspcoho.local", timeout=None
            ) as client:
                return await client.post(path, json=body)

        response = asyncio.run(go())
    if response.status_code == 200:
        return response.json()
    try:
        payload = response.json()
    except ValueError:
        payload = {"kind": "internal", "message": response.text}
    kind = payload.get("kind")
    message = payload.get("message") or json.dumps(payload)
    if response.status_code == 422 or kind == "parse":
        raise ClientError(EXIT_PARSE, f"parse error: {message}")
    if kind in ("validation", "inconsistency"):
        raise ClientError(EXIT_VALIDATION, f"{kind} failure: {message}")
    raise ClientError(EXIT_PARSE, f"service error {response.status_code}: {message}")


def _load_representation(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ClientError(EXIT_PARSE, f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ClientError(
            EXIT_PARSE, f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}"
        ) from exc


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _parse_epsilons(raw: str) -> list[float]:
    try:
        values = [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ClientError(EXIT_PARSE, f"bad --epsilon list {raw!r}") from exc
    if not values or any(v <= 0 for v in values):
        raise ClientError(EXIT_PARSE, f"bad --epsilon list {raw!r}")
    return values


def _parse_floats(raw: str, flag: str) -> list[float]:
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ClientError(EXIT_PARSE, f"bad {flag} list {raw!r}") from exc


def _parse_ints(raw: str, flag: str) -> list[int]:
    try:
        return [int(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ClientError(EXIT_PARSE, f"bad {flag} list {raw!r}") from exc


# -- per-command text/csv rendering --------------------------------------------


def _text_validate(payload: dict) -> str:
    lines = [
        f"relation_ok      {payload['relation_ok']}",
        f"invertibility_ok {payload['invertibility_ok']}",
    ]
    for j, flag in enumerate(payload["unipotency_ok"]):
        lines.append(f"unipotent C[{j}]  {flag}")
    lines.append(f"ok               {payload['ok']}")
    return "\n".join(lines) + "\n"


def _text_cohomology(payload: dict) -> str:
    lines = [
        f"h0 = {payload['h0']}  h1 = {payload['h1']}  h2 = {payload['h2']}"
        f"  euler = {payload['euler']}",
        f"h1 (parabolic cocycles) = {payload['h1_parabolic']}"
        f"  consistent = {payload['consistent']}",
    ]
    for cusp in payload["cusps"]:
        lines.append(
            f"cusp {cusp['cusp']}: kernel dim {cusp['kernel_dim']}, "
            f"stalk {tuple(cusp['stalk'])}"
        )
    return "\n".join(lines) + "\n"


def _text_stalks(payload: dict) -> str:
    lines = []
    for cusp in payload["cusps"]:
        lines.append(f"cusp {cusp['cusp']}: ({', '.join(map(str, cusp['stalk']))})")
    return "\n".join(lines) + "\n"


def _csv_from_rows(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(row[c]) if isinstance(row[c], float) else row[c]
                         for c in columns])
    return buf.getvalue()


def _csv_solve(payload: dict) -> str:
    columns = ["r"]
    series = [payload["r"]]
    for n, samples in sorted(payload["modes"].items(), key=lambda kv: int(kv[0])):
        for part in ("f_re", "f_im", "u_re", "u_im"):
            if samples.get(part) is not None:
                kind, comp = part.split("_")
                columns.append(f"{kind}{n}_{comp}")
                series.append(samples[part])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for i in range(len(payload["r"])):
        writer.writerow([repr(col[i]) for col in series])
    return buf.getvalue()


SWEEP_CSV_COLUMNS = ["alpha", "k", "epsilon", "grid_level", "norm_f", "norm_u", "ratio"]


# -- commands -------------------------------------------------------------------


def _run_rep_command(args) -> int:
    doc = _load_representation(args.input)
    body: dict = {"representation": doc}
    path = f"/{args.command}"
    if args.command == "spectral":
        body["render"] = args.format == "text"
    payload = _post(args.server, path, body)
    if args.format == "text":
        if args.command == "validate":
            text = _text_validate(payload)
        elif args.command == "cohomology":
            text = _text_cohomology(payload)
        elif args.command == "stalks":
            text = _text_stalks(payload)
        elif args.command == "spectral":
            text = (payload.get("text") or "") + "\n"
        else:
            text = _json_text(payload)
    else:
        text = _json_text(payload)
    _emit(text, args.out)
    if args.command == "validate" and not payload["ok"]:
        bad = [j for j, flag in enumerate(payload["unipotency_ok"]) if not flag]
        if bad:
            sys.stderr.write(f"non-unipotent cusp matrices at indices {bad}\n")
        return EXIT_VALIDATION
    if args.command == "cohomology" and not payload["consistent"]:
        sys.stderr.write(
            f"h1 routes disagree: euler route {payload['h1']} vs "
            f"parabolic route {payload['h1_parabolic']}\n"
        )
        return EXIT_VALIDATION
    return EXIT_OK


def _run_dbar_solve(args) -> int:
    body = {
        "alpha": args.alpha,
        "k": args.k,
        "A": args.outer_radius,
        "epsilon": float(args.epsilon),
        "grid_level": args.grid_level,
        "profile": args.profile,
        "mode": args.mode,
        "n_max": args.n_max,
        "seed": args.seed,
    }
    payload = _post(args.server, "/dbar/solve", body)
    if args.format == "csv":
        _emit(_csv_solve(payload), args.out)
    elif args.format == "text":
        _emit(
            f"alpha={payload['alpha']} k={payload['k']} A={payload['A']} "
            f"epsilon={payload['epsilon']} grid_level={payload['grid_level']}\n"
            f"norm_f={payload['norm_f']} norm_u={payload['norm_u']} "
            f"residual={payload['residual']}\n",
            args.out,
        )
    else:
        _emit(_json_text(payload), args.out)
    return EXIT_OK


def _run_dbar_sweep(args) -> int:
    body = {
        "alphas": _parse_floats(args.alphas, "--alphas"),
        "ks": _parse_ints(args.ks, "--ks"),
        "A": args.outer_radius,
        "epsilon_ladder": _parse_epsilons(args.epsilon),
        "grid_level": args.grid_level,
        "refinements": args.refinements,
        "samples": args.samples,
        "n_max": args.n_max,
        "seed": args.seed,
        "skip_inadmissible": not args.strict_admissibility,
    }
    payload = _post(args.server, "/dbar/sweep", body)
    if args.format == "csv":
        _emit(_csv_from_rows(payload["rows"], SWEEP_CSV_COLUMNS), args.out)
    elif args.format == "text":
        lines = [
            f"sweep over {len(payload['alphas'])} alphas x {len(payload['ks'])} ks, "
            f"{payload['samples']} samples, seed {payload['seed']}"
        ]
        for row in payload["sup_table"]:
            lines.append(
                f"alpha={row['alpha']} k={row['k']} eps={row['epsilon']} "
                f"level={row['grid_level']} sup_ratio={row['sup_ratio']:.6g}"
            )
        lines.append(f"flagged pairs: {payload['flagged_pairs']}")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(_json_text(payload), args.out)
    return EXIT_VALIDATION if payload["flagged_pairs"] else EXIT_OK


def _run_dbar_obstruction(args) -> int:
    body = {
        "A": args.outer_radius,
        "epsilon_ladder": _parse_epsilons(args.epsilon),
        "grid_level": args.grid_level,
    }
    payload = _post(args.server, "/dbar/obstruction", body)
    if args.format == "csv":
        _emit(
            _csv_from_rows(
                payload["rows"],
                ["epsilon", "norm_f", "norm_u", "norm_u_closed_form"],
            ),
            args.out,
        )
    elif args.format == "text":
        lines = [
            f"growth fit: slope {payload['fitted_slope']:.6g} vs expected "
            f"{payload['expected_slope']:.6g} "
            f"(deviation {payload['relative_deviation']:.2%})",
            f"monotone growth: {payload['monotone']}  "
            f"norm_f drift: {payload['f_drift']:.4f}",
        ]
        for row in payload["rows"]:
            lines.append(
                f"eps={row['epsilon']}: norm_f={row['norm_f']:.6g} "
                f"norm_u={row['norm_u']:.6g}"
            )
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(_json_text(payload), args.out)
    return EXIT_OK


def _run_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuspcoho",
        description="Analyses of unipotent monodromy data over HTTP: weight "
        "filtrations, cusp stalks, global cohomology, spectral certificates "
        "and weighted dbar sweeps.",
    )
    parser.add_argument("--version", action="version", version=__version__)

    def common(sp, formats=("json", "text")):
        sp.add_argument("--format", choices=formats, default="json")
        sp.add_argument("--out", default=None, help="write the report to a file")
        sp.add_argument("--server", default=None,
                        help="base URL of a running service (default: in-process)")

    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("validate", "check the surface relation, invertibility and unipotency"),
        ("log", "nilpotent logarithms of the cusp matrices"),
        ("filtration", "weight filtration report per cusp"),
        ("stalks", "stalk cohomology of the weighted complex per cusp"),
        ("cohomology", "global cohomology dimensions with both h1 routes"),
        ("spectral", "filtered-complex pages and degeneration certificate"),
    ]:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--input", "-i", required=True, help="representation JSON file")
        common(sp)
        sp.set_defaults(func=_run_rep_command)

    dbar = sub.add_parser("dbar", help="weighted dbar solver commands")
    dsub = dbar.add_subparsers(dest="dbar_command", required=True)

    def dbar_numeric(sp):
        sp.add_argument("--outer-radius", type=float, default=0.5,
                        help="outer radius A of the annulus (default 0.5)")
        sp.add_argument("--grid-level", type=int, default=12,
                        help="2^level grid intervals in x = log(1/r)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--n-max", type=int, default=8,
                        help="band limit for random profiles")

    solve = dsub.add_parser("solve", help="solve dbar u = f for one profile")
    solve.add_argument("--alpha", type=float, required=True)
    solve.add_argument("--k", type=int, required=True)
    solve.add_argument("--epsilon", default="1e-6",
                       help="inner truncation radius")
    solve.add_argument("--profile", choices=("const", "obstruction", "random"),
                       default="const")
    solve.add_argument("--mode", type=int, default=1,
                       help="angular mode carrying the const profile")
    dbar_numeric(solve)
    common(solve, formats=("json", "text", "csv"))
    solve.set_defaults(func=_run_dbar_solve)

    sweep = dsub.add_parser("sweep", help="norm-ratio sweep over (alpha, k)")
    sweep.add_argument("--alphas", default="0,0.25,0.5,0.75",
                       help="comma-separated alpha values")
    sweep.add_argument("--ks", default="-3,-2,-1,0,1,2,3",
                       help="comma-separated k values")
    sweep.add_argument("--epsilon", default="1e-2,1e-4,1e-6",
                       help="comma-separated truncation ladder")
    sweep.add_argument("--samples", type=int, default=20)
    sweep.add_argument("--refinements", type=int, default=2)
    sweep.add_argument("--strict-admissibility", action="store_true",
                       help="fail instead of skipping inadmissible pairs")
    dbar_numeric(sweep)
    common(sweep, formats=("json", "text", "csv"))
    sweep.set_defaults(func=_run_dbar_sweep)

    obstruction = dsub.add_parser(
        "obstruction", help="demonstrate the (alpha, k) = (0, 1) growth"
    )
    obstruction.add_argument("--epsilon", default="1e-2,1e-4,1e-6",
                             help="comma-separated truncation ladder")
    dbar_numeric(obstruction)
    common(obstruction, formats=("json", "text", "csv"))
    obstruction.set_defaults(func=_run_dbar_obstruction)

    serve = sub.add_parser("serve", help="run the HTTP service with uvicorn")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_run_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ClientError as exc:
        sys.stderr.write(str(exc) + "\n")
        return exc.exit_code
    except httpx.HTTPError as exc:
        sys.stderr.write(f"cannot reach service: {exc}\n")
        return EXIT_PARSE


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
