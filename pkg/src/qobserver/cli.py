"""Batch CLI: a thin client over the qobserver HTTP service.

By default commands run against an in-process instance of the service; pass
--server to target a running deployment instead.  Configs are the JSON
request bodies of the corresponding endpoints, with dotted-path overrides
applied via --set.

Exit codes: 0 ok, 1 property failure, 2 validation error, 3 synthesis
infeasibility.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_PROPERTY_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3

COMMANDS = ("design", "simulate", "synthesize", "verify", "curve")


def fmt(x: float) -> str:
    """Full-precision decimal float for CSV output."""
    return format(float(x), ".17g")


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SystemExit(_fail(f"cannot read config: {exc}", EXIT_VALIDATION))
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemExit(
            _fail(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}", EXIT_VALIDATION)
        )
    if not isinstance(cfg, dict):
        raise SystemExit(_fail(f"{path}: config must be a JSON object", EXIT_VALIDATION))
    return cfg


def apply_override(cfg: dict, dotted: str, raw: str) -> None:
    """Set cfg[a][b]... = parsed value for an 'a.b.c=value' override."""
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    keys = dotted.split(".")
    node = cfg
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise SystemExit(_fail(f"override path {dotted!r} crosses a non-object", EXIT_VALIDATION))
    node[keys[-1]] = value


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def make_client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_design_text(path: Path, rep: dict) -> None:
    lines = [
        "qobserver design report",
        f"  plant C_p           : {rep['plant']['C_p']}",
        f"  observer beta       : {rep['observer']['beta']}",
        f"  omega_o / kappa     : {rep['observer']['omega_o']} / {rep['observer']['kappa']}",
        f"  signal vector e     : {rep['e']}",
        f"  homodyne quadrature : {rep['K']}",
        f"  noise intensity     : {rep['noise_intensity']:.6g}",
        f"  time constant       : {rep['time_constant']:.6g}",
        f"  drift eigenvalues   : {rep['drift_eigenvalues']}",
        f"  all-pass residual   : {rep['allpass_residual']:.3e}",
        f"  realizability pass  : {rep['realizability']['passed']}",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_trajectories_csv(path: Path, trajectories: list[dict]) -> None:
    cols = ("q_p", "p_p", "q_o", "p_o", "yQ", "yP", "z_o")
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("traj_id,t," + ",".join(cols) + "\n")
        for tr in trajectories:
            tid = tr["traj_id"]
            for i, t in enumerate(tr["times"]):
                row = [str(tid), fmt(t)] + [fmt(tr[c][i]) for c in cols]
                fh.write(",".join(row) + "\n")


def write_curve_csv(path: Path, result: dict) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("theta,f\n")
        for th, f in zip(result["theta"], result["f"]):
            fh.write(f"{fmt(th)},{fmt(f)}\n")


def print_verify_table(result: dict) -> None:
    width = max(len(c["name"]) for c in result["checks"])
    for c in result["checks"]:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"  {c['name']:<{width}}  metric={c['metric']:.3e}  tol={c['tolerance']:.1e}  {status}")
    if "tradeoff" in result:
        mono = "PASS" if result["tradeoff"]["monotone"] else "FAIL"
        print(f"  {'noise/convergence tradeoff':<{width}}  {mono}")
    print(f"overall: {'PASS' if result['passed'] else 'FAIL'}")


def _detail(resp) -> str:
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        return resp.text
    if isinstance(detail, list):  # pydantic validation errors
        return "; ".join(
            f"{'.'.join(str(p) for p in item.get('loc', []))}: {item.get('msg', '')}"
            for item in detail
        )
    if isinstance(detail, dict):
        return detail.get("message", json.dumps(detail))
    return str(detail)


def run_command(command: str, cfg: dict, outdir: Path, server: str | None) -> int:
    with make_client(server) as client:
        resp = client.post(f"/{command}", json=cfg)
    if resp.status_code == 409:
        return _fail(f"synthesis infeasible: {_detail(resp)}", EXIT_INFEASIBLE)
    if resp.status_code == 422:
        return _fail(_detail(resp), EXIT_VALIDATION)
    if resp.status_code != 200:
        return _fail(f"service returned {resp.status_code}: {_detail(resp)}", EXIT_VALIDATION)
    result = resp.json()

    outdir.mkdir(parents=True, exist_ok=True)
    if command == "design":
        write_json(outdir / "report.json", result)
        write_design_text(outdir / "report.txt", result)
        print(f"design report written to {outdir}")
    elif command == "simulate":
        trajectories = result.pop("trajectories", None)
        write_json(outdir / "stats.json", result)
        if trajectories is not None:
            write_trajectories_csv(outdir / "trajectories.csv", trajectories)
        print(f"simulation outputs written to {outdir}")
    elif command == "synthesize":
        write_json(outdir / "synthesis.json", result)
        for w in result.get("warnings", []):
            print(f"warning: {w}", file=sys.stderr)
        print(f"synthesis result written to {outdir}")
    elif command == "verify":
        write_json(outdir / "verify.json", result)
        print_verify_table(result)
        if not result["passed"]:
            return EXIT_PROPERTY_FAILURE
    elif command == "curve":
        write_curve_csv(outdir / "curve.csv", result)
        print(f"curve written to {outdir / 'curve.csv'}")
        if not result["strictly_decreasing"]:
            return _fail("f(theta) is not strictly decreasing on the grid",
                         EXIT_PROPERTY_FAILURE)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qobserver",
        description="Design, simulate and synthesize direct-coupled quantum observers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("-i", "--input", required=True, help="JSON config file")
        p.add_argument("-o", "--output", default=".", help="output directory")
        p.add_argument("--set", action="append", default=[], metavar="PATH=VALUE",
                       help="dotted-path config override, e.g. observer.kappa=0.5")
        p.add_argument("--seed", type=int, default=None, help="override the RNG seed")
        p.add_argument("--server", default=None,
                       help="base URL of a running qobserver service (default: in-process)")
    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    cfg = load_config(args.input)
    for item in args.set:
        if "=" not in item:
            return _fail(f"bad --set argument {item!r}, expected PATH=VALUE", EXIT_VALIDATION)
        apply_override(cfg, *item.split("=", 1))
    if args.seed is not None:
        if args.command == "simulate":
            cfg.setdefault("sim", {})["seed"] = args.seed
        else:
            cfg["seed"] = args.seed
    return run_command(args.command, cfg, Path(args.output), args.server)


if __name__ == "__main__":
    sys.exit(main())
