"""Command-line front end.

Runs the analysis engine in-process by default, or forwards requests to a
running service instance when --server is given.  Data goes to stdout (or
--out); diagnostics go to stderr.  Exit codes: 0 success, 1 validation
error, 2 verification failure, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.error
import urllib.request
from pathlib import Path
from typing import Any, Sequence

from .config import ConfigError, ProtocolConfig, config_from_dict
from .keyrate import RateReport
from .simulation import write_transcript
from .sweeps import (
    CSV_COLUMNS,
    report_row,
    run_ghz_compare,
    run_finite,
    run_rate,
    run_simulation,
    run_sweep,
    run_verify,
    sweep_spec_from_dict,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_VERIFY_FAILED = 2
EXIT_RUNTIME = 3


class RemoteError(RuntimeError):
    pass


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[dict[str, Any]]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_format_cell(row[c]) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def rows_to_json(rows: list[dict[str, Any]]) -> str:
    return json.dumps({"columns": list(CSV_COLUMNS), "rows": rows}, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_rows(rows: list[dict[str, Any]], args: argparse.Namespace) -> None:
    text = rows_to_json(rows) if args.format == "json" else rows_to_csv(rows)
    _emit(text, args.out)


def _load_config(args: argparse.Namespace) -> tuple[ProtocolConfig, dict[str, Any]]:
    """Validated config plus the raw dict forwarded in remote mode."""
    data: dict[str, Any] = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON in {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config", "top-level document must be a JSON object")
    if args.preset:
        data["preset"] = args.preset
    if args.seed is not None:
        data["seed"] = args.seed
    return config_from_dict(data), data


def _post(server: str, path: str, payload: dict[str, Any]) -> dict[str, Any]:
    url = server.rstrip("/") + path
    body = json.dumps(payload).encode()
    request = urllib.request.Request(
        url, data=body, headers={"Content-Type": "application/json"}, method="POST"
    )
    try:
        with urllib.request.urlopen(request) as response:
            return json.loads(response.read().decode())
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode(errors="replace")
        raise RemoteError(f"{url} returned {exc.code}: {detail}") from exc
    except urllib.error.URLError as exc:
        raise RemoteError(f"cannot reach {url}: {exc.reason}") from exc


def _report_from_response(payload: dict[str, Any]) -> RateReport:
    return RateReport(
        gain=payload["gain"],
        e_x_total=payload["e_x_total"],
        e_z_marginals=payload["e_z_marginals"],
        rate_per_pulse=payload["rate_per_pulse"],
        key_length=payload["key_length"],
        leak_ec_bits=payload["leak_ec_bits"],
    )


def _cmd_rate(args: argparse.Namespace) -> int:
    config, raw = _load_config(args)
    mode = {"rate": "asymptotic", "finite": "finite"}[args.command]
    if args.server:
        payload = _post(args.server, f"/{'rate' if mode == 'asymptotic' else 'finite'}", {"config": raw})
        report = _report_from_response(payload)
    else:
        report = run_rate(config) if mode == "asymptotic" else run_finite(config)
    _emit_rows([report_row(mode, config, report)], args)
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    config, raw = _load_config(args)
    if args.server:
        payload = _post(args.server, "/compare-ghz", {"config": raw})
        ours = _report_from_response(payload["ours"])
        ghz = _report_from_response(payload["ghz"])
    else:
        ours, ghz = run_ghz_compare(config)
    rows = [report_row("asymptotic", config, ours), report_row("ghz_compare", config, ghz)]
    _emit_rows(rows, args)
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    config, raw = _load_config(args)
    if args.server:
        payload = _post(
            args.server,
            "/simulate",
            {"config": raw, "include_transcript": bool(args.transcript)},
        )
        report = _report_from_response(payload["report"])
        if args.transcript:
            with open(args.transcript, "w") as handle:
                for record in payload["transcript"] or []:
                    handle.write(json.dumps(record, separators=(",", ":")) + "\n")
        _log(f"simulate: decision={payload['decision']} rounds_x={payload['estimates']['rounds_x']}")
    else:
        result = run_simulation(config)
        report = result.report
        if args.transcript:
            with open(args.transcript, "w") as handle:
                write_transcript(handle, result.matched, result.correlated)
        _log(
            f"simulate: decision={result.decision.value} rounds_x={result.estimates.rounds_x}"
            f" rounds_z={result.estimates.rounds_z}"
        )
    _emit_rows([report_row("simulate", config, report)], args)
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    if args.server:
        payload = _post(args.server, "/verify", {"n_min": args.n_min, "n_max": args.n_max})
        passed = payload["passed"]
        reports = payload["reports"]
    else:
        results = run_verify(args.n_min, args.n_max)
        reports = [r.to_dict() for r in results]
        passed = all(r.support_match and r.fidelity >= 1.0 - 1e-10 for r in results)
    _emit(json.dumps({"passed": passed, "reports": reports}, indent=2) + "\n", args.out)
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def _parse_values(text: str) -> list[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("sweep.values", f"range syntax is start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ConfigError("sweep.values", "range step must be > 0")
        values = []
        v = start
        while v <= stop + 1e-9:
            values.append(round(v, 9))
            v += step
        return values
    return [float(p) for p in text.split(",") if p.strip()]


def _sweep_spec_data(args: argparse.Namespace) -> dict[str, Any]:
    if args.spec:
        try:
            data = json.loads(Path(args.spec).read_text())
        except OSError as exc:
            raise ConfigError("sweep", f"cannot read {args.spec}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("sweep", f"invalid JSON in {args.spec}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("sweep", "sweep spec must be a JSON object")
        return data
    if not args.values:
        raise ConfigError("sweep.values", "provide --spec or --values")
    data = {
        "variable": args.variable,
        "values": _parse_values(args.values),
        "modes": [m.strip() for m in args.modes.split(",") if m.strip()],
    }
    if args.n_values:
        data["n_values"] = [int(v) for v in args.n_values.split(",") if v.strip()]
    if args.n_signals_values:
        data["n_signals_values"] = [
            int(float(v)) for v in args.n_signals_values.split(",") if v.strip()
        ]
    return data


def _cmd_sweep(args: argparse.Namespace) -> int:
    config, raw = _load_config(args)
    spec_data = _sweep_spec_data(args)
    if args.server:
        payload = _post(args.server, "/sweep", {"config": raw, "sweep": spec_data})
        rows = payload["rows"]
    else:
        rows = run_sweep(config, sweep_spec_from_dict(spec_data))
    _emit_rows(rows, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairqss",
        description="Key-rate analysis and simulation for entangled-pair secret sharing",
    )
    parser.add_argument("--config", help="JSON config file (defaults apply when omitted)")
    parser.add_argument("--preset", choices=["table1", "maintext"], help="named parameter preset")
    parser.add_argument("--seed", type=int, help="override the RNG seed")
    parser.add_argument("--out", help="write data to this file instead of stdout")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    parser.add_argument("--server", help="base URL of a running service; run remotely")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("rate", help="asymptotic secret key rate")
    sub.add_parser("finite", help="finite-size key length")
    sub.add_parser("compare-ghz", help="compare against direct n-party state distribution")

    sim = sub.add_parser("simulate", help="Monte-Carlo protocol run")
    sim.add_argument("--transcript", help="write matched rounds as JSON lines to this file")

    ver = sub.add_parser("verify", help="state-vector check of the XOR/CNOT correspondence")
    ver.add_argument("--n-min", type=int, default=2)
    ver.add_argument("--n-max", type=int, default=8)

    swp = sub.add_parser("sweep", help="evaluate a parameter sweep")
    swp.add_argument("--spec", help="JSON sweep spec file")
    swp.add_argument("--variable", choices=["distance", "n", "mu", "n_signals"], default="distance")
    swp.add_argument("--values", help="comma list or start:stop:step range")
    swp.add_argument("--modes", default="asymptotic", help="comma list of analysis modes")
    swp.add_argument("--n-values", help="comma list of participant counts (series)")
    swp.add_argument("--n-signals-values", help="comma list of pulse budgets (series)")
    return parser


_HANDLERS = {
    "rate": _cmd_rate,
    "finite": _cmd_rate,
    "compare-ghz": _cmd_compare,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_VALIDATION
    try:
        return _HANDLERS[args.command](args)
    except (ConfigError, ValueError) as exc:
        _log(f"error: {exc}")
        return EXIT_VALIDATION
    except RemoteError as exc:
        _log(f"error: {exc}")
        return EXIT_RUNTIME
    except Exception as exc:  # pragma: no cover - defensive
        _log(f"unexpected error: {exc}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
