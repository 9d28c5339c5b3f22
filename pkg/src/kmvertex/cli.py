"""kmvertex command line: verify | jacobi | coeffs | report."""
from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import sys
from datetime import datetime, timezone
from importlib import metadata as importlib_metadata
from pathlib import Path

from . import suite
from .config import ConfigError, RunConfig, load
from .report import Report, ReportFormatError, render

VERIFY_TARGETS = {
    "cocycle": suite.cocycle_report,
    "site": suite.site_report,
    "torus": suite.torus_report,
    "sphere": suite.sphere_report,
    "regularization": suite.regularization_report,
    "embedding": suite.embedding_report,
}


def _versions() -> dict:
    out = {"python": platform.python_version()}
    for pkg in ("artifact", "numpy", "scipy", "mpmath", "numba"):
        try:
            out[pkg] = importlib_metadata.version(pkg)
        except importlib_metadata.PackageNotFoundError:
            out[pkg] = "unknown"
    return out


def _metadata(command: str, cfg: RunConfig) -> dict:
    meta = {"command": command, "config": cfg.echo(), "versions": _versions()}
    if cfg.timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return meta


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run configuration")
    g.add_argument("--config", help="flat key = value configuration file")
    g.add_argument("--algebra")
    g.add_argument("--level", type=int)
    g.add_argument("--modes", type=int)
    g.add_argument("--sites", type=int)
    g.add_argument("--lmax", type=int)
    g.add_argument("--grid", type=int, help="sphere quadrature nodes (default lmax + 2)")
    g.add_argument("--window", type=int, help="cocycle window bound")
    g.add_argument("--momentum-window", type=int, dest="momentum_window")
    g.add_argument("--tol", type=float)
    g.add_argument("--sphere-tol", type=float, dest="sphere_tol")
    g.add_argument("--eps", help="comma-separated regulators")
    g.add_argument("--format")
    g.add_argument("--out")
    g.add_argument("--no-timestamp", dest="timestamp", action="store_const", const=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kmvertex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run one verification family")
    v.add_argument("target", choices=sorted(VERIFY_TARGETS))
    _common(v)
    j = sub.add_parser("jacobi", help="antisymmetry and Jacobi scans of the abstract tables")
    j.add_argument("--surface")
    _common(j)
    c = sub.add_parser("coeffs", help="export the sphere triple-coefficient table")
    _common(c)
    r = sub.add_parser("report", help="run every verification family")
    _common(r)
    return parser


_FLAG_KEYS = (
    "algebra", "level", "modes", "sites", "lmax", "grid", "window", "momentum_window",
    "tol", "sphere_tol", "eps", "format", "out", "timestamp", "surface",
)


def _coeff_text(rows, fmt: str, meta: dict) -> str:
    head = ("l1", "m1", "l2", "m2", "l3", "m3", "value")
    if fmt == "json":
        recs = [dict(zip(head, r)) for r in rows]
        return json.dumps({"metadata": meta, "coefficients": recs}, indent=2) + "\n"
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(head)
        for r in rows:
            w.writerow([*r[:6], repr(float(r[6]))])
        return buf.getvalue()
    for r in rows:
        buf.write(" ".join(f"{x:>3d}" for x in r[:6]) + f"  {r[6]: .16g}\n")
    return "  l1  m1  l2  m2  l3  m3  value\n" + buf.getvalue()


def _regularization_text(rows, fmt: str, report: Report) -> str:
    body = render(report, fmt)
    if fmt == "json":
        payload = json.loads(body)
        payload["values"] = rows
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        return body
    head = ("eps", "delta_eps(0)", "coth(eps)", "zeta_assigned")
    cells = [[format(r[k], ".12g") for k in head] for r in rows]
    widths = [max([len(h)] + [len(c[i]) for c in cells]) for i, h in enumerate(head)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths)).rstrip()]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n\n" + body


def run(command: str, cfg: RunConfig, target: str | None = None) -> tuple[str, int]:
    """Execute a subcommand; returns (rendered text, exit code)."""
    name = f"verify {target}" if command == "verify" else command
    meta = _metadata(name, cfg)
    if command == "coeffs":
        return _coeff_text(suite.coefficient_rows(cfg.lmax), cfg.format, meta), 0
    if command == "verify":
        if target not in VERIFY_TARGETS:
            raise ConfigError(f"unknown verify target {target!r}")
        report = VERIFY_TARGETS[target](cfg)
    elif command == "jacobi":
        report = suite.jacobi_report(cfg)
    elif command == "report":
        report = suite.full_report(cfg)
    else:
        raise ConfigError(f"unknown subcommand {command!r}")
    report.metadata = meta
    if target == "regularization":
        return _regularization_text(suite.regularization_rows(cfg), cfg.format, report), report.exit_code
    return render(report, cfg.format), report.exit_code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {k: getattr(args, k, None) for k in _FLAG_KEYS}
    try:
        cfg = load(args.config, flags)
        text, code = run(args.command, cfg, getattr(args, "target", None))
    except (ConfigError, ReportFormatError) as exc:
        print(f"kmvertex: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
