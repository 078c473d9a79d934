"""Run-directory report emission: manifest, CSV tables, SVG log-log plots.

CSV output is byte-deterministic for identical run data: RFC-4180 framing
(CRLF line endings), fixed column order, shortest-roundtrip float formatting.
The SVG plots are built directly (no plotting dependency) so they are also
reproducible.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np

from .experiments import ConfigError, SweepResult

__all__ = ["write_run", "emit_report", "write_csv", "svg_loglog"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\r\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(col)) for col in columns) + "\r\n")


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        digest.update(fh.read())
    return digest.hexdigest()


def svg_loglog(path, xs, ys, slope, intercept, title: str, xlabel: str, ylabel: str) -> None:
    """Minimal deterministic log-log scatter with an optional fitted line."""
    pts = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0]
    width, height, margin = 640, 480, 60
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<text x="{width // 2}" y="{height - 12}" text-anchor="middle" '
        f'font-size="13">{xlabel}</text>',
        f'<text x="16" y="{height // 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {height // 2})">{ylabel}</text>',
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="black"/>',
    ]
    if pts:
        lx = [math.log10(p[0]) for p in pts]
        ly = [math.log10(p[1]) for p in pts]
        x0, x1 = min(lx), max(lx)
        y0, y1 = min(ly), max(ly)
        padx = 0.05 * (x1 - x0 or 1.0)
        pady = 0.05 * (y1 - y0 or 1.0)
        x0, x1 = x0 - padx, x1 + padx
        y0, y1 = y0 - pady, y1 + pady

        def to_px(xv, yv):
            px = margin + (xv - x0) / (x1 - x0) * (width - 2 * margin)
            py = height - margin - (yv - y0) / (y1 - y0) * (height - 2 * margin)
            return px, py

        if slope is not None and intercept is not None:
            xa, ya = to_px(x0, slope * x0 + intercept)
            xb, yb = to_px(x1, slope * x1 + intercept)
            parts.append(f'<line x1="{xa:.2f}" y1="{ya:.2f}" x2="{xb:.2f}" y2="{yb:.2f}" '
                         f'stroke="steelblue" stroke-width="1.5"/>')
            parts.append(f'<text x="{width - margin}" y="{margin - 8}" text-anchor="end" '
                         f'font-size="13">slope = {slope:.4f}</text>')
        for xv, yv in zip(lx, ly):
            px, py = to_px(xv, yv)
            parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="4" fill="crimson"/>')
        for xv in sorted({round(v) for v in lx} | {math.floor(x0), math.ceil(x1)}):
            if x0 <= xv <= x1:
                px, _ = to_px(xv, y0)
                parts.append(f'<text x="{px:.2f}" y="{height - margin + 16}" '
                             f'text-anchor="middle" font-size="11">1e{int(xv)}</text>')
        for yv in sorted({round(v) for v in ly} | {math.floor(y0), math.ceil(y1)}):
            if y0 <= yv <= y1:
                _, py = to_px(x0, yv)
                parts.append(f'<text x="{margin - 6}" y="{py:.2f}" text-anchor="end" '
                             f'font-size="11">1e{int(yv)}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))


def write_run(run_dir, result: SweepResult, config_doc: dict) -> Path:
    """Persist the raw run record (run.json) into the run directory."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    doc = {"config": config_doc, "result": result.to_dict()}
    path = run_dir / "run.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True))
    return path


_LOG_AXES = {
    "acl": ("N", "mean_abs_dE_tilde", "corrected-energy increment vs threshold"),
    "fixed_time": ("N", "gap", "smoothed/corrected energy gap vs threshold"),
    "theta": ("theta0", "gap", "gap vs resonance-angle threshold"),
    "strichartz": ("theta", "ratio", "normalized product norm vs angle"),
}


def emit_report(run_dir, force: bool = False) -> list[Path]:
    """Materialize manifest.json, CSV tables, and an SVG plot from run.json.

    Refuses to overwrite existing report files unless ``force``.  A run
    directory without run.json is an error.
    """
    run_dir = Path(run_dir)
    run_path = run_dir / "run.json"
    if not run_path.exists():
        raise ConfigError(f"no run.json in {run_dir}; nothing to report")
    doc = json.loads(run_path.read_text())
    result = doc["result"]
    kind = result["kind"]

    outputs: list[Path] = []
    rows_csv = run_dir / "rows.csv"
    agg_csv = run_dir / "aggregate.csv"
    svg_path = run_dir / "sweep.svg"
    manifest_path = run_dir / "manifest.json"
    for path in (rows_csv, agg_csv, svg_path, manifest_path):
        if path.exists() and not force:
            raise ConfigError(f"{path} exists; pass force to overwrite")

    write_csv(rows_csv, result["columns"], result["rows"])
    outputs.append(rows_csv)

    aggregate = result.get("extra", {}).get("aggregate")
    if aggregate:
        write_csv(agg_csv, list(aggregate[0].keys()), aggregate)
        outputs.append(agg_csv)
    elif kind == "symbol_audit":
        report = result["extra"]["report"]
        summary_rows = [{
            "samples": report["samples"],
            "max_ratio": report["max_ratio"],
            "tilde_ratio_max": report["tilde_ratio_max"],
        }]
        write_csv(agg_csv, ["samples", "max_ratio", "tilde_ratio_max"], summary_rows)
        outputs.append(agg_csv)

    axes = _LOG_AXES.get(kind)
    if axes:
        xcol, ycol, title = axes
        source = aggregate if (kind == "acl" and aggregate) else result["rows"]
        ycol_eff = ycol if source and ycol in source[0] else None
        if ycol_eff:
            xs = [r[xcol] for r in source]
            ys = [r[ycol_eff] for r in source]
            svg_loglog(svg_path, xs, ys, result.get("slope"), result.get("intercept"),
                       title, xcol, ycol_eff)
            outputs.append(svg_path)

    manifest = {
        "kind": kind,
        "config": doc["config"],
        "provenance": result.get("provenance", {}),
        "slope": result.get("slope"),
        "intercept": result.get("intercept"),
        "residual": result.get("residual"),
        "extra": {k: v for k, v in result.get("extra", {}).items() if k != "aggregate"},
        "files": {p.name: _sha256(p) for p in outputs},
        "threads_env": os.environ.get("NLSLAB_THREADS", ""),
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    outputs.append(manifest_path)
    return outputs
