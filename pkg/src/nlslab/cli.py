"""Command-line interface.

Subcommands: simulate, acl-sweep, fixed-time-sweep, theta-sweep, strichartz,
symbol-audit, lambda-eval, report.  Exit codes: 0 success, 2 configuration
error, 3 numerical failure (blowup or unstable quadrature), 4 acceptance
threshold violated in --check mode.  NLSLAB_THREADS caps kernel parallelism.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import __version__
from .experiments import (
    ConfigError,
    ExperimentConfig,
    check_result,
    run_acl_sweep,
    run_fixed_time_sweep,
    run_simulation,
    run_strichartz_sweep,
    run_symbol_audit,
    run_theta0_sweep,
)
from .grid import load_spectrum, save_spectrum, spectrum_from_csv
from .multiplier import IMethodParams, multiplier_value
from .reporting import emit_report, write_csv, write_run
from .solver import BlowupError
from .strichartz import QuadratureError

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CHECK = 4


def _load_config(path: str) -> ExperimentConfig:
    try:
        return ExperimentConfig.from_json(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc


def _finish(result, config: ExperimentConfig, out: str, force: bool, check: bool) -> None:
    write_run(out, result, config.raw)
    files = emit_report(out, force=force)
    for f in files:
        click.echo(f"wrote {f}")
    if result.slope is not None:
        click.echo(f"fitted slope: {result.slope:.4f} (residual {result.residual:.4f})")
    if check:
        checks = check_result(result)
        failed = [c for c in checks if not c[1]]
        for name, ok, detail in checks:
            click.echo(f"check {name}: {'PASS' if ok else 'FAIL'} ({detail})")
        if failed:
            sys.exit(EXIT_CHECK)


def _run_guarded(fn):
    try:
        fn()
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except (BlowupError, QuadratureError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Pseudospectral laboratory for the 2D cubic Schrodinger equation."""


def _sweep_command(name: str, runner, summary: str):
    @main.command(name=name, help=summary)
    @click.option("--config", "config_path", required=True, type=click.Path())
    @click.option("--out", "out_dir", required=True, type=click.Path())
    @click.option("--check", is_flag=True, help="apply acceptance thresholds (exit 4 on failure)")
    @click.option("--force", is_flag=True, help="overwrite existing report files")
    def cmd(config_path: str, out_dir: str, check: bool, force: bool) -> None:
        def body():
            config = _load_config(config_path)
            result = runner(config)
            _finish(result, config, out_dir, force, check)

        _run_guarded(body)

    return cmd


_sweep_command("acl-sweep", run_acl_sweep,
               "Corrected-energy increment over [0, t0] as the threshold N sweeps.")
_sweep_command("fixed-time-sweep", run_fixed_time_sweep,
               "Static smoothed/corrected energy gap as the threshold N sweeps.")
_sweep_command("theta-sweep", run_theta0_sweep,
               "Gap and evolved increment as the resonance-angle threshold sweeps.")
_sweep_command("strichartz", run_strichartz_sweep,
               "Angular-restriction scan of the free-wave product norm.")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--force", is_flag=True)
def simulate(config_path: str, out_dir: str, force: bool) -> None:
    """Integrate one trajectory; stream observables to CSV and checkpoint the end state."""

    def body():
        config = _load_config(config_path)
        result, final_spec = run_simulation(config)
        write_run(out_dir, result, config.raw)
        files = emit_report(out_dir, force=force)
        if config.checkpoint:
            ckpt = Path(out_dir) / "final_spectrum.nls2"
            save_spectrum(ckpt, final_spec)
            files.append(ckpt)
        for f in files:
            click.echo(f"wrote {f}")

    _run_guarded(body)


@main.command(name="symbol-audit")
@click.option("--N", "n_value", default=32.0, show_default=True)
@click.option("--s", "s_value", default=0.6, show_default=True)
@click.option("--theta0", default=None, type=float, help="defaults to 1/N")
@click.option("--samples", default=1_000_000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--stratum", type=click.Choice(["all", "a", "b", "c"]), default="all",
              show_default=True)
@click.option("--out", "out_dir", default="audit_run", show_default=True, type=click.Path())
@click.option("--force", is_flag=True)
@click.option("--check", is_flag=True)
@click.option("--dump-multiplier", "dump_multiplier", type=click.Path(), default=None,
              help="also write the radial multiplier as CSV (r, m)")
def symbol_audit(n_value, s_value, theta0, samples, seed, stratum, out_dir, force,
                 check, dump_multiplier) -> None:
    """Sample the pointwise symbol bounds over stratified zero-sum quadruples."""

    def body():
        doc = {
            "config_version": 1,
            "experiment": "symbol_audit",
            "grid": {"modes_per_axis": 48},
            "imethod": {"s": s_value, "theta0": "one_over_N" if theta0 is None else theta0},
            "audit": {"samples": samples, "seed": seed, "strata": stratum, "N": n_value},
        }
        config = ExperimentConfig.from_dict(doc)
        if dump_multiplier:
            params = IMethodParams(N=n_value, s=s_value, theta0=theta0)
            r = np.logspace(np.log10(n_value / 10.0), np.log10(100.0 * n_value), 1000)
            rows = [{"r": float(rv), "m": float(mv)}
                    for rv, mv in zip(r, multiplier_value(r, params))]
            write_csv(dump_multiplier, ["r", "m"], rows)
            click.echo(f"wrote {dump_multiplier}")
        result = run_symbol_audit(config)
        click.echo(json.dumps(result.extra["report"], indent=2, sort_keys=True))
        _finish(result, config, out_dir, force, check)

    _run_guarded(body)


@main.command(name="lambda-eval")
@click.option("--symbol", type=click.Choice(["sigma4", "sigma4_tilde", "alpha4", "custom-csv"]),
              required=True)
@click.option("--spectrum", "spectrum_path", required=True, type=click.Path())
@click.option("--N", "n_value", default=8.0, show_default=True)
@click.option("--s", "s_value", default=0.6, show_default=True)
@click.option("--theta0", default=None, type=float)
@click.option("--symbol-file", type=click.Path(), default=None,
              help="CSV (k1,k2,re,im) single-frequency multiplier for custom-csv")
@click.option("--dump-tuples", type=click.Path(), default=None,
              help="write the symbol sampled on seeded zero-sum quadruples as CSV")
def lambda_eval(symbol, spectrum_path, n_value, s_value, theta0, symbol_file,
                dump_tuples) -> None:
    """Evaluate a quadrilinear functional on a stored spectrum; print value and timing."""

    def body():
        from .multilinear import eval_lambda4_direct, eval_lambda4_separable, random_sigma_tuples
        from .symbols import (
            alpha4_value,
            sigma4_symbol,
            sigma4_tilde_symbol,
            sigma4_tilde_value,
            sigma4_value,
        )
        from .multilinear import SymbolEvaluator

        try:
            spec = load_spectrum(spectrum_path)
        except FileNotFoundError as exc:
            raise ConfigError(f"spectrum file not found: {spectrum_path}") from exc
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        params = IMethodParams(N=n_value, s=s_value, theta0=theta0)

        t0 = time.time()
        if symbol == "sigma4":
            sym = sigma4_symbol(params)
            value = eval_lambda4_direct(sym, spec)
        elif symbol == "sigma4_tilde":
            sym = sigma4_tilde_symbol(params)
            value = eval_lambda4_direct(sym, spec)
        elif symbol == "alpha4":
            sym = SymbolEvaluator(k=4, fn=lambda *xis: alpha4_value(*xis), name="alpha4")
            value = eval_lambda4_direct(sym, spec)
        else:
            if not symbol_file:
                raise ConfigError("custom-csv requires --symbol-file")
            table = spectrum_from_csv(symbol_file, spec.grid)
            h = spec.grid.frequency_unit
            m = spec.grid.modes_per_axis

            def factor(xi):
                k1 = np.rint(np.asarray(xi)[..., 0] / h).astype(int) % m
                k2 = np.rint(np.asarray(xi)[..., 1] / h).astype(int) % m
                return table.coeffs[k1, k2]

            value = eval_lambda4_separable((factor, factor, factor, factor), spec)
        elapsed = time.time() - t0
        click.echo(f"Lambda_4[{symbol}] = {value!r}")
        click.echo(f"elapsed: {elapsed:.3f} s")

        if dump_tuples:
            rng = np.random.default_rng(0)
            tuples = random_sigma_tuples(4, 1000, rng, scale=2.0 * n_value)
            xis = [tuples[:, j, :] for j in range(4)]
            if symbol == "sigma4":
                vals = sigma4_value(*xis, params=params)
            elif symbol == "sigma4_tilde":
                vals = sigma4_tilde_value(*xis, params=params)
            elif symbol == "alpha4":
                vals = alpha4_value(*xis)
            else:
                vals = np.prod([np.asarray(factor(x)) for x in xis], axis=0)
            rows = []
            for i in range(tuples.shape[0]):
                row = {"value": complex(np.asarray(vals, dtype=complex)[i]).real}
                for j in range(4):
                    row[f"xi{j + 1}_x"] = tuples[i, j, 0]
                    row[f"xi{j + 1}_y"] = tuples[i, j, 1]
                rows.append(row)
            cols = [f"xi{j + 1}_{ax}" for j in range(4) for ax in ("x", "y")] + ["value"]
            write_csv(dump_tuples, cols, rows)
            click.echo(f"wrote {dump_tuples}")

    _run_guarded(body)


@main.command()
@click.argument("run_dir", type=click.Path())
@click.option("--force", is_flag=True)
def report(run_dir: str, force: bool) -> None:
    """Re-emit manifest, CSV tables, and plots from a completed run directory."""

    def body():
        for f in emit_report(run_dir, force=force):
            click.echo(f"wrote {f}")

    _run_guarded(body)


if __name__ == "__main__":
    main()
