"""Command-line interface.

Usage:
    gpmemory classify "abel:alpha=0.5"
    gpmemory expand "exp:a=1,b=1"
    gpmemory jet "exp:a=1,b=1" --x 2
    gpmemory simulate "exp:a=1,b=1" --eps 0.05 -o field.csv
    gpmemory invert "exp:a=1,b=1" --x 0.5 --x 1 --t-max 3 -o inv.csv
    gpmemory oracle --a 1 --b 1 --x 1 --t-max 3 -o exact.csv
    gpmemory analyze field.csv --kernel "exp:a=1,b=1" --x 0.5 --x 1 ...
    gpmemory verify --preset telegraph --out-dir results/
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .config import ExperimentConfig, PRESETS, apply_overrides, parse_kernel_spec, run_experiment, run_preset
from .errors import GPMemoryError
from .front_analysis import analyze as analyze_field
from .io import read_field, write_field, write_json, write_long_csv
from .laplace_inversion import InversionParams, Method, invert as invert_field
from .signals import mollify_delta
from .symbol import Finite, classify_speed, front_jet, symbol_expansion
from .telegraph import TelegraphParams, telegraph_mollified
from .timedomain import GENERATORS, Grid, solve

__all__ = ["cli", "main"]


class KernelSpec(click.ParamType):
    name = "kernel-spec"

    def convert(self, value, param, ctx):
        if not isinstance(value, str):
            return value
        try:
            return parse_kernel_spec(value)
        except GPMemoryError as exc:
            self.fail(str(exc), param, ctx)


KERNEL = KernelSpec()


def _echo_json(data):
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def _mollifier_options(f):
    f = click.option("--shape", type=click.Choice(["bump", "gaussian"]), default="bump", show_default=True)(f)
    f = click.option("--eps", type=float, default=0.05, show_default=True, help="Mollifier width.")(f)
    return f


@click.group()
@click.version_option(__version__, prog_name="gpmemory")
def cli():
    """Signaling problem for the heat equation with memory."""


@cli.command()
@click.argument("kernel", type=KERNEL)
def classify(kernel):
    """Report whether KERNEL propagates with finite or infinite speed."""
    speed = classify_speed(kernel)
    if isinstance(speed, Finite):
        _echo_json({"kernel": kernel.spec(), "speed": "finite", "a": speed.a})
    else:
        _echo_json({"kernel": kernel.spec(), "speed": "infinite"})


@cli.command()
@click.argument("kernel", type=KERNEL)
def expand(kernel):
    """Print (a, gamma, d1) of phi(z) = z/a + gamma + d1/z + ..."""
    e = symbol_expansion(kernel)
    _echo_json({"kernel": kernel.spec(), "a": e.a, "gamma": e.gamma, "d1": e.d1})


@cli.command()
@click.argument("kernel", type=KERNEL)
@click.option("--x", "xs", type=float, multiple=True, required=True, help="Position(s); repeatable.")
def jet(kernel, xs):
    """Front time, delta amplitude and Heaviside level at each X."""
    rows = []
    for x in xs:
        j = front_jet(kernel, x)
        rows.append({"x": x, "front_time": j.front_time, "delta_amp": j.delta_amp, "heaviside_coeff": j.heaviside_coeff})
    _echo_json({"kernel": kernel.spec(), "jet": rows})


@cli.command()
@click.argument("kernel", type=KERNEL, required=False)
@_mollifier_options
@click.option("--L", "L", type=float, default=3.6, show_default=True)
@click.option("--nx", type=int, default=720, show_default=True)
@click.option("--T", "T", type=float, default=3.0, show_default=True)
@click.option("--nt", type=int, default=2400, show_default=True)
@click.option("--method", type=click.Choice(["auto", "cq", "product"]), default="auto", show_default=True)
@click.option("--generator", type=click.Choice(sorted(GENERATORS)), default="trapezoidal", show_default=True)
@click.option("--space-order", type=click.Choice(["2", "4"]), default=None, help="Default: 4 for cq, 2 for product.")
@click.option("--x-stride", type=int, default=1, show_default=True)
@click.option("--t-stride", type=int, default=1, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True, help="Field CSV (a .meta.json sidecar is written next to it).")
def simulate(kernel, eps, shape, L, nx, T, nt, method, generator, space_order, x_stride, t_stride, output):
    """Time-domain solution for a mollified delta pulse."""
    if kernel is None:
        raise click.UsageError("missing KERNEL")
    field = solve(
        kernel,
        mollify_delta(eps, shape),
        Grid(L, nx, T, nt),
        method=method,
        generator=generator,
        space_order=None if space_order is None else int(space_order),
    )
    side = write_field(field, output, x_stride, t_stride)
    for w in field.warnings:
        click.echo(f"warning: {w}", err=True)
    click.echo(f"wrote {output} and {side}")


@cli.command()
@click.argument("kernel", type=KERNEL)
@_mollifier_options
@click.option("--x", "xs", type=float, multiple=True, required=True)
@click.option("--t-max", type=float, required=True)
@click.option("--nt", type=int, default=600, show_default=True, help="Number of output times in (0, t-max].")
@click.option("--method", type=click.Choice([m.value for m in Method]), default="talbot", show_default=True)
@click.option("--nodes", type=int, default=24, show_default=True)
@click.option("--tol", type=float, default=1e-8, show_default=True, help="Target relative error.")
@click.option("--no-strict", is_flag=True, help="Return results even if the error target is missed.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
def invert(kernel, eps, shape, xs, t_max, nt, method, nodes, tol, no_strict, output):
    """Numerical Laplace inversion of the signaling solution."""
    times = np.linspace(t_max / nt, t_max, nt)
    params = InversionParams(method=Method(method), nodes=nodes, target_rel_err=tol, strict=not no_strict)
    boundary = mollify_delta(eps, shape)
    cols = []
    errors = {}
    for x in xs:
        res = invert_field(kernel, boundary, x, times, params)
        cols.append(res.values)
        errors[str(x)] = float(np.max(res.error_estimate))
    write_long_csv(output, xs, times, np.column_stack(cols))
    click.echo(json.dumps({"output": output, "max_error_estimate": errors}, sort_keys=True))


@cli.command()
@click.option("--a", type=float, required=True)
@click.option("--b", type=float, required=True)
@_mollifier_options
@click.option("--x", "xs", type=float, multiple=True, required=True)
@click.option("--t-max", type=float, required=True)
@click.option("--nt", type=int, default=600, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
def oracle(a, b, eps, shape, xs, t_max, nt, output):
    """Exact telegraph solution for a mollified pulse (kernel a**2 exp(-b t))."""
    times = np.linspace(0.0, t_max, nt + 1)
    p = TelegraphParams(a, b)
    boundary = mollify_delta(eps, shape)
    values = np.column_stack([telegraph_mollified(p, boundary, x, times) for x in xs])
    write_long_csv(output, xs, times, values)
    click.echo(f"wrote {output}")


@cli.command()
@click.argument("field_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--kernel", type=KERNEL, default=None, help="Kernel, for predictions alongside measurements.")
@click.option("--x", "xs", type=float, multiple=True, required=True)
@click.option("--plateau-x", type=float, multiple=True)
@click.option("--threshold", "thresholds", type=float, multiple=True, default=(1e-2, 1e-3, 1e-4), show_default=True)
@click.option("--plateau-method", type=click.Choice(["extrapolate", "mean"]), default="extrapolate", show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="Report JSON (default: stdout).")
def analyze(field_csv, kernel, xs, plateau_x, thresholds, plateau_method, output):
    """Front velocity, decay rate and plateau from a field CSV."""
    field = read_field(field_csv)
    report = analyze_field(field, xs, kernel, thresholds, list(plateau_x), plateau_method).to_dict()
    if output:
        write_json(output, report)
        click.echo(f"wrote {output}")
    else:
        _echo_json(report)


def _parse_override(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise click.BadParameter(f"expected KEY=VALUE, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


@cli.command()
@click.option("--preset", type=click.Choice(sorted(PRESETS)), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON experiment config.")
@click.option("--set", "overrides", multiple=True, help="Override a config field, e.g. grid.nx=800; repeatable.")
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
def verify(preset, config_path, overrides, out_dir):
    """Run a preset (or config) end to end; exit 0 iff all checks pass."""
    if (preset is None) == (config_path is None):
        raise click.UsageError("give exactly one of --preset or --config")
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    ov = dict(_parse_override(o) for o in overrides)
    if preset:
        result = run_preset(preset, ov, out_dir)
    else:
        raw = json.loads(Path(config_path).read_text())
        result = run_experiment(ExperimentConfig.from_dict(apply_overrides(raw, ov)))
    doc = result.report
    for c in doc["checks"]:
        click.echo(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}: {c['value']}")
    if doc["failures"]:
        click.echo(json.dumps({"failures": doc["failures"]}), err=True)
    sys.exit(result.exit_code)


def main():
    try:
        cli(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.Abort:
        sys.exit(1)
    except GPMemoryError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
