"""Command-line interface: `tickwork run|list|validate`.

Exit codes: 0 success, 1 invalid configuration (message names the
offending key), 2 numerical blowup (message names trial and time).
"""

from __future__ import annotations

import json
import sys

import click

from .errors import NumericalBlowupError, TickworkError
from .kernels import backend_name
from .presets import PRESETS, get_preset, preset_names
from .scenario import ConfigError, run_scenario, validate_config


def _load_config(config_path, preset):
    if (config_path is None) == (preset is None):
        raise ConfigError("give exactly one of --config or --preset")
    if preset is not None:
        try:
            return get_preset(preset)
        except KeyError:
            raise ConfigError(
                f"unknown preset {preset!r}; see `tickwork list`") from None
    try:
        with open(config_path) as fh:
            return json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from err


@click.group()
@click.version_option(package_name="tickwork")
def main():
    """Clock-model scenario runner (seeded, reproducible)."""


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON scenario config.")
@click.option("--preset", default=None, help="Built-in scenario name.")
@click.option("--seed", type=int, default=None,
              help="Override run.master_seed.")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Override the output directory.")
@click.option("--trials", type=int, default=None,
              help="Override run.trials.")
def run(config_path, preset, seed, out_dir, trials):
    """Execute a scenario and write its artifacts."""
    try:
        config = _load_config(config_path, preset)
        config.setdefault("run", {})
        if seed is not None:
            config["run"]["master_seed"] = seed
        if trials is not None:
            config["run"]["trials"] = trials
        written = run_scenario(config, out_dir=out_dir)
    except ConfigError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    except NumericalBlowupError as err:
        click.echo(f"error: numerical blowup: {err}", err=True)
        sys.exit(2)
    except TickworkError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    for kind, path in written.items():
        click.echo(f"{kind}: {path}")


@main.command("list")
def list_cmd():
    """List built-in presets."""
    click.echo(f"backend: {backend_name()}")
    width = max(len(n) for n in preset_names())
    for name in preset_names():
        click.echo(f"{name:<{width}}  {PRESETS[name]['description']}")


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--preset", default=None)
def validate(config_path, preset):
    """Validate a config (or preset) without running it."""
    try:
        config = _load_config(config_path, preset)
        resolved = validate_config(config)
    except ConfigError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    click.echo(json.dumps(resolved, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
