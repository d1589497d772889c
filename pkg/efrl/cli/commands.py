"""The ``efrl`` subcommands."""

from __future__ import annotations

__all__ = ["gen_dns", "train", "evaluate", "compare", "config_dump"]

from pathlib import Path

import click
import cloup
from rich.table import Table

from .. import console, logger
from ..constants import CONTEXT_SETTINGS
from ..utils.file_ops import guarantee_existence, write_csv, write_json
from . import pipeline
from .options import exit_on_errors, resolve_config, run_options, start_run


@cloup.command(context_settings=CONTEXT_SETTINGS)
@run_options
@exit_on_errors
def gen_dns(config_file: Path | None, profile: str | None, **flags) -> None:
    """Run the fine-grid DNS and store its filtered references.

    The window covers what the variant trains on: the first quarter of the run,
    and also the random-start episodes for dd-rand.
    """
    config = resolve_config(config_file, profile, **flags)
    out = start_run(config, "gen-dns", config_file)
    if not config.variant.needs_references:
        logger.info(
            "Variant %(variant)s trains without references; generating them anyway",
            {"variant": config.variant.value},
        )
    store = pipeline.generate_references(config, config.reference_steps)
    store.save(out / "references", progress=config.progress_bar)
    console.print(f"Wrote {len(store)} reference snapshots to {out / 'references'}")


@cloup.command(context_settings=CONTEXT_SETTINGS)
@run_options
@exit_on_errors
def train(config_file: Path | None, profile: str | None, **flags) -> None:
    """Train a filter-radius agent."""
    config = resolve_config(config_file, profile, **flags)
    start_run(config, "train", config_file)
    records = pipeline.run_training(config)
    best = max(records, key=lambda r: r.total_reward)
    console.print(
        f"Trained {len(records)} episodes; best episode reward "
        f"{best.total_reward:.2f} of {config.episode_length}"
    )


@cloup.command("eval", context_settings=CONTEXT_SETTINGS)
@run_options
@cloup.option(
    "--checkpoint",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Agent to evaluate. Defaults to agent.efdq in the run directory.",
)
@exit_on_errors
def evaluate(
    config_file: Path | None,
    profile: str | None,
    checkpoint: Path | None,
    **flags,
) -> None:
    """Evaluate an agent against the unfiltered and Kolmogorov-scale baselines."""
    config = resolve_config(config_file, profile, **flags)
    out = start_run(config, "eval", config_file)
    summary = pipeline.run_evaluation(config, checkpoint or out / "agent.efdq")
    console.print(_summary_table(summary["methods"], config.spectrum_k, title=str(out)))


@cloup.command(context_settings=CONTEXT_SETTINGS)
@cloup.argument(
    "run_dirs",
    nargs=-1,
    required=True,
    type=click.Path(file_okay=False, exists=True, path_type=Path),
)
@cloup.option(
    "-o",
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("."),
    show_default=True,
    help="Where compare.csv and compare.json are written.",
)
@cloup.option(
    "-k",
    "--spectrum-k",
    "spectrum_k",
    type=int,
    multiple=True,
    default=(8, 32),
    show_default=True,
    help="Wavenumber ranges of err_spectrum to tabulate.",
)
@exit_on_errors
def compare(run_dirs: tuple[Path, ...], out: Path, spectrum_k: tuple[int, ...]) -> None:
    """Tabulate the errors of evaluated runs."""
    rows = pipeline.compare_runs(list(run_dirs))
    columns = ["run", "variant", "method", "blown_up", "err_energy"]
    for K in spectrum_k:
        columns += [f"err_spectrum_{K}", f"err_spectrum_abs_{K}"]
    out = guarantee_existence(out)
    write_csv(out / "compare.csv", columns, [[row.get(c) for c in columns] for row in rows])
    write_json(out / "compare.json", {"rows": rows})

    table = Table(title="Errors against the filtered DNS")
    for c in columns:
        table.add_column(c, justify="left" if c in ("run", "variant", "method") else "right")
    for row in rows:
        table.add_row(*(_cell(row.get(c)) for c in columns))
    console.print(table)


@cloup.command("config-dump", context_settings=CONTEXT_SETTINGS)
@run_options
@exit_on_errors
def config_dump(config_file: Path | None, profile: str | None, **flags) -> None:
    """Print the fully resolved configuration."""
    config = resolve_config(config_file, profile, **flags)
    console.print(config.dumps(), markup=False, highlight=False)


def _cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


def _summary_table(methods: dict, spectrum_k: tuple[int, ...], title: str) -> Table:
    table = Table(title=title)
    table.add_column("method")
    table.add_column("blown up", justify="right")
    table.add_column("err_energy", justify="right")
    for K in spectrum_k:
        table.add_column(f"err_spectrum K={K}", justify="right")
    for method, entry in methods.items():
        table.add_row(
            method,
            _cell(entry["blow_up_time"]) if entry["blown_up"] else "no",
            _cell(entry["err_energy"]),
            *(_cell(entry[f"err_spectrum_{K}"]) for K in spectrum_k),
        )
    return table
