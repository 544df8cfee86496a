"""Command-line interface.

Exit codes follow the usual convention: 0 success, 1 for "ran fine but
found nothing" (diagnose), 2 for usage errors and anything that kept a
command from even loading its inputs.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .agent import sync as agent_sync
from .engine import forward_chain
from .fuzzy import BeepPattern, diagnose_beep
from .rules import Fact, ParseError, RuleBase, load, save
from .service import ServiceConfig, load_config, serve as run_service

DEFAULT_CONFIG = "kbts.json"


class LoadFailure(click.ClickException):
    """Input files (config or rule-base) could not be read or parsed."""

    exit_code = 2


def read_config(ctx: click.Context) -> ServiceConfig:
    """Resolve the service configuration for this invocation.

    An explicitly passed --config must exist; the default path is only
    used when present, falling back to built-in defaults otherwise.
    """
    path = Path(ctx.obj["config_path"])
    explicit = ctx.obj["config_explicit"]
    if not path.exists():
        if explicit:
            raise LoadFailure(f"config file not found: {path}")
        return ServiceConfig()
    try:
        return load_config(path)
    except ValueError as exc:
        raise LoadFailure(str(exc)) from exc


def load_rulebase(config: ServiceConfig) -> RuleBase:
    try:
        return load(config.rulebase_path)
    except (OSError, ParseError) as exc:
        raise LoadFailure(f"cannot load rule-base: {exc}") from exc


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(),
    default=DEFAULT_CONFIG,
    show_default=True,
    help="Service configuration file (JSON).",
)
@click.pass_context
def main(ctx: click.Context, config_path: str) -> None:
    """PC troubleshooting: rule-base diagnosis, beep codes, knowledge sync."""
    source = ctx.get_parameter_source("config_path")
    ctx.obj = {
        "config_path": config_path,
        "config_explicit": source is not click.core.ParameterSource.DEFAULT,
    }


@main.command()
@click.pass_context
def serve(ctx: click.Context) -> None:
    """Run the HTTP service until interrupted."""
    config = read_config(ctx)
    try:
        run_service(config)
    except (OSError, ParseError, ValueError) as exc:
        raise LoadFailure(f"startup failed: {exc}") from exc


@main.command()
@click.option(
    "--fact",
    "facts",
    multiple=True,
    required=True,
    help="An observed fact; repeat for several.",
)
@click.pass_context
def diagnose(ctx: click.Context, facts: tuple[str, ...]) -> None:
    """Forward-chain over the given facts and print any diagnoses."""
    if any(not f.strip() for f in facts):
        raise click.UsageError("--fact must not be blank")
    rulebase = load_rulebase(read_config(ctx))
    results = forward_chain(
        rulebase, [Fact("answer", fact) for fact in facts]
    )
    for diagnosis in results:
        click.echo(f"{diagnosis.conclusion} -> {diagnosis.solution}")
    if not results:
        ctx.exit(1)


@main.command()
@click.option("--seconds", type=float, required=True, help="Beep tone length.")
@click.option(
    "--repeating", is_flag=True, help="The beeping repeats without end."
)
@click.pass_context
def beep(ctx: click.Context, seconds: float, repeating: bool) -> None:
    """Classify a POST beep pattern and print the diagnosis."""
    if seconds < 0:
        raise click.UsageError("--seconds must be non-negative")
    config = read_config(ctx)
    try:
        membership = config.membership()
    except ValueError as exc:
        raise LoadFailure(f"bad fuzzy breakpoints: {exc}") from exc
    result = diagnose_beep(BeepPattern(seconds, repeating), membership)
    click.echo(f"{result.linguistic.value}: {result.message}")


@main.group()
def rules() -> None:
    """Inspect and exchange the rule-base file."""


@rules.command("list")
@click.pass_context
def rules_list(ctx: click.Context) -> None:
    """Print every rule as an IF | AND | THEN | solution table."""
    rulebase = load_rulebase(read_config(ctx))
    for rule in rulebase:
        click.echo(
            f"[{rule.id}] {rule.condition_a} | {rule.condition_b} | "
            f"{rule.conclusion} | {rule.solution}"
        )


@rules.command("export")
@click.option("--file", "file_path", required=True, type=click.Path())
@click.pass_context
def rules_export(ctx: click.Context, file_path: str) -> None:
    """Write the current rule-base to a file in the canonical format."""
    rulebase = load_rulebase(read_config(ctx))
    save(rulebase, file_path)
    click.echo(f"exported {len(rulebase)} rules to {file_path}")


@rules.command("import")
@click.option("--file", "file_path", required=True, type=click.Path())
@click.pass_context
def rules_import(ctx: click.Context, file_path: str) -> None:
    """Validate a rule file and replace the store with it atomically."""
    config = read_config(ctx)
    try:
        imported = load(file_path)
    except OSError as exc:
        raise LoadFailure(f"cannot read {file_path}: {exc}") from exc
    except ParseError as exc:
        raise click.ClickException(f"invalid rule file: {exc}") from exc
    save(imported, config.rulebase_path)
    click.echo(f"imported {len(imported)} rules into {config.rulebase_path}")


@main.group()
def agent() -> None:
    """Knowledge acquisition from configured web sources."""


@agent.command("sync")
@click.pass_context
def agent_sync_cmd(ctx: click.Context) -> None:
    """Fetch all sources once, add what is new, and report the accounting."""
    config = read_config(ctx)
    if not config.agent.sources:
        raise click.UsageError("no agent sources configured")
    rulebase = load_rulebase(config)
    report = agent_sync(rulebase, config.agent)
    save(rulebase, config.rulebase_path)
    for source in report.sources:
        if source.fetched:
            click.echo(
                f"{source.url}: candidates {source.candidates}, "
                f"added {source.added}, skipped {source.skipped_duplicates}, "
                f"malformed {source.malformed}"
            )
        else:
            click.echo(f"{source.url}: FAILED ({source.error})")
    click.echo(f"added: {report.total_added}")


if __name__ == "__main__":
    sys.exit(main())