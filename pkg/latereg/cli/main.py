"""Main CLI entry point."""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Any, Callable, NoReturn, Optional

import click
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from latereg.api import CommandConfig, LateRegService
from latereg.arith import PolynomialSyntaxError
from latereg.construct import ConstructionError, ExportFormat, HypothesisError
from latereg.freemod import GradedMapError
from latereg.groebner import BudgetExceeded
from latereg.rendering import (
    render_betti,
    render_sequence,
    render_side_by_side,
    render_verdict,
)
from latereg.resolution import BettiTable

console = Console()
err_console = Console(stderr=True)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_HYPOTHESIS = 2
EXIT_USAGE = 3

INPUT_ERRORS = (ValueError, OSError, PolynomialSyntaxError, GradedMapError, ConstructionError)


def configure_logging(verbose: int) -> None:
    """Route library logs to stderr through Rich."""
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False, markup=False)],
        force=True,
    )


def fail(message: str, code: int, hint: Optional[str] = None) -> NoReturn:
    err_console.print(f"[red]Error:[/red] {message}", highlight=False)
    if hint:
        err_console.print(f"[yellow]Hint:[/yellow] {hint}", highlight=False)
    sys.exit(code)


def build_config(**params: Any) -> CommandConfig:
    """Validate command parameters, exiting with the usage code on failure."""
    try:
        return CommandConfig(**{k: v for k, v in params.items() if v is not None})
    except ValidationError as e:
        messages = "; ".join(err["msg"] for err in e.errors())
        fail(messages, EXIT_USAGE)


def emit(text: str, out: Optional[Path]) -> None:
    """Write machine-readable output to --out or stdout."""
    if out is not None:
        out.write_text(text)
        err_console.print(f"[dim]wrote {out}[/dim]", highlight=False)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def run_guarded(action: Callable[[], Any]) -> Any:
    """Map engine exceptions onto exit codes."""
    try:
        return action()
    except HypothesisError as e:
        clauses = ", ".join(f"({c.value})" for c in e.report.failures)
        fail(f"hypothesis {clauses} failed: {e}", EXIT_HYPOTHESIS)
    except BudgetExceeded:
        fail("time budget exhausted", EXIT_MISMATCH, "raise --max-seconds")
    except INPUT_ERRORS as e:
        fail(str(e), EXIT_USAGE)


def show_welcome() -> None:
    """Show welcome message with usage info."""
    from latereg import __version__

    console.print(f"\n[bold cyan]latereg[/bold cyan] v{__version__}", highlight=False)
    console.print(
        "[dim]Ideals whose regularity shows up late in the resolution[/dim]\n"
    )

    console.print("[bold]Quick Start:[/bold]")
    console.print("  [green]latereg pure --n 1 --k 2 --d 1[/green]          Build a pure module")
    console.print("  [green]latereg construct --n 1 --N 2 --k 1 --d 0[/green]")
    console.print("                                           Generators of J_M")
    console.print("  [green]latereg verify --n 1 --N 2 --k 2 --d 1[/green]  Check the prediction\n")

    table = Table(title="Commands", show_header=True, header_style="bold")
    table.add_column("Command", style="cyan")
    table.add_column("Description")
    table.add_row("pure", "Pure module with degree sequence (k, ..., k+n, k+n+1+d)")
    table.add_row("construct", "Generators of J_M for a pure module or a matrix file")
    table.add_row("resolve", "Minimal resolution and Betti table of a matrix cokernel")
    table.add_row("verify", "Predicted against computed degree sequence, regularity, Betti table")
    table.add_row("scan", "Growth of reg J_M in k, as CSV")
    console.print(table)

    console.print("\n[dim]Exit codes: 0 pass, 1 mismatch, 2 hypothesis failure, 3 bad input.[/dim]\n")


class LateRegGroup(click.Group):
    """Command group reporting usage errors with the input-error exit code."""

    def main(self, *args: Any, standalone_mode: bool = True, **kwargs: Any) -> Any:  # type: ignore[override]
        try:
            rv = super().main(*args, standalone_mode=False, **kwargs)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.Abort:
            err_console.print("Aborted!")
            sys.exit(EXIT_MISMATCH)
        if not standalone_mode:
            return rv
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


def shape_options(f: Callable) -> Callable:
    """--n --N --k --d --prime shared by the construction commands."""
    f = click.option("--prime", type=int, help="Characteristic p (default 32003)")(f)
    f = click.option("--d", "d", type=int, help="Jump size d >= 0")(f)
    f = click.option("--k", "k", type=int, help="Generating degree k >= 1")(f)
    f = click.option("--N", "N", type=int, help="Number of y variables")(f)
    f = click.option("--n", "n", type=int, help="Dimension n >= 1 (n+1 x variables)")(f)
    return f


@click.group(cls=LateRegGroup, invoke_without_command=True)
@click.version_option(package_name="latereg")
@click.option("-v", "--verbose", count=True, help="-v for progress, -vv for every S-pair")
@click.pass_context
def cli(ctx: click.Context, verbose: int) -> None:
    """latereg - ideals with large, late regularity.

    Builds pure modules and the ideals J_M, resolves them over F_p and
    checks the predicted degree sequence and regularity.

    \b
    Examples:
        latereg pure --n 1 --k 2 --d 1
        latereg construct --n 1 --N 2 --k 1 --d 0 --format cas
        latereg verify --n 1 --N 3 --k 2 --d 5
        latereg scan --n 1 --N 3 --k 2..6
    """
    configure_logging(verbose)
    if ctx.invoked_subcommand is None:
        show_welcome()


@cli.command()
@click.option("--n", "n", type=int, help="Dimension n >= 1 (n+1 x variables)")
@click.option("--k", "k", type=int, help="Generating degree k >= 1")
@click.option("--d", "d", type=int, help="Jump size d >= 0")
@click.option("--prime", type=int, help="Characteristic p (default 32003)")
@click.option("--format", "fmt", type=str, help="ascii or json")
@click.option("--out", type=click.Path(path_type=Path), help="Write output to a file")
def pure(
    n: Optional[int],
    k: Optional[int],
    d: Optional[int],
    prime: Optional[int],
    fmt: Optional[str],
    out: Optional[Path],
) -> None:
    """Pure module with degree sequence (k, k+1, ..., k+n, k+n+1+d).

    \b
    Examples:
        latereg pure --n 1 --k 2 --d 1
        latereg pure --n 2 --k 1 --d 1 --format json
    """
    config = build_config(subcommand="pure", n=n, k=k, d=d, prime=prime, format=fmt, out=out)
    result = run_guarded(lambda: LateRegService().pure(config))
    if config.format == "json":
        emit(result.model_dump_json(indent=2) + "\n", config.out)
        return
    table = BettiTable.from_model(result.betti)
    text = "\n".join(
        [
            result.presentation.rstrip(),
            "",
            render_betti(table),
            "",
            f"degree sequence: {render_sequence(result.degree_sequence)}",
            f"generators: {result.generator_count}",
            f"pure: {'yes' if result.pure else 'no'}",
        ]
    )
    emit(text + "\n", config.out)


@cli.command()
@shape_options
@click.option("--module", type=click.Path(path_type=Path), help="Matrix file presenting M over R")
@click.option("--format", "fmt", type=str, help="ascii, json or cas")
@click.option("--out", type=click.Path(path_type=Path), help="Write output to a file")
def construct(
    n: Optional[int],
    N: Optional[int],
    k: Optional[int],
    d: Optional[int],
    prime: Optional[int],
    module: Optional[Path],
    fmt: Optional[str],
    out: Optional[Path],
) -> None:
    """Generators of J_M, one polynomial per line.

    \b
    Examples:
        latereg construct --n 1 --N 2 --k 1 --d 0
        latereg construct --n 1 --N 2 --k 2 --d 1 --format cas
        latereg construct --module m.txt --k 2 --N 3
    """
    config = build_config(
        subcommand="construct", n=n, N=N, k=k, d=d, prime=prime,
        module=module, format=fmt, out=out,
    )
    result = run_guarded(lambda: LateRegService().construct(config))
    fmt_map = {"ascii": ExportFormat.TEXT, "json": ExportFormat.JSON, "cas": ExportFormat.CAS}
    for line in result.embedding:
        err_console.print(f"[dim]{line}[/dim]", highlight=False)
    emit(result.export(fmt_map[config.format or "ascii"]), config.out)


@cli.command(name="resolve")
@click.argument("matrix_file", type=click.Path(path_type=Path))
@click.option("--prime", type=int, help="Characteristic p (default 32003)")
@click.option("--strategy", type=str, help="S-pair strategy: degree or fifo")
@click.option("--format", "fmt", type=str, help="ascii or json")
@click.option("--out", type=click.Path(path_type=Path), help="Write output to a file")
def resolve_cmd(
    matrix_file: Path,
    prime: Optional[int],
    strategy: Optional[str],
    fmt: Optional[str],
    out: Optional[Path],
) -> None:
    """Minimal free resolution of the cokernel of a matrix file.

    \b
    Examples:
        latereg resolve m.txt
        latereg resolve m.txt --format json
    """
    config = build_config(
        subcommand="resolve", input=matrix_file, prime=prime, strategy=strategy,
        format=fmt, out=out,
    )
    result = run_guarded(lambda: LateRegService().resolve(config))
    if config.format == "json":
        emit(result.model_dump_json(indent=2) + "\n", config.out)
        return
    table = BettiTable.from_model(result.betti)
    lines = [render_betti(table), "", f"ranks: {render_sequence(result.ranks)}"]
    if result.regularity is not None:
        lines.append(f"regularity: {result.regularity}")
    emit("\n".join(lines) + "\n", config.out)


@cli.command()
@shape_options
@click.option("--module", type=click.Path(path_type=Path), help="Matrix file presenting M over R")
@click.option("--input", "input_file", type=click.Path(path_type=Path),
              help="Generators written by construct")
@click.option("--strategy", type=str, help="S-pair strategy: degree or fifo")
@click.option("--expect-seq", type=str, help='Override the predicted sequence, e.g. "3,5,6,7"')
@click.option("--max-seconds", type=float, help="Time budget (default 30)")
@click.option("--format", "fmt", type=str, help="json (default) or ascii")
@click.option("--out", type=click.Path(path_type=Path), help="Write output to a file")
def verify(
    n: Optional[int],
    N: Optional[int],
    k: Optional[int],
    d: Optional[int],
    prime: Optional[int],
    module: Optional[Path],
    input_file: Optional[Path],
    strategy: Optional[str],
    expect_seq: Optional[str],
    max_seconds: Optional[float],
    fmt: Optional[str],
    out: Optional[Path],
) -> None:
    """Compare the predicted and computed invariants of J_M.

    Prints the certificate as JSON; --format ascii shows the Betti tables
    side by side. Exits 0 when everything agrees, 1 on any mismatch, 2 when the
    hypotheses fail.

    \b
    Examples:
        latereg verify --n 1 --N 2 --k 2 --d 1
        latereg verify --n 1 --N 2 --k 1 --d 0 --format ascii
        latereg construct --n 1 --N 2 --k 1 --d 0 --out j.txt
        latereg verify --n 1 --N 2 --k 1 --d 0 --input j.txt
    """
    config = build_config(
        subcommand="verify", n=n, N=N, k=k, d=d, prime=prime, module=module,
        input=input_file, strategy=strategy, expect_seq=expect_seq,
        max_seconds=max_seconds, format=fmt, out=out,
    )
    cert = run_guarded(lambda: LateRegService().verify(config))
    if config.format == "json":
        emit(cert.model_dump_json(indent=2) + "\n", config.out)
    else:
        lines = [
            f"J_M for n={cert.n} N={cert.N} k={cert.k}"
            + (f" d={cert.d}" if cert.d is not None else f" module {cert.module_hash}")
            + f" over F_{cert.prime}",
            f"embedding: {', '.join(e.image for e in cert.embedding)}",
            "",
            render_side_by_side(cert.predicted_table(), cert.computed_table()),
            "",
            f"degree sequence: predicted {render_sequence(cert.predicted_sequence)}"
            f", computed {render_sequence(cert.computed_sequence)}",
            f"regularity: predicted {cert.predicted_regularity}"
            f", computed {cert.computed_regularity} (reg M = {cert.module_regularity})",
        ]
        lines += [f"check {name}: {'ok' if ok else 'FAILED'}" for name, ok in cert.checks.items()]
        emit("\n".join(lines) + "\n", config.out)
    for problem in cert.mismatches:
        err_console.print(f"[red]mismatch:[/red] {problem}", highlight=False)
    err_console.print(render_verdict(cert.passed), f"[dim]{cert.wall_time:.2f}s[/dim]")
    sys.exit(EXIT_OK if cert.passed else EXIT_MISMATCH)


@cli.command()
@click.option("--n", "n", type=int, help="Dimension n >= 1")
@click.option("--N", "N", type=int, help="Number of y variables")
@click.option("--k", "k_range", type=str, help="Range of k, e.g. 2..6")
@click.option("--prime", type=int, help="Characteristic p (default 32003)")
@click.option("--max-seconds", type=float, help="Budget per computed instance (default 30)")
@click.option("--jobs", type=int, help="Parallel worker processes")
@click.option("--certificates", type=click.Path(path_type=Path),
              help="Directory for one certificate JSON per computed instance")
@click.option("--format", "fmt", type=str, help="csv (ascii) or json")
@click.option("--out", type=click.Path(path_type=Path), help="Write output to a file")
def scan(
    n: Optional[int],
    N: Optional[int],
    k_range: Optional[str],
    prime: Optional[int],
    max_seconds: Optional[float],
    jobs: Optional[int],
    certificates: Optional[Path],
    fmt: Optional[str],
    out: Optional[Path],
) -> None:
    """reg J_M against k with the largest admissible jump d.

    The predicted column is always filled; the computed one only for
    instances that finish within --max-seconds.

    \b
    Examples:
        latereg scan --n 1 --N 3 --k 2..6
        latereg scan --n 1 --N 3 --k 2..4 --max-seconds 60 --jobs 3
    """
    config = build_config(
        subcommand="scan", n=n, N=N, k_range=k_range, prime=prime, max_seconds=max_seconds,
        jobs=jobs, certificates=certificates, format=fmt, out=out,
    )
    result = run_guarded(lambda: LateRegService().scan(config))
    if config.format == "json":
        emit(result.table.to_json(orient="records", indent=2) + "\n", config.out)
    else:
        emit(result.to_csv(), config.out)
    err_console.print(
        f"reg J_M growth: adjusted slope {result.adjusted_slope:.3f} (log-log against k + N/2), "
        f"raw slope {result.raw_slope:.3f} (log-log against k); "
        f"(N-1)/n = {(result.N - 1) / result.n:.3f}",
        highlight=False,
    )
