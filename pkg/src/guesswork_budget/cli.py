"""CLI entry point for guesswork-budget."""

from __future__ import annotations

import functools
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Optional

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.traceback import install as install_traceback

from . import __version__
from .budget import (
    TABLE1_LENGTHS,
    BudgetComparison,
    compare_moment_exponents,
    compare_rate_functions,
    compare_sources,
    compare_vs_uniform_moments,
    compare_vs_uniform_rate,
    match_sources_to_budget,
)
from .config import RunConfig
from .errors import GuessworkError, ResourceGuardError
from .guesswork import (
    MomentMode,
    build_profile,
    guesswork_moment,
    log_success_probability,
    moment_exponent,
    query_count,
    select_moment_mode,
)
from .output import Column, Table, emit, parse_floats, read_source_file, render_csv, render_json
from .secscan import GridPoint, binary_sec_scan, sample_simplex, scan_simplex
from .source_stats import CategoricalSource, make_source, renyi_entropy, sec_report
from .tilt import family_scan, rate_function, solve_alpha_for_entropy
from .verify import SUITES, Verifier

install_traceback()
console = Console(stderr=True)

EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_GUARD = 3

DEFAULT_ALPHAS = "0,0.25,0.5,1,2,4,8"
DEFAULT_LENGTHS = ",".join(str(n) for n in TABLE1_LENGTHS)


def handle_errors(fn: Callable[..., Any]) -> Callable[..., Any]:
    """Print library errors on the console and exit with the matching code."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except GuessworkError as e:
            console.print(f"[red]Error: {escape(e.message)}[/red]")
            if e.details:
                console.print(f"[yellow]{escape(e.details)}[/yellow]")
            sys.exit(EXIT_GUARD if isinstance(e, ResourceGuardError) else EXIT_INVALID)

    return wrapper


def source_options(fn: Callable[..., Any]) -> Callable[..., Any]:
    fn = click.option(
        "--source-file",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        help="One-line file of whitespace-separated probabilities",
    )(fn)
    return click.option("--probs", "-p", type=str, help="Probabilities, e.g. 0.1,0.2,0.7")(fn)


def output_options(fn: Callable[..., Any]) -> Callable[..., Any]:
    return click.option(
        "--output", "-o", type=click.Path(dir_okay=False, path_type=Path), help="Write to file"
    )(fn)


def load_source(probs: Optional[str], source_file: Optional[Path]) -> CategoricalSource:
    """Build the source from --probs or --source-file (exactly one)."""
    if (probs is None) == (source_file is None):
        raise click.UsageError("Give exactly one of --probs or --source-file")
    weights = parse_floats(probs, "probability") if probs is not None else read_source_file(source_file)
    return make_source(weights)


def source_label(src: CategoricalSource) -> str:
    return ";".join(f"{p:.6g}" for p in src.probs)


def parse_lengths(text: str) -> list[int]:
    """Whole-number string lengths from a list option."""
    values = parse_floats(text, "length")
    fractional = [v for v in values if not v.is_integer()]
    if fractional:
        raise click.BadParameter(
            f"lengths must be whole numbers, got {fractional[0]:g}", param_hint="--lengths"
        )
    return [int(v) for v in values]


def prepare(ctx: click.Context, command: str, output: Optional[Path]) -> RunConfig:
    config: RunConfig = ctx.obj["config"]
    config.command = command
    config.output = output
    return config


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=verbose)],
        force=True,
    )


@click.group()
@click.version_option(version=__version__, prog_name="guesswork-budget")
@click.option("--verbose", is_flag=True, help="Enable verbose logging")
@click.option(
    "--units",
    type=click.Choice(["nats", "bits"]),
    default="nats",
    help="Display units for entropy-valued columns",
)
@click.option(
    "--threads", type=int, envvar="GUESSWORK_THREADS", help="Worker threads for internal parallelism"
)
@click.option("--force-guard", is_flag=True, help="Lift the resource caps (with a warning)")
@click.pass_context
@handle_errors
def cli(
    ctx: click.Context, verbose: bool, units: str, threads: Optional[int], force_guard: bool
) -> None:
    """Guesswork security metrics under entropy and guesswork budgets."""
    configure_logging(verbose)
    ctx.ensure_object(dict)
    ctx.obj["config"] = RunConfig(
        units=units, threads=threads, verbose=verbose, force_guard=force_guard
    )


@cli.command()
@source_options
@output_options
@click.pass_context
@handle_errors
def analyze(
    ctx: click.Context, probs: Optional[str], source_file: Optional[Path], output: Optional[Path]
) -> None:
    """Entropies, varentropy, skewentropy and the SEC of one source."""
    config = prepare(ctx, "analyze", output)
    src = load_source(probs, source_file)
    report = sec_report(src)
    table = Table(
        [
            Column("alphabet_size"),
            Column("H", 1),
            Column("H_half", 1),
            Column("H_min", 1),
            Column("V", 2),
            Column("S", 3),
            Column("margin", 4),
            Column("sec"),
            Column("status"),
        ]
    )
    table.add(
        src.alphabet_size,
        report.shannon,
        renyi_entropy(src, 0.5),
        renyi_entropy(src, math.inf),
        report.varentropy,
        report.skewentropy,
        report.margin,
        report.satisfies_sec,
        report.status,
    )
    emit(render_csv(table, config.units), config.output)


@cli.command(name="tilt-scan")
@source_options
@click.option("--alphas", default=DEFAULT_ALPHAS, show_default=True, help="Tilt orders")
@output_options
@click.pass_context
@handle_errors
def tilt_scan(
    ctx: click.Context,
    probs: Optional[str],
    source_file: Optional[Path],
    alphas: str,
    output: Optional[Path],
) -> None:
    """Members of the tilted family of a source."""
    config = prepare(ctx, "tilt-scan", output)
    src = load_source(probs, source_file)
    points = family_scan(src, parse_floats(alphas, "alpha"), config.threads)
    table = Table(
        [Column("alpha"), Column("member"), Column("H", 1), Column("kl", 1)]
        + [Column(f"p{i + 1}") for i in range(src.alphabet_size)]
    )
    for point in points:
        table.add(point.alpha, point.member, point.entropy, point.kl_to_base, *point.dist.as_tuple())
    emit(render_csv(table, config.units), config.output)


def experiment_sources(
    probs: Optional[str],
    source_file: Optional[Path],
    n: Optional[int],
    table1: bool,
    total_bits: float,
) -> list[tuple[CategoricalSource, int]]:
    if table1:
        if probs is not None or source_file is not None:
            raise click.UsageError("--table1 replaces --probs/--source-file")
        sources = match_sources_to_budget(total_bits * math.log(2.0), TABLE1_LENGTHS)
        return list(zip(sources, TABLE1_LENGTHS))
    if n is None:
        raise click.UsageError("--n is required with an explicit source")
    return [(load_source(probs, source_file), n)]


def experiment_options(fn: Callable[..., Any]) -> Callable[..., Any]:
    fn = click.option(
        "--total-bits", default=9.0, show_default=True, help="Total entropy of the matched binary set, in bits"
    )(fn)
    fn = click.option("--table1", is_flag=True, help="Use the equal-entropy binary sources at the default lengths")(fn)
    fn = click.option("--n", "n", type=int, help="String length")(fn)
    return source_options(fn)


@cli.command()
@experiment_options
@click.option("--rhos", default="1", show_default=True, help="Moment orders")
@click.option(
    "--mode",
    type=click.Choice([m.value for m in MomentMode]),
    help="Moment evaluation (default: exact when available)",
)
@output_options
@click.pass_context
@handle_errors
def moments(
    ctx: click.Context,
    probs: Optional[str],
    source_file: Optional[Path],
    n: Optional[int],
    table1: bool,
    total_bits: float,
    rhos: str,
    mode: Optional[str],
    output: Optional[Path],
) -> None:
    """Guesswork moments E[G^rho] at finite length."""
    config = prepare(ctx, "moments", output)
    orders = parse_floats(rhos, "rho")
    table = Table(
        [
            Column("source"),
            Column("n"),
            Column("H", 1),
            Column("rho"),
            Column("log_moment"),
            Column("moment"),
            Column("exponent"),
            Column("asymptotic_exponent"),
            Column("mode"),
        ]
    )
    for src, length in experiment_sources(probs, source_file, n, table1, total_bits):
        profile = build_profile(src, length, config.guards)
        for rho in orders:
            used = MomentMode(mode) if mode else select_moment_mode(profile, rho, config.guards)
            log_value = guesswork_moment(profile, rho, used, config.guards)
            table.add(
                source_label(src),
                length,
                sec_report(src).shannon,
                rho,
                log_value,
                math.exp(log_value) if log_value < 700 else math.inf,
                log_value / length,
                moment_exponent(src, rho),
                used.value,
            )
    emit(render_csv(table, config.units), config.output)


@cli.command()
@experiment_options
@click.option(
    "--log-budgets", default="3", show_default=True, help="Natural logs of the query count"
)
@output_options
@click.pass_context
@handle_errors
def success(
    ctx: click.Context,
    probs: Optional[str],
    source_file: Optional[Path],
    n: Optional[int],
    table1: bool,
    total_bits: float,
    log_budgets: str,
    output: Optional[Path],
) -> None:
    """Success probability P[G <= N] with N = floor(e^log_budget)."""
    config = prepare(ctx, "success", output)
    budgets = parse_floats(log_budgets, "log-budget")
    table = Table(
        [
            Column("source"),
            Column("n"),
            Column("H", 1),
            Column("log_budget"),
            Column("queries"),
            Column("success"),
            Column("log_success"),
        ]
    )
    for src, length in experiment_sources(probs, source_file, n, table1, total_bits):
        profile = build_profile(src, length, config.guards)
        for log_budget in budgets:
            log_p = log_success_probability(profile, log_budget)
            table.add(
                source_label(src),
                length,
                sec_report(src).shannon,
                log_budget,
                query_count(log_budget),
                math.exp(log_p),
                log_p,
            )
    emit(render_csv(table, config.units), config.output)


@cli.command()
@source_options
@click.option("--gs", required=True, help="Guesswork budgets per character, in nats")
@output_options
@click.pass_context
@handle_errors
def rate(
    ctx: click.Context,
    probs: Optional[str],
    source_file: Optional[Path],
    gs: str,
    output: Optional[Path],
) -> None:
    """Rate function of the success probability."""
    config = prepare(ctx, "rate", output)
    src = load_source(probs, source_file)
    table = Table([Column("g", 1), Column("alpha"), Column("rate", 1)])
    for g in parse_floats(gs, "g"):
        alpha = None if src.is_uniform else solve_alpha_for_entropy(src, g)
        table.add(g, alpha, rate_function(src, g))
    emit(render_csv(table, config.units), config.output)


def comparison_table(comparison: BudgetComparison) -> Table:
    table = Table(
        [
            Column("kind"),
            Column("theta1"),
            Column("theta2"),
            Column("eta"),
            Column("n1"),
            Column("n2_real"),
            Column("n2_rounded"),
            Column("lhs", 1),
            Column("rhs", 1),
            Column("verdict"),
            Column("expected"),
            Column("holds"),
        ]
    )
    table.add(
        comparison.kind,
        source_label(comparison.theta1),
        source_label(comparison.theta2),
        comparison.eta,
        comparison.n1,
        comparison.n2_real,
        comparison.n2_rounded,
        comparison.lhs,
        comparison.rhs,
        comparison.verdict.value,
        comparison.expected.value if comparison.expected else None,
        comparison.holds,
    )
    return table


@cli.command()
@source_options
@click.option("--probs2", type=str, help="Second source for a free-form comparison")
@click.option("--alpha", type=float, help="Tilt order > 1 generating theta2")
@click.option("--vs-uniform", is_flag=True, help="Compare against the uniform source")
@click.option("--rho", type=float, help="Compare moment exponents at this order")
@click.option("--g1", type=float, help="Compare rate functions at this budget")
@click.option("--n1", type=int, default=1, show_default=True, help="Length of the first string")
@output_options
@click.pass_context
@handle_errors
def compare(
    ctx: click.Context,
    probs: Optional[str],
    source_file: Optional[Path],
    probs2: Optional[str],
    alpha: Optional[float],
    vs_uniform: bool,
    rho: Optional[float],
    g1: Optional[float],
    n1: int,
    output: Optional[Path],
) -> None:
    """Budgeted comparison of two sources."""
    config = prepare(ctx, "compare", output)
    if (rho is None) == (g1 is None):
        raise click.UsageError("Give exactly one of --rho or --g1")
    if sum([probs2 is not None, alpha is not None, vs_uniform]) != 1:
        raise click.UsageError("Give exactly one of --probs2, --alpha or --vs-uniform")
    src = load_source(probs, source_file)

    if probs2 is not None:
        other = make_source(parse_floats(probs2, "probability"))
        comparison = compare_sources(src, other, rho=rho, g1=g1, n1=n1)
    elif vs_uniform:
        comparison = (
            compare_vs_uniform_moments(src, rho, n1)
            if rho is not None
            else compare_vs_uniform_rate(src, g1, n1)
        )
    else:
        comparison = (
            compare_moment_exponents(src, alpha, rho, n1)
            if rho is not None
            else compare_rate_functions(src, alpha, g1, n1)
        )
    emit(render_csv(comparison_table(comparison), config.units), config.output)


@cli.command(name="scan-simplex")
@click.option("--resolution", default=100, show_default=True, help="Lattice step 1/resolution")
@click.option("--dimension", default=3, show_default=True, help="Alphabet size")
@click.option("--samples", default=1000, show_default=True, help="Random sources when dimension > 3")
@click.option("--seed", default=0, show_default=True, help="Sampling seed")
@output_options
@click.pass_context
@handle_errors
def scan_simplex_cmd(
    ctx: click.Context,
    resolution: int,
    dimension: int,
    samples: int,
    seed: int,
    output: Optional[Path],
) -> None:
    """SEC labels over the simplex (binary segment, ternary lattice or random draws)."""
    config = prepare(ctx, "scan-simplex", output)
    if dimension == 2:
        points = binary_sec_scan()
    elif dimension == 3:
        points = list(scan_simplex(resolution, dimension, config.guards, config.threads).points)
    else:
        points = [
            GridPoint(src.as_tuple(), sec_report(src))
            for src in sample_simplex(dimension, samples, seed)
        ]
    table = Table(
        [Column(f"theta{i + 1}") for i in range(dimension)]
        + [Column("H", 1), Column("V", 2), Column("S", 3), Column("margin", 4), Column("label")]
    )
    for point in points:
        report = point.report
        table.add(
            *point.coords,
            report.shannon,
            report.varentropy,
            report.skewentropy,
            report.margin,
            point.label.value,
        )
    emit(render_csv(table, config.units), config.output)


@cli.command()
@click.option("--total-bits", default=9.0, show_default=True, help="Total entropy n*H in bits")
@click.option("--lengths", default=DEFAULT_LENGTHS, show_default=True, help="String lengths")
@output_options
@click.pass_context
@handle_errors
def table1(ctx: click.Context, total_bits: float, lengths: str, output: Optional[Path]) -> None:
    """Binary sources with equal total entropy n*H(theta)."""
    config = prepare(ctx, "table1", output)
    ns = parse_lengths(lengths)
    sources = match_sources_to_budget(total_bits * math.log(2.0), ns)
    table = Table([Column("n"), Column("phi"), Column("H", 1), Column("n_H", 1)])
    for n, src in zip(ns, sources):
        h = sec_report(src).shannon
        table.add(n, float(src.probs.min()), h, n * h)
    emit(render_csv(table, config.units), config.output)


@cli.command()
@click.argument("suite", type=click.Choice(list(SUITES) + ["all"]), default="all")
@click.option("--seed", default=0, show_default=True, help="Seed for random sources")
@click.option(
    "--certify-samples",
    default=10_000,
    show_default=True,
    help="Random sources per alphabet size for the near-uniform certificate",
)
@output_options
@click.pass_context
@handle_errors
def verify(
    ctx: click.Context, suite: str, seed: int, certify_samples: int, output: Optional[Path]
) -> None:
    """Run verification suites and emit a JSON pass/fail report."""
    config = prepare(ctx, "verify", output)
    config.fmt = "json"
    verifier = Verifier(
        seed=seed, certify_samples=certify_samples, guards=config.guards, threads=config.threads
    )
    results = verifier.run(suite)
    emit(render_json(r.to_dict() for r in results), config.output)

    failed = verifier.failures
    if failed:
        console.print(f"[red]✗ {len(failed)} of {len(results)} check(s) failed[/red]")
        for result in failed:
            console.print(f"  • {result.suite}/{result.case}")
        sys.exit(EXIT_VERIFY_FAILED)
    console.print(f"[green]✓ All {len(results)} checks passed[/green]")


def main() -> None:
    """Entry point for the CLI."""
    cli(obj={})


if __name__ == "__main__":
    main()
