"""
Command-line entry point.

    ontic gen pr --out pr.json
    ontic check pr.json no-signaling
    ontic classify table.json
    ontic decompose pr.json --order A,B --out pr_ab.json
    ontic repository pr.json --mode upgraded --seed 7 --out repo.json
    ontic simulate --config experiment.json --seed 1 --out results/
    ontic demo naive-signaling --rounds 100000 --seed 1

Exit codes: 0 success or property holds, 1 property fails, 2 usage or parse error.
"""
import functools
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "src"))

import click
from marshmallow import ValidationError

from config import setup_logger, NORM_TOL, SINGLET_CHSH_ANGLES
from models import Ordering, RepositoryMode, ModeKind
from repositories import FileRepository, OnticRepository
from services import (BehaviorService, AssignmentService, DecompositionService,
                      ExperimentService, DemoService)
from services.demo_service import DEMOS
from utils import OnticError, InvalidConfig, Purpose, keyed_generator


logger = setup_logger(name="CLI")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

GEN_KINDS = ("pr", "tsirelson", "singlet", "noise", "random", "assignment")
CHECKS = ("normalized", "no-signaling", "local-2222", "ordered")
MODES = tuple(kind.value for kind in ModeKind)


def guarded(command):
    """Map library and file-format errors to exit code 2 with a one-line message."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (OnticError, ValidationError) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_USAGE)

    return wrapper


def _parse_angles(text: str):
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise InvalidConfig(f"angles must be four comma-separated numbers, got '{text}'")
    if len(values) != 4:
        raise InvalidConfig(f"angles must be four comma-separated numbers, got '{text}'")
    return values[:2], values[2:]


def _seed_notice(seed):
    if seed is None:
        click.echo("no --seed given, using seed 0")
        return 0
    return seed


def _print_chsh(behavior):
    if behavior.scenario.is_chsh:
        click.echo(f"S = {BehaviorService.chsh_value(behavior):.10g}")


@click.group()
def cli():
    """Time-ordered contextual repositories for Bell scenarios."""


# ── Behaviors ───────────────────────────────────────────

@cli.command()
@click.argument("kind", type=click.Choice(GEN_KINDS))
@click.option("--out", "-o", type=click.Path(dir_okay=False), default=None,
              help="Output behavior file (default <kind>.json)")
@click.option("--angles", default=None,
              help="Singlet angles a0,a1,b0,b1 in radians (default: the CHSH-maximizing set)")
@click.option("--file", "source", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Assignment file for kind 'assignment'")
@click.option("--parties", type=click.IntRange(2, 3), default=2, show_default=True,
              help="Parties for kind 'random'")
@click.option("--seed", type=click.IntRange(min=0), default=None,
              help="Decimal 64-bit seed for kind 'random'")
@guarded
def gen(kind, out, angles, source, parties, seed):
    """Generate a behavior file."""
    store = FileRepository()
    if kind == "pr":
        behavior = BehaviorService.make_pr_box()
    elif kind == "tsirelson":
        behavior = BehaviorService.make_tsirelson()
    elif kind == "singlet":
        angles_a, angles_b = _parse_angles(angles) if angles else SINGLET_CHSH_ANGLES
        behavior = BehaviorService.make_singlet_behavior(angles_a, angles_b)
    elif kind == "noise":
        behavior = BehaviorService.make_uniform_noise()
    elif kind == "random":
        rng = keyed_generator(_seed_notice(seed), Purpose.SAMPLE)
        behavior = BehaviorService.random_no_signaling_behavior(rng, parties)
    else:
        if source is None:
            raise InvalidConfig("kind 'assignment' needs --file")
        behavior = BehaviorService.behavior_from_assignment(store.read_assignment(source))

    out = out or f"{kind}.json"
    store.write_behavior(behavior, out)
    click.echo(f"wrote {out}")
    _print_chsh(behavior)


@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.argument("what", type=click.Choice(CHECKS))
@click.option("--order", default=None, help="Order for 'ordered', e.g. B,A")
@click.option("--tol", type=float, default=NORM_TOL, show_default=True)
@guarded
def check(path, what, order, tol):
    """Check a behavior property; exit 0 when it holds, 1 when it fails."""
    behavior = FileRepository().read_behavior(path)
    validation = BehaviorService.validate(behavior, tol)

    if what == "normalized":
        holds = validation.ok
        detail = (f"worst row deviation {validation.worst_deviation:.3g}, "
                  f"entries in range: {validation.entries_in_range}")
    elif not validation.ok:
        holds, detail = False, "not a valid probability table"
    elif what == "no-signaling":
        report = BehaviorService.is_no_signaling(behavior, tol)
        holds = report.holds
        detail = "" if holds else report.witness.describe()
    elif what == "local-2222":
        holds = DecompositionService.in_local_polytope_2222(behavior, tol)
        label, value = DecompositionService.chsh_witness(behavior)
        detail = f"CHSH {label} = {value:.10g}"
        if not holds and abs(value) <= 2 + tol:
            detail = BehaviorService.is_no_signaling(behavior, tol).witness.describe()
        elif not holds:
            detail += " > 2"
    else:
        if order is None:
            raise InvalidConfig("check 'ordered' needs --order")
        parsed = Ordering.parse(order, behavior.scenario.n_parties)
        holds = DecompositionService.in_ordered_polytope(behavior, parsed, tol)
        detail = "" if holds else f"a party's outputs depend on inputs chosen later than {parsed}"

    click.echo(f"{what}: {'PASS' if holds else 'FAIL'}" + (f" ({detail})" if detail else ""))
    _print_chsh(behavior)
    sys.exit(EXIT_OK if holds else EXIT_FAIL)


# ── Assignments and decompositions ──────────────────────

@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@guarded
def classify(path):
    """Classify a deterministic assignment as Local, Ordered or Cyclic."""
    assignment = FileRepository().read_assignment(path)
    graph = AssignmentService.dependency_graph(assignment)
    result = AssignmentService.classify(assignment)
    click.echo(f"kind: {result.kind.value}")
    click.echo(f"edges: {', '.join(graph.edge_list()) or 'none'}")
    orders = result.describe_orders()
    click.echo(f"compatible orders: {' '.join(orders) or 'none'}"
               + (" (truncated)" if result.truncated else ""))


@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--order", required=True, help="Temporal order, e.g. A,B")
@click.option("--one-way", is_flag=True,
              help="Accept behaviors that are only no-signaling along the order")
@click.option("--filler", type=click.Choice(("point", "uniform")), default="point",
              show_default=True, help="Completion of zero-probability histories")
@click.option("--out", "-o", type=click.Path(dir_okay=False), default=None,
              help="Output decomposition file (default: stdout)")
@guarded
def decompose(path, order, one_way, filler, out):
    """Decompose a behavior into deterministic assignments respecting an order."""
    store = FileRepository()
    behavior = store.read_behavior(path)
    parsed = Ordering.parse(order, behavior.scenario.n_parties)
    decomposition = DecompositionService.decompose_ordered(behavior, parsed, one_way, filler)
    if out is None:
        click.echo(FileRepository.dumps(FileRepository.decomposition_to_dict(decomposition)))
        return
    store.write_decomposition(decomposition, out)
    click.echo(f"wrote {out}: {len(decomposition)} terms along {parsed}")


# ── Repositories and experiments ────────────────────────

@cli.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(MODES), default=ModeKind.UPGRADED.value,
              show_default=True)
@click.option("--order", default=None, help="Fixed order for naive-decomposition")
@click.option("--assignment", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Assignment file for naive-assignment")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Decimal 64-bit seed")
@click.option("--out", "-o", type=click.Path(dir_okay=False), default="repository.json",
              show_default=True)
@guarded
def repository(path, mode, order, assignment, seed, out):
    """Build a repository for a behavior and write its audit dump."""
    seed = _seed_notice(seed)
    store = FileRepository()
    behavior = store.read_behavior(path)
    kind = ModeKind(mode)
    if kind == ModeKind.NAIVE_ASSIGNMENT:
        if assignment is None:
            raise InvalidConfig("naive-assignment mode needs --assignment")
        repo_mode = RepositoryMode.naive_assignment(store.read_assignment(assignment))
    elif kind == ModeKind.NAIVE_DECOMPOSITION:
        if order is None:
            raise InvalidConfig("naive-decomposition mode needs --order")
        repo_mode = RepositoryMode.naive_decomposition(
            Ordering.parse(order, behavior.scenario.n_parties))
    else:
        repo_mode = RepositoryMode.upgraded()
    repo = OnticRepository.build_repository(behavior, repo_mode, seed)
    store.write_repository_dump(repo, out)
    click.echo(f"wrote {out}: {kind.value}, {len(repo.orders)} stored decompositions")


@cli.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Experiment config (JSON)")
@click.option("--seed", type=click.IntRange(min=0), default=None,
              help="Decimal 64-bit seed (overrides the config)")
@click.option("--rounds", type=click.IntRange(min=0), default=None,
              help="Rounds (overrides the config)")
@click.option("--workers", type=click.IntRange(min=1), default=None,
              help="Parallel workers (overrides the config)")
@click.option("--out", "-o", type=click.Path(file_okay=False), default="results",
              show_default=True, help="Directory for logs.jsonl and stats.csv")
@guarded
def simulate(config_path, seed, rounds, workers, out):
    """Run a seeded multi-agent Bell experiment."""
    store = FileRepository()
    config, seed_defaulted = store.read_experiment_config(config_path, seed, rounds, workers)
    if seed_defaulted:
        _seed_notice(None)
    logs, report = ExperimentService.run_experiment(config)
    store.write_logs(logs, os.path.join(out, "logs.jsonl"))
    store.write_stats(report, os.path.join(out, "stats.csv"))

    click.echo(f"rounds: {report.rounds}, completed: {report.completed}, "
               f"violation rate: {report.violations.violation_rate:.6g}")
    if report.insufficient_data:
        click.echo("insufficient data: no completed rounds")
    if report.chsh is not None:
        click.echo(f"S = {report.chsh:.6g} +- {report.chsh_stderr:.3g}")
    for test in report.independence:
        click.echo(f"chi2 {test.lhs} vs {test.rhs}: p = {test.p_value:.4f}"
                   + (" (low power)" if test.low_power else ""))
    click.echo(f"wrote {out}")


@cli.command()
@click.argument("name", type=click.Choice(DEMOS))
@click.option("--rounds", type=click.IntRange(min=0), default=None,
              help="Rounds (default 100000)")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Decimal 64-bit seed")
@guarded
def demo(name, rounds, seed):
    """Run a narrated demonstration and print its tables and statistics."""
    seed = _seed_notice(seed)
    outcome = DemoService.run(name, rounds, seed)
    click.echo(DemoService.render(outcome))


if __name__ == "__main__":
    cli()
