"""Command-line entry point.

Every subcommand is a thin adapter over the library: it loads files, calls
the corresponding library function, and serializes the result. Report-style
commands also render a chart next to the delimited/JSON output (disable with
--no-plot).
"""

from __future__ import annotations

import csv
import io as stdio
import json
import socket
import sys
from pathlib import Path

import click

from . import __version__
from .domain import StateSpace, StateVector, default_space
from .estimation import INFLOW_POLICIES, FitConfig, fit
from .evaluation import backtest as run_backtest
from .forecast import (
    Projection,
    ScenarioError,
    ScenarioSpec,
    apply_scenario,
    compare,
    deltas_to_dicts,
    project,
    projection_to_dict,
    scenario_from_dict,
)
from .io import (
    ModelFormatError,
    SnapshotParseError,
    parse_snapshot_csv,
    read_model,
    space_from_dict,
    write_model,
    write_snapshot_csv,
)
from .synthetic import INFLOW_MODES, SyntheticConfig, generate_synthetic


def _load_model(path: Path):
    if not path.exists():
        raise click.UsageError(f"model file not found: {path}")
    try:
        return read_model(path.read_text(encoding="utf-8"))
    except ModelFormatError as exc:
        raise click.ClickException(f"bad model file {path}: {exc}") from None


def _load_snapshots(path: Path, space: StateSpace):
    if not path.exists():
        raise click.UsageError(f"data file not found: {path}")
    try:
        return parse_snapshot_csv(path.read_text(encoding="utf-8"), space)
    except SnapshotParseError as exc:
        raise click.ClickException(f"bad snapshot file {path}: {exc}") from None


def _load_space(path: Path | None) -> StateSpace:
    if path is None:
        return default_space()
    if not path.exists():
        raise click.UsageError(f"state space file not found: {path}")
    try:
        return space_from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, ModelFormatError) as exc:
        raise click.ClickException(f"bad state space file {path}: {exc}") from None


def _parse_counts(spec: str, space: StateSpace) -> StateVector:
    """Parse 'Freshman=100,Sophomore=50' into a state vector."""
    counts: dict[str, float] = {}
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        label, _, raw = chunk.partition("=")
        if not _:
            raise click.UsageError(f"bad counts entry {chunk!r}: expected STATE=NUMBER")
        try:
            counts[label.strip()] = float(raw)
        except ValueError:
            raise click.UsageError(f"bad counts entry {chunk!r}: {raw!r} is not a number") from None
    try:
        return StateVector.from_mapping(space, counts)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None


def _even_split(total: int, space: StateSpace) -> StateVector:
    base, remainder = divmod(total, space.n_enrolled)
    return StateVector(space, [base + (1 if i < remainder else 0) for i in range(space.n_enrolled)])


@click.group()
@click.version_option(version=__version__, prog_name="cohortflow")
def main() -> None:
    """Cohort projection toolkit: fit, project, explore, backtest."""


@main.command()
@click.option("--model", "model_path", type=Path, required=True, help="Model JSON to simulate from.")
@click.option("--students", type=int, default=None, help="Initial students, split evenly across enrolled states.")
@click.option("--initial", "initial_spec", default=None, help="Initial counts, e.g. 'Freshman=4000,Sophomore=3000'.")
@click.option("--terms", type=int, required=True, help="Number of snapshots to simulate (>= 2).")
@click.option("--seed", type=int, default=0, show_default=True, help="RNG seed; same seed, same output.")
@click.option("--inflow-mode", type=click.Choice(INFLOW_MODES), default="fixed", show_default=True)
@click.option("--out", "out_path", type=Path, required=True, help="Snapshot CSV to write.")
def generate(model_path, students, initial_spec, terms, seed, inflow_mode, out_path) -> None:
    """Write a reproducible synthetic snapshot CSV drawn from a model."""
    model = _load_model(model_path)
    if (students is None) == (initial_spec is None):
        raise click.UsageError("give exactly one of --students or --initial")
    initial = (
        _even_split(students, model.space) if students is not None
        else _parse_counts(initial_spec, model.space)
    )
    try:
        cfg = SyntheticConfig(
            true_model=model, initial_counts=initial, n_terms=terms,
            inflow_mode=inflow_mode, seed=seed,
        )
        snapshots = generate_synthetic(cfg)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    out_path.write_text(write_snapshot_csv(snapshots), encoding="utf-8")
    click.echo(f"wrote {len(snapshots)} terms, {sum(len(s.roster) for s in snapshots)} roster rows -> {out_path}")


@main.command(name="fit")
@click.option("--data", "data_path", type=Path, required=True, help="Snapshot CSV to fit on.")
@click.option("--space", "space_path", type=Path, default=None, help="State space JSON (default: Freshman..StopOut | Graduated, Departed).")
@click.option("--alpha", type=float, default=0.0, show_default=True, help="Laplace smoothing pseudo-count.")
@click.option("--decay", type=float, default=None, help="Exponential pooling decay toward recent pairs (1.0 = uniform).")
@click.option("--weights", "weights_spec", default=None, help="Explicit pooling weights, comma-separated, one per term pair.")
@click.option("--inflow-policy", type=click.Choice(INFLOW_POLICIES), default="mean", show_default=True)
@click.option("--term-type", default=None, help="Only count pairs whose from-term has this type tag (e.g. 'fall').")
@click.option("--out", "out_path", type=Path, required=True, help="Model JSON to write.")
def fit_command(data_path, space_path, alpha, decay, weights_spec, inflow_policy, term_type, out_path) -> None:
    """Estimate a transition model from snapshot data and save it."""
    space = _load_space(space_path)
    snapshots = _load_snapshots(data_path, space)
    weights = None
    if weights_spec is not None:
        try:
            weights = tuple(float(w) for w in weights_spec.split(","))
        except ValueError:
            raise click.UsageError(f"bad --weights {weights_spec!r}: expected comma-separated numbers") from None
    try:
        config = FitConfig(
            alpha=alpha, weights=weights, decay=decay,
            inflow_policy=inflow_policy, term_type=term_type,
        )
        model = fit(snapshots, space, config)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    out_path.write_text(write_model(model), encoding="utf-8")
    meta = dict(model.meta)
    click.echo(f"states: {', '.join(space.states)}")
    click.echo(f"term pairs used: {len(meta['term_pairs'])} ({', '.join('->'.join(p) for p in meta['term_pairs'])})")
    for note in meta["diagnostics"]:
        click.echo(f"note: {note}")
    click.echo(f"wrote model -> {out_path}")


def _projection_csv(baseline: Projection, scenario: Projection | None, deltas) -> str:
    space = baseline.space
    out = stdio.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["series", "step", *space.enrolled, "total", "inflow_total", "outflow_total"])

    def rows(name: str, projection: Projection):
        for point in projection.points:
            writer.writerow([
                name, point.step,
                *(repr(float(x)) for x in point.vector.counts),
                repr(point.vector.total),
                repr(point.flows.inflow_total), repr(point.flows.outflow_total),
            ])

    rows("baseline", baseline)
    if scenario is not None:
        rows("scenario", scenario)
        for delta in deltas:
            writer.writerow([
                "delta", delta.step,
                *(repr(delta.by_state[s]) for s in space.enrolled),
                repr(delta.total), "", "",
            ])
    return out.getvalue()


@main.command(name="project")
@click.option("--model", "model_path", type=Path, required=True, help="Model JSON to project with.")
@click.option("--initial", "initial_spec", default=None, help="Initial counts, e.g. 'Freshman=100,Sophomore=100'.")
@click.option("--data", "data_path", type=Path, default=None, help="Take the initial vector from this CSV's last term.")
@click.option("--horizon", type=int, default=None, help="Terms to project (>= 1).")
@click.option("--scenario", "scenario_path", type=Path, default=None, help="Scenario spec JSON; adds scenario + deltas.")
@click.option("--out", "out_path", type=Path, required=True, help="Output file (.json or .csv).")
@click.option("--plot/--no-plot", default=True, show_default=True, help="Render a chart next to the output.")
def project_command(model_path, initial_spec, data_path, horizon, scenario_path, out_path, plot) -> None:
    """Project headcounts forward, optionally under a what-if scenario."""
    model = _load_model(model_path)

    if (initial_spec is None) == (data_path is None):
        raise click.UsageError("give exactly one of --initial or --data")
    if initial_spec is not None:
        v0 = _parse_counts(initial_spec, model.space)
    else:
        snapshots = _load_snapshots(data_path, model.space)
        if not snapshots:
            raise click.ClickException(f"no snapshots in {data_path}")
        v0 = StateVector.from_roster(model.space, snapshots[-1].roster)

    spec = None
    if scenario_path is not None:
        if not scenario_path.exists():
            raise click.UsageError(f"scenario file not found: {scenario_path}")
        try:
            spec = scenario_from_dict(json.loads(scenario_path.read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise click.ClickException(f"bad scenario file {scenario_path}: {exc}") from None
        except ScenarioError as exc:
            raise click.ClickException(str(exc)) from None
        except ValueError as exc:
            raise click.ClickException(f"bad scenario file {scenario_path}: {exc}") from None

    if horizon is None and spec is not None:
        horizon = spec.horizon
    if horizon is None:
        raise click.UsageError("give --horizon (or a scenario file that sets one)")
    if horizon < 1:
        raise click.UsageError(f"horizon must be >= 1, got {horizon}")

    try:
        baseline = project(v0, model, horizon)
        scenario_projection = None
        deltas = None
        if spec is not None:
            scenario_projection = project(v0, apply_scenario(model, spec), horizon)
            deltas = compare(baseline, scenario_projection)
    except (ScenarioError, ValueError) as exc:
        raise click.ClickException(str(exc)) from None

    if out_path.suffix.lower() == ".csv":
        out_path.write_text(_projection_csv(baseline, scenario_projection, deltas), encoding="utf-8")
    else:
        doc = {
            "baseline": projection_to_dict(baseline),
            "scenario": projection_to_dict(scenario_projection) if scenario_projection else None,
            "deltas": deltas_to_dicts(deltas) if deltas is not None else None,
        }
        out_path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    click.echo(f"wrote projection -> {out_path}")

    if plot:
        from .plots import plot_projection

        figure_path = out_path.with_suffix(".png")
        plot_projection(baseline, figure_path, scenario=scenario_projection)
        click.echo(f"wrote figure -> {figure_path}")


@main.command(name="backtest")
@click.option("--data", "data_path", type=Path, required=True, help="Snapshot CSV covering train and held-out terms.")
@click.option("--space", "space_path", type=Path, default=None, help="State space JSON.")
@click.option("--train-through", type=int, required=True, help="Last term index used for fitting.")
@click.option("--horizon", type=int, required=True, help="Held-out terms to score.")
@click.option("--alpha", type=float, default=0.0, show_default=True)
@click.option("--decay", type=float, default=None)
@click.option("--inflow-policy", type=click.Choice(INFLOW_POLICIES), default="mean", show_default=True)
@click.option("--count-stopout", is_flag=True, default=False, help="Include stopped-out students in totals.")
@click.option("--per-state", is_flag=True, default=False, help="Add a per-state breakdown to the JSON report.")
@click.option("--out", "out_path", type=Path, default=None, help="Report JSON to write (chart lands beside it).")
@click.option("--plot/--no-plot", default=True, show_default=True)
def backtest_command(
    data_path, space_path, train_through, horizon, alpha, decay,
    inflow_policy, count_stopout, per_state, out_path, plot,
) -> None:
    """Fit on terms up to a cutoff and score projections against the rest."""
    space = _load_space(space_path)
    snapshots = _load_snapshots(data_path, space)
    if horizon < 1:
        raise click.UsageError(f"horizon must be >= 1, got {horizon}")
    try:
        config = FitConfig(alpha=alpha, decay=decay, inflow_policy=inflow_policy)
        report = run_backtest(
            snapshots, space, train_through=train_through, horizon=horizon,
            config=config, count_stop_out=count_stopout, per_state=per_state,
        )
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None

    click.echo(report.to_text(), nl=False)
    if out_path is not None:
        out_path.write_text(report.to_json(), encoding="utf-8")
        click.echo(f"wrote report -> {out_path}")
        if plot:
            from .plots import plot_backtest

            figure_path = out_path.with_suffix(".png")
            plot_backtest(report, figure_path)
            click.echo(f"wrote figure -> {figure_path}")


@main.command()
@click.option("--model", "model_path", type=Path, required=True, help="Model JSON to serve.")
@click.option("--port", type=int, default=8080, show_default=True, envvar="COHORTFLOW_PORT",
              help="Listen port (flag beats COHORTFLOW_PORT).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data", "data_path", type=Path, default=None,
              help="Snapshot CSV; its last term becomes the default initial vector.")
@click.option("--initial", "initial_spec", default=None, help="Default initial counts, e.g. 'Freshman=100'.")
@click.option("--default-horizon", type=int, default=8, show_default=True)
@click.option("--assets", "assets_path", type=Path, default=None,
              help="Static UI directory (default: ./frontend/dist when present).")
def serve(model_path, port, host, data_path, initial_spec, default_horizon, assets_path) -> None:
    """Serve the projection API and the scenario-explorer UI."""
    import uvicorn

    from .service import create_app

    model = _load_model(model_path)

    default_initial = None
    if initial_spec is not None:
        default_initial = _parse_counts(initial_spec, model.space)
    elif data_path is not None:
        snapshots = _load_snapshots(data_path, model.space)
        if snapshots:
            default_initial = StateVector.from_roster(model.space, snapshots[-1].roster)

    if assets_path is None:
        candidate = Path("frontend") / "dist"
        if (candidate / "index.html").exists():
            assets_path = candidate
    if assets_path is not None and not assets_path.is_dir():
        raise click.UsageError(f"assets directory not found: {assets_path}")

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError:
        click.echo(f"error: port {port} is busy on {host}", err=True)
        sys.exit(1)
    finally:
        probe.close()

    app = create_app(
        model,
        default_initial=default_initial,
        default_horizon=default_horizon,
        assets_dir=assets_path,
    )
    click.echo(f"serving on http://{host}:{port}" + (f" (ui: {assets_path})" if assets_path else " (api only)"))
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
