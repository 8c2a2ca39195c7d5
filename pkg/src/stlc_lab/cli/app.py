"""
Main CLI application for stlc-lab.

Every experiment is a Typer command that maps onto one library operation.
Artifacts (canonical text, CSV, JSON) go to stdout or ``--output``; status
and logs go to stderr. Exit codes: 0 success, 1 verdict failure, 2 input
error.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import typer
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from ..chrono.expansion import exp_trunc_schedule
from ..chrono.integrator import flow_numeric
from ..chrono.picard import picard_error, picard_fit
from ..chrono.seminorm import SeminormSpec, seminorm
from ..config import ConfigManager, StlcLabConfig, get_config_manager
from ..converters.document import SystemDocument
from ..converters.system_to_text import serialize
from ..converters.text_to_system import TextToSystemConverter, parse_poly
from ..core.errors import BlowUpError, ContactFlowViolation, InputError
from ..core.poly import as_rational, lie_derivative
from ..core.random_systems import perturbed_system
from ..core.system import ControlSystem, Schedule
from ..core.taylor import kth_contact
from ..perturb.contact_flow import contact_flow_identity, random_rational_controls
from ..perturb.experiments import (
    main_theorem_experiment,
    perturb_scaling_experiment,
    perturbation_map,
)
from ..reach.growth import calibrate_growth_constant, growth_rate_test
from ..reach.sampler import sample_reachable
from ..reach.variation import order_scan, variation_check
from ..utils.logging import setup_logging
from .output import ExperimentConfig, emit_csv, emit_json, emit_text

logger = logging.getLogger(__name__)

# Initialize Typer app
app = typer.Typer(
    name="stlc-lab",
    help="Chronological expansions and reachability experiments for polynomial control systems",
    add_completion=False,
    rich_markup_mode="rich",
)

# Status output; artifacts never go through these consoles
console = Console(stderr=True)

# Global state set by the callback
state: Dict[str, Any] = {"manager": None, "config": None}

OUTPUT_OPTION = typer.Option(None, "--output", "-o", help="Write the artifact to this file")
JSON_OPTION = typer.Option(False, "--json", help="Emit a JSON report with the full config echo")
SEED_OPTION = typer.Option(..., "--seed", help="Seed for every random draw (required)")
X0_OPTION = typer.Option(None, "--x0", help="Basepoint as 'a,b,...' (default: file x0 or origin)")


@app.callback()
def main(
    config_file: Optional[Path] = typer.Option(
        None, "--config", help="YAML configuration file (default ~/.stlc-lab/config.yaml)"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show debug logging"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", help="Parallel worker threads"),
) -> None:
    """
    Exact chronological expansions, numerical flows and reachable-set
    experiments for polynomial control systems.
    """
    setup_logging(verbose)
    manager = ConfigManager(config_file)
    try:
        config = manager.load_config()
    except InputError as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(2)
    if jobs is not None:
        config.jobs = jobs
    state["manager"] = manager
    state["config"] = config


def get_config() -> StlcLabConfig:
    config = state.get("config")
    if config is None:
        config = get_config_manager().load_config()
        state["config"] = config
    return config


@contextmanager
def handle_errors() -> Iterator[None]:
    """Map library errors to exit code 2 with a message on stderr."""
    try:
        yield
    except BlowUpError as e:
        console.print(f"[red]Blow-up: {e}[/red]")
        raise typer.Exit(2)
    except (InputError, FileNotFoundError) as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(2)
    except ContactFlowViolation as e:
        console.print(f"[red]Invariant violated: {e}[/red]")
        raise typer.Exit(1)


def verdict(passed: bool, message: str) -> None:
    if passed:
        console.print(f"[green]PASS[/green] {message}")
    else:
        console.print(f"[yellow]FAIL[/yellow] {message}")
        raise typer.Exit(1)


# Argument parsing helpers


def load_system(path: Path) -> ControlSystem:
    return TextToSystemConverter().convert(path)


def parse_numbers(text: str, what: str) -> List[Fraction]:
    try:
        return [as_rational(v) for v in text.split(",") if v.strip()]
    except InputError as e:
        raise InputError(f"Could not read {what} {text!r}: {e}") from e


def parse_floats(text: str, what: str) -> List[float]:
    return [float(v) for v in parse_numbers(text, what)]


def parse_ints(text: str, what: str) -> List[int]:
    values = parse_numbers(text, what)
    if any(v.denominator != 1 for v in values):
        raise InputError(f"{what} must be integers, got {text!r}")
    return [int(v) for v in values]


def parse_controls(text: str) -> List[Tuple[Fraction, ...]]:
    """'(1,0);(0,1)' -> [(1, 0), (0, 1)]."""
    controls = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if not (chunk.startswith("(") and chunk.endswith(")")):
            raise InputError(f"Malformed control {chunk!r}; expected '(u1,...,um)'")
        controls.append(tuple(parse_numbers(chunk[1:-1], "control")))
    if not controls:
        raise InputError("At least one control is required")
    return controls


def basepoint(sys: ControlSystem, x0: Optional[str]) -> Tuple[Fraction, ...]:
    if x0 is None:
        return sys.origin
    point = tuple(parse_numbers(x0, "x0"))
    if len(point) != sys.dim:
        raise InputError(f"x0 has {len(point)} coordinates, system lives on R^{sys.dim}")
    return point


def experiment(
    command: str,
    inputs: Sequence[Path],
    params: Dict[str, Any],
    seed: Optional[int] = None,
    output: Optional[Path] = None,
) -> ExperimentConfig:
    return ExperimentConfig(
        command=command,
        inputs=[str(p) for p in inputs],
        params=params,
        seed=seed,
        settings=get_config().to_dict(),
        output=None if output is None else str(output),
    )


# Commands


@app.command()
def parse(
    file_path: Path = typer.Argument(..., help="System file (.ctrl)"),
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Parse and validate a system file, echoing its canonical form.
    """
    with handle_errors():
        sys = load_system(file_path)
        if as_json:
            doc = SystemDocument.from_system(sys)
            emit_json(experiment("parse", [file_path], {}, output=output), doc.to_dict(), output)
        else:
            emit_text(serialize(sys), output)


@app.command()
def flow(
    file_path: Path = typer.Argument(..., help="System file (.ctrl)"),
    schedule: str = typer.Option(..., "--schedule", "-s", help="Schedule '(u..):s;(u..):s'"),
    x0: Optional[str] = X0_OPTION,
    step: Optional[float] = typer.Option(None, "--step", help="RK4 step (default from config)"),
    trace: bool = typer.Option(False, "--trace", help="Emit the full trajectory as CSV"),
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Integrate a piecewise-constant schedule numerically.
    """
    config = get_config()
    with handle_errors():
        sys = load_system(file_path)
        plan = Schedule.parse(schedule)
        h = step if step is not None else config.integrator.step
        result = flow_numeric(
            sys, plan, basepoint(sys, x0), h, config.integrator.blowup_cap, record=trace
        )
    header = ["t"] + [f"x_{i + 1}" for i in range(sys.dim)]
    if as_json:
        params = {"schedule": plan.to_literal(), "x0": x0, "step": h}
        emit_json(experiment("flow", [file_path], params, output=output), result.to_dict(), output)
    elif trace:
        rows = [[t] + list(state_) for t, state_ in zip(result.times, result.states)]
        emit_csv(header, rows, output)
    else:
        emit_csv(header, [[float(result.times[-1])] + list(result.endpoint)], output)


@app.command()
def chrono(
    file_path: Path = typer.Argument(..., help="System file (.ctrl)"),
    controls: str = typer.Option(..., "--controls", "-u", help="Rational controls '(1,0);(0,1)'"),
    order: int = typer.Option(..., "--order", "-k", help="Truncation order k"),
    x0: Optional[str] = X0_OPTION,
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Print the order-k truncated flow as polynomials in s1..sp.
    """
    with handle_errors():
        sys = load_system(file_path)
        flow_poly = exp_trunc_schedule(sys, parse_controls(controls), order, basepoint(sys, x0))
    if as_json:
        params = {"controls": controls, "k": order, "x0": x0}
        emit_json(experiment("chrono", [file_path], params, output=output), flow_poly.to_dict(), output)
    else:
        lines = [f"x{i + 1} = {text}" for i, text in enumerate(flow_poly.to_text())]
        emit_text("\n".join(lines), output)


@app.command()
def contact(
    file_x: Path = typer.Argument(..., help="System X"),
    file_y: Path = typer.Argument(..., help="System Y"),
    order: int = typer.Option(..., "--order", "-k", help="Contact order k"),
    x0: Optional[str] = X0_OPTION,
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Check whether two systems have kth contact at x0.
    """
    with handle_errors():
        X, Y = load_system(file_x), load_system(file_y)
        result = kth_contact(X, Y, basepoint(X, x0), order)
    if as_json:
        params = {"k": order, "x0": x0}
        emit_json(experiment("contact", [file_x, file_y], params, output=output), result.to_dict(), output)
    else:
        text = "CONTACT" if result else f"NO CONTACT: {result.witness.describe()}"
        emit_text(text, output)
    verdict(bool(result), f"{order}th contact of {X.name} and {Y.name}")


@app.command("contact-flow")
def contact_flow(
    file_x: Path = typer.Argument(..., help="System X"),
    file_y: Path = typer.Argument(..., help="System Y"),
    order: int = typer.Option(..., "--order", "-k", help="Truncation order k"),
    segments: int = typer.Option(2, "--segments", "-p", help="Number of segments"),
    seed: int = SEED_OPTION,
    x0: Optional[str] = X0_OPTION,
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Compare the exact truncated flows of X and Y along seeded rational controls.
    """
    with handle_errors():
        X, Y = load_system(file_x), load_system(file_y)
        controls = random_rational_controls(X.m, segments, seed)
        result = contact_flow_identity(X, Y, basepoint(X, x0), order, controls)
    if as_json:
        params = {"k": order, "segments": segments, "x0": x0}
        config = experiment("contact-flow", [file_x, file_y], params, seed, output)
        emit_json(config, result.to_dict(), output)
    else:
        emit_text(result.describe(), output)
    verdict(result.equal, f"order-{order} flows along {segments} segments")


@app.command("picard-error")
def picard_error_command(
    file_path: Path = typer.Argument(..., help="System file (.ctrl)"),
    schedule: str = typer.Option(..., "--schedule", "-s", help="Schedule '(u..):s;(u..):s'"),
    order: int = typer.Option(..., "--order", "-k", help="Truncation order k"),
    x0: Optional[str] = X0_OPTION,
    step: Optional[float] = typer.Option(None, "--step", help="RK4 step (default from config)"),
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Distance between the numerical flow and the order-k expansion.
    """
    config = get_config()
    with handle_errors():
        sys = load_system(file_path)
        plan = Schedule.parse(schedule)
        error = picard_error(
            sys,
            plan.controls,
            plan.durations,
            basepoint(sys, x0),
            order,
            step if step is not None else config.integrator.step,
            config.integrator.blowup_cap,
        )
    emit_text(repr(error), output)


@app.command("picard-fit")
def picard_fit_command(
    file_path: Path = typer.Argument(..., help="System file (.ctrl)"),
    controls: str = typer.Option(..., "--controls", "-u", help="Rational controls '(1,0);(0,1)'"),
    orders: str = typer.Option("1,2,3,4", "--orders", help="Orders k, comma separated"),
    times: str = typer.Option("0.1,0.05,0.025", "--times", help="Times t, comma separated"),
    x0: Optional[str] = X0_OPTION,
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Fit error ~ t^(k+1) per order and the bound (M t)^(k+1) / (1 - M t) L.
    """
    config = get_config()
    with handle_errors():
        sys = load_system(file_path)
        report = picard_fit(
            sys,
            parse_controls(controls),
            basepoint(sys, x0),
            parse_ints(orders, "orders"),
            parse_floats(times, "times"),
            config.integrator.step,
            config.integrator.blowup_cap,
            config.picard.noise_floor,
            config.picard.slope_tolerance,
        )
    if as_json:
        params = {"controls": controls, "orders": orders, "times": times, "x0": x0}
        emit_json(experiment("picard-fit", [file_path], params, output=output), report.to_dict(), output)
    else:
        emit_csv(["k", "t", "error", "bound"], report.csv_rows(), output)
    for note in report.diagnostics:
        console.print(f"[yellow]{note}[/yellow]")
    if report.degenerate:
        return
    verdict(report.dominates, f"fitted M={report.M:.4g}, L={report.L:.4g}")


@app.command("seminorm")
def seminorm_command(
    file_path: Path = typer.Argument(..., help="System file (.ctrl)"),
    field_index: int = typer.Option(0, "--field", help="Vector field X_i to measure"),
    function: str = typer.Option("x1", "--f", help="Test function f, e.g. 'x1'"),
    box: str = typer.Option("-1:1", "--box", help="Box K as 'lo:hi,lo:hi,...' (one pair per axis)"),
    weights: Optional[str] = typer.Option(None, "--weights", help="Weights a_0,a_1,... (default geometric)"),
    grid: Optional[int] = typer.Option(None, "--grid", help="Grid points per axis"),
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Grid lower bound of the weighted derivative seminorm of X_i f over K.
    """
    config = get_config()
    with handle_errors():
        sys = load_system(file_path)
        if not 0 <= field_index <= sys.m:
            raise InputError(f"Field index must lie in 0..{sys.m}, got {field_index}")
        V = sys.fields[field_index]
        f = parse_poly(function, sys.dim)
        pairs = []
        for chunk in box.split(","):
            lo, sep, hi = chunk.partition(":")
            if not sep:
                raise InputError(f"Malformed box interval {chunk!r}; expected 'lo:hi'")
            pairs.append((as_rational(lo), as_rational(hi)))
        if len(pairs) == 1 and sys.dim > 1:
            pairs = pairs * sys.dim
        points = grid if grid is not None else config.seminorm.grid
        if weights:
            spec = SeminormSpec(tuple(pairs), tuple(parse_numbers(weights, "weights")), points)
        else:
            length = max(lie_derivative(V, f).degree, 0) + 1
            spec = SeminormSpec.geometric(pairs, length, config.seminorm.weight_ratio, points)
        value = seminorm(V, f, spec)
    emit_text(repr(value), output)


@app.command()
def reach(
    file_path: Path = typer.Argument(..., help="System file (.ctrl)"),
    t: float = typer.Option(..., "--t", help="Horizon t"),
    count: Optional[int] = typer.Option(None, "--count", help="Number of schedules"),
    segments: Optional[int] = typer.Option(None, "--segments", "-p", help="Segments per schedule"),
    mode: Optional[str] = typer.Option(None, "--mode", help="bang-bang or uniform"),
    seed: int = SEED_OPTION,
    x0: Optional[str] = X0_OPTION,
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Sample endpoints of random schedules with total duration < t.
    """
    config = get_config()
    with handle_errors():
        sys = load_system(file_path)
        sample = sample_reachable(
            sys,
            basepoint(sys, x0),
            t,
            count if count is not None else config.reach.samples,
            segments if segments is not None else config.reach.segments,
            seed,
            mode=mode if mode is not None else config.reach.mode,
            duration_scale=config.reach.duration_scale,
            step=config.integrator.step,
            blowup_cap=config.integrator.blowup_cap,
            jobs=config.jobs,
        )
    if as_json:
        params = {"t": t, "count": sample.count, "segments": sample.segments, "mode": sample.mode.value}
        emit_json(experiment("reach", [file_path], params, seed, output), sample.to_dict(), output)
    else:
        emit_csv(sample.csv_header(), sample.csv_rows(), output)


def _growth_kwargs(config: StlcLabConfig) -> Dict[str, Any]:
    return {
        "samples": config.reach.samples,
        "mode": config.reach.mode,
        "directions": config.reach.directions,
        "delta": config.reach.delta,
        "threshold": config.reach.coverage_threshold,
        "steer": config.steer_options(),
        "jobs": config.jobs,
    }


@app.command()
def growth(
    file_path: Path = typer.Argument(..., help="System file (.ctrl)"),
    order: int = typer.Option(..., "--N", help="Growth order N"),
    constant: float = typer.Option(..., "--C", help="Growth constant C"),
    times: str = typer.Option("0.5,0.25,0.125", "--times", help="Decreasing times t"),
    horizon: Optional[float] = typer.Option(None, "--T", help="Horizon T bounding every t"),
    seed: int = SEED_OPTION,
    x0: Optional[str] = X0_OPTION,
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Ball-coverage test of the growth rate condition of order N.
    """
    config = get_config()
    with handle_errors():
        sys = load_system(file_path)
        report = growth_rate_test(
            sys,
            basepoint(sys, x0),
            order,
            constant,
            parse_floats(times, "times"),
            seed,
            horizon=horizon,
            **_growth_kwargs(config),
        )
    if as_json:
        params = {"N": order, "C": constant, "times": times, "T": horizon, "x0": x0}
        emit_json(experiment("growth", [file_path], params, seed, output), report.to_dict(), output)
    else:
        emit_csv(["t", "radius", "coverage"], report.csv_rows(), output)
    verdict(report.passed, f"coverage >= {report.threshold} at N={order}, C={constant}")


@app.command()
def variation(
    file_path: Path = typer.Argument(..., help="System file (.ctrl)"),
    direction: str = typer.Option(..., "--direction", "-d", help="Unit vector v as 'a,b,...'"),
    k: int = typer.Option(..., "--k", help="Variation order k"),
    c: Optional[float] = typer.Option(None, "--c", help="Scale c (default from config)"),
    times: str = typer.Option("0.4,0.2,0.1", "--times", help="Times t"),
    seed: int = SEED_OPTION,
    x0: Optional[str] = X0_OPTION,
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Check that x0 + c t^k v is reachable in time < t up to O(t^(k+1)).
    """
    config = get_config()
    scale = c if c is not None else config.variation.scale
    with handle_errors():
        sys = load_system(file_path)
        report = variation_check(
            sys,
            basepoint(sys, x0),
            parse_floats(direction, "direction"),
            k,
            scale,
            parse_floats(times, "times"),
            seed,
            rho=config.variation.rho,
            slope_margin=config.variation.slope_margin,
            floor=config.variation.floor,
            steer=config.steer_options(),
            jobs=config.jobs,
        )
    if as_json:
        params = {"direction": direction, "k": k, "c": scale, "times": times, "x0": x0}
        emit_json(experiment("variation", [file_path], params, seed, output), report.to_dict(), output)
    else:
        emit_csv(["t", "target_dist", "residual"], report.csv_rows(), output)
    verdict(report.passed, f"variation of order {k} along {report.label}: {report.verdict}")


@app.command("order-scan")
def order_scan_command(
    file_path: Path = typer.Argument(..., help="System file (.ctrl)"),
    direction: str = typer.Option(..., "--direction", "-d", help="Unit vector v as 'a,b,...'"),
    k_max: int = typer.Option(..., "--k-max", help="Largest order to try"),
    c: Optional[float] = typer.Option(None, "--c", help="Scale c (default from config)"),
    times: str = typer.Option("0.4,0.2,0.1", "--times", help="Times t"),
    seed: int = SEED_OPTION,
    x0: Optional[str] = X0_OPTION,
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Smallest k <= k_max with a control variation of order k along v.
    """
    config = get_config()
    scale = c if c is not None else config.variation.scale
    with handle_errors():
        sys = load_system(file_path)
        result = order_scan(
            sys,
            basepoint(sys, x0),
            parse_floats(direction, "direction"),
            k_max,
            parse_floats(times, "times"),
            seed,
            c=scale,
            rho=config.variation.rho,
            slope_margin=config.variation.slope_margin,
            floor=config.variation.floor,
            steer=config.steer_options(),
            jobs=config.jobs,
        )
    if as_json:
        params = {"direction": direction, "k_max": k_max, "c": scale, "times": times, "x0": x0}
        emit_json(experiment("order-scan", [file_path], params, seed, output), result.to_dict(), output)
    else:
        found = "none (not found under budget)" if result.order is None else str(result.order)
        emit_text(f"{result.label}: {found}", output)
    verdict(result.order is not None, f"order scan along {result.label} up to k={k_max}")


@app.command("perturb-map")
def perturb_map_command(
    file_x: Path = typer.Argument(..., help="System X"),
    file_y: Path = typer.Argument(..., help="System Y"),
    target: str = typer.Option(..., "--target", help="Target point as 'a,b,...'"),
    t: float = typer.Option(..., "--t", help="Horizon t"),
    seed: int = SEED_OPTION,
    x0: Optional[str] = X0_OPTION,
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Steer X to the target, replay the schedule under Y, report |y - x|.
    """
    config = get_config()
    with handle_errors():
        X, Y = load_system(file_x), load_system(file_y)
        result = perturbation_map(
            X,
            Y,
            basepoint(X, x0),
            parse_floats(target, "target"),
            t,
            seed,
            options=config.steer_options(),
        )
    if as_json:
        params = {"target": target, "t": t, "x0": x0}
        config_echo = experiment("perturb-map", [file_x, file_y], params, seed, output)
        emit_json(config_echo, result.to_dict(), output)
    else:
        header = ["steer_residual", "replay_dist", "schedule"]
        emit_csv(header, [[result.steer_residual, result.distance, result.schedule.to_literal()]], output)


@app.command("perturb-system")
def perturb_system_command(
    file_path: Path = typer.Argument(..., help="System file (.ctrl)"),
    order: int = typer.Option(..., "--N", help="Contact order N the result keeps with the input"),
    seed: int = SEED_OPTION,
    x0: Optional[str] = X0_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Add seeded monomials in (x - x0) of degree above N, keeping Nth contact.
    """
    config = get_config()
    with handle_errors():
        sys = load_system(file_path)
        if order < 0:
            raise InputError(f"Contact order must be non-negative, got {order}")
        point = basepoint(sys, x0)
        perturbed = perturbed_system(
            sys,
            point,
            order + config.perturb.min_degree_offset,
            order + config.perturb.max_degree_offset,
            seed,
        )
    emit_text(serialize(perturbed), output)


@app.command("perturb-scaling")
def perturb_scaling_command(
    file_x: Path = typer.Argument(..., help="System X"),
    file_y: Path = typer.Argument(..., help="System Y (Nth contact with X at x0)"),
    order: int = typer.Option(..., "--N", help="Contact and growth order N"),
    constant: float = typer.Option(..., "--C", help="Growth constant C of X"),
    times: str = typer.Option("0.4,0.2,0.1,0.05", "--times", help="Times t"),
    targets: Optional[int] = typer.Option(None, "--targets", help="Targets per t"),
    min_exponent: Optional[float] = typer.Option(
        None, "--min-exponent", help="Exponent needed to pass (default N + 0.7)"
    ),
    seed: int = SEED_OPTION,
    x0: Optional[str] = X0_OPTION,
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Scaling of replay distances |y - x| against t for targets in B(x0, C t^N / 2).
    """
    config = get_config()
    with handle_errors():
        X, Y = load_system(file_x), load_system(file_y)
        report = perturb_scaling_experiment(
            X,
            Y,
            basepoint(X, x0),
            order,
            constant,
            parse_floats(times, "times"),
            targets if targets is not None else config.perturb.targets,
            seed,
            options=config.steer_options(),
            noise_factor=config.perturb.noise_factor,
            tolerance=config.integrator.tolerance,
            jobs=config.jobs,
        )
    if as_json:
        params = {"N": order, "C": constant, "times": times, "targets": targets, "x0": x0}
        config_echo = experiment("perturb-scaling", [file_x, file_y], params, seed, output)
        emit_json(config_echo, report.to_dict(), output)
    else:
        emit_csv(["t", "target_idx", "steer_residual", "replay_dist"], report.csv_rows(), output)
    for note in report.diagnostics:
        console.print(f"[yellow]{note}[/yellow]")
    if report.degenerate:
        return
    needed = order + 0.7 if min_exponent is None else min_exponent
    verdict(report.exponent >= needed, f"fitted exponent {report.exponent:.3f} (need {needed:g})")


@app.command("main-theorem")
def main_theorem_command(
    file_x: Path = typer.Argument(..., help="System X"),
    file_y: Path = typer.Argument(..., help="System Y (Nth contact with X at x0)"),
    order: int = typer.Option(..., "--N", help="Growth order N"),
    constant: float = typer.Option(..., "--C", help="Growth constant C of X"),
    times: str = typer.Option("0.5,0.25,0.125", "--times", help="Decreasing times t"),
    skip_x: bool = typer.Option(False, "--skip-x", help="Do not re-check X at (N, C)"),
    seed: int = SEED_OPTION,
    x0: Optional[str] = X0_OPTION,
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Growth test of Y at order N with constant C/2.
    """
    config = get_config()
    with handle_errors():
        X, Y = load_system(file_x), load_system(file_y)
        report = main_theorem_experiment(
            X,
            Y,
            basepoint(X, x0),
            order,
            constant,
            parse_floats(times, "times"),
            seed,
            check_x=not skip_x,
            **_growth_kwargs(config),
        )
    if as_json:
        params = {"N": order, "C": constant, "times": times, "x0": x0, "skip_x": skip_x}
        config_echo = experiment("main-theorem", [file_x, file_y], params, seed, output)
        emit_json(config_echo, report.to_dict(), output)
    else:
        emit_csv(["t", "radius", "coverage"], report.csv_rows(), output)
    verdict(report.passed, f"{Y.name} at N={order}, C/2={constant / 2:g}")


@app.command()
def calibrate(
    file_path: Path = typer.Argument(..., help="System file (.ctrl)"),
    order: int = typer.Option(..., "--N", help="Growth order N"),
    t: float = typer.Option(0.5, "--t", help="Calibration time"),
    samples: int = typer.Option(100000, "--samples", help="Bang-bang schedules to draw"),
    segments: Optional[int] = typer.Option(None, "--segments", "-p", help="Segments per schedule"),
    seed: int = SEED_OPTION,
    x0: Optional[str] = X0_OPTION,
    as_json: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
) -> None:
    """
    Brute-force growth constant: half the worst directional support / t^N.
    """
    config = get_config()
    with handle_errors():
        sys = load_system(file_path)
        report = calibrate_growth_constant(
            sys,
            basepoint(sys, x0),
            order,
            t,
            samples,
            segments if segments is not None else config.reach.segments,
            seed,
            directions=config.reach.directions,
            jobs=config.jobs,
        )
    if as_json:
        params = {"N": order, "t": t, "samples": samples, "x0": x0}
        emit_json(experiment("calibrate", [file_path], params, seed, output), report.to_dict(), output)
    else:
        emit_text(repr(report.constant), output)
    for note in report.diagnostics:
        console.print(f"[yellow]{note}[/yellow]")


@app.command()
def config(
    show: bool = typer.Option(False, "--show", help="Show current configuration"),
    create_default: bool = typer.Option(False, "--create-default", help="Create default config file"),
) -> None:
    """
    Manage stlc-lab configuration.
    """
    manager: ConfigManager = state.get("manager") or get_config_manager()

    if create_default:
        path = manager.create_default_config()
        console.print(f"[green]Created default configuration at {path}[/green]")
        return

    if show:
        info = manager.get_config_info()
        table = Table(title="stlc-lab configuration", show_header=True)
        table.add_column("Section", style="cyan")
        table.add_column("Key", style="green")
        table.add_column("Value", style="white")
        for section, values in info["config"].items():
            if isinstance(values, dict):
                for key, value in values.items():
                    table.add_row(section, key, str(value))
            else:
                table.add_row("", section, str(values))
        console.print(table)
        overrides = ", ".join(info["env_overrides"]) or "none"
        console.print(
            Panel.fit(
                f"[bold]Config File:[/bold] {info['config_file']}\n"
                f"[bold]Exists:[/bold] {'Yes' if info['config_exists'] else 'No'}\n"
                f"[bold]Environment overrides:[/bold] {overrides}",
                border_style="green",
            )
        )
        return

    console.print("Use [cyan]stlc-lab config --show[/cyan] to see full configuration")
    console.print("Use [cyan]stlc-lab config --create-default[/cyan] to create a default config file")


if __name__ == "__main__":
    app()
