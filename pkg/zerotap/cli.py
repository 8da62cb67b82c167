"""CLI interface for zerotap."""

import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import click
import numpy as np
from rich.console import Console
from rich.table import Table

from zerotap import __version__
from zerotap.errors import InputFormatError, InvalidArgumentError, ZeroTapError
from zerotap.io import load_coeffseq, write_json, write_text
from zerotap.manifest import RunConfig, command_arguments, sha256_of, verify, write_manifest
from zerotap.pipeline import (
    auto_grid,
    derivative_comparison,
    jentzsch_statistic,
    make_grid,
    theorem1_check,
    uniformity_report,
)
from zerotap.plots import envelope_svg, overlay_svg, profile_svg, roots_svg
from zerotap.roots import SolverOptions
from zerotap.series import (
    CoeffSeq,
    RULES,
    explicit_coeffs,
    geometric_partial_sum,
    hardy,
    hardy_truncation,
    random_roots_disk,
    rule_partial_sum,
    ruelle_truncation,
    ruelle_zeta,
    tutte_coeffseq,
)
from zerotap.settings import Settings, load_settings
from zerotap.summary import (
    coeffseq_panel,
    derivative_table,
    print_outputs,
    theorem1_table,
    uniformity_table,
)
from zerotap.tutte import tutte_connected

console = Console()
logger = logging.getLogger(__name__)

FAMILIES = ("geometric-partial-sum", "custom-rule", "tutte", "ruelle", "hardy", "random-roots-disk")
COEFFSEQ_NAME = "coeffseq.json"


class GridSpec(NamedTuple):
    t_min: float
    t_max: float
    n: int

    def __str__(self) -> str:
        return f"{self.t_min!r}:{self.t_max!r}:{self.n}"


class GridType(click.ParamType):
    """t_min:t_max:n"""

    name = "t_min:t_max:n"

    def convert(self, value, param, ctx):
        if isinstance(value, GridSpec):
            return value
        parts = str(value).split(":")
        try:
            if len(parts) != 3:
                raise ValueError
            spec = GridSpec(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError:
            self.fail(f"expected t_min:t_max:n, got {value!r}", param, ctx)
        if not spec.t_min < spec.t_max or spec.n < 2:
            self.fail(f"need t_min < t_max and n >= 2, got {value!r}", param, ctx)
        return spec


@dataclass
class RunContext:
    out: Path
    seed: int
    tol_residual: float | None
    grid: GridSpec | None
    settings: Settings
    global_arguments: list[str] = field(default_factory=list)

    @property
    def residual_tol_log(self) -> float:
        if self.tol_residual is not None:
            return self.tol_residual
        return self.settings.solver.residual_tol_log

    def solver_options(self) -> SolverOptions:
        return replace(self.settings.solver.options(), residual_tol_log=self.residual_tol_log)


@contextmanager
def _reporting_errors():
    """Map failures to exit codes: 2 for bad input, 1 for computation failures."""
    try:
        yield
    except (InputFormatError, InvalidArgumentError) as e:
        console.print(f"[red]Error: {e}[/red]")
        sys.exit(2)
    except ZeroTapError as e:
        console.print(f"[red]Computation failed: {e}[/red]")
        sys.exit(1)


def _setup_logging(verbose: int) -> None:
    level = logging.WARNING if verbose == 0 else (logging.INFO if verbose == 1 else logging.DEBUG)
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.getLogger("zerotap").setLevel(level)


def _finish(ctx: click.Context, outputs: list[str], inputs=(), family=None, grid=None) -> None:
    """Write the manifest for this run and list what was produced."""
    run: RunContext = ctx.obj
    config = RunConfig(
        command=ctx.info_name,
        global_arguments=run.global_arguments,
        arguments=command_arguments(ctx.command, ctx.params),
        family=family,
        grid=grid,
        residual_tol_log=run.residual_tol_log,
        seed=run.seed,
        out=str(run.out),
        settings=run.settings.model_dump(mode="json"),
        inputs={str(p): sha256_of(p) for p in inputs},
        outputs=sorted(outputs),
    )
    write_manifest(run.out, config)
    console.print(f"[green]Wrote {len(outputs)} files and the manifest to {run.out}[/green]")
    print_outputs(console, sorted(outputs))


def _grid_for(run: RunContext, f: CoeffSeq) -> np.ndarray:
    if run.grid is not None:
        return make_grid(*run.grid)
    profile = run.settings.profile
    return auto_grid(f, profile.grid_points, profile.default_grid, run.settings.truncation.radius)


def _grid_json(t: np.ndarray) -> dict:
    return {"t_min": float(t[0]), "t_max": float(t[-1]), "n": int(len(t))}


@click.group(invoke_without_command=True)
@click.option("--out", "out", type=click.Path(file_okay=False, path_type=Path), default=Path("zerotap-out"),
              show_default=True, help="Output directory")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for randomized families")
@click.option("--tol-residual", "tol_residual", type=float, default=None,
              help="Residual certificate as a natural log (default from settings)")
@click.option("--grid", type=GridType(), default=None, help="Profile grid t_min:t_max:n")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, resolve_path=True, path_type=Path),
              default=None, help="JSON settings merged over the packaged defaults")
@click.option("-v", "--verbose", count=True, help="-v for info logs, -vv for debug logs")
@click.version_option(__version__, prog_name="zerotap")
@click.pass_context
def main(ctx, out, seed, tol_residual, grid, config_path, verbose):
    """zerotap - coefficients, maximum modulus and zeros of polynomial families.

    Quick start:

        zerotap --out s200 generate geometric-partial-sum --n 200
        zerotap --out s200 analyze s200/coeffseq.json
        zerotap verify s200/manifest.json
    """
    _setup_logging(verbose)
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())
        return
    with _reporting_errors():
        settings = load_settings(config_path)
    ctx.obj = RunContext(
        out=out,
        seed=seed,
        tol_residual=tol_residual,
        grid=grid,
        settings=settings,
        global_arguments=command_arguments(ctx.command, ctx.params, skip=("out", "verbose")),
    )


# =============================================================================
# Family generation
# =============================================================================


def _parse_coeffs(text: str) -> list[complex | float]:
    values = []
    for token in text.split(","):
        token = token.strip().replace(" ", "")
        try:
            z = complex(token)
        except ValueError:
            raise click.BadParameter(f"not a number: {token!r}", param_hint="--coeffs") from None
        values.append(z.real if z.imag == 0 else z)
    return values


def _require(value, name: str, family: str):
    if value is None:
        raise click.UsageError(f"{family} needs {name}")
    return value


@main.command()
@click.argument("family", type=click.Choice(FAMILIES))
@click.option("--n", "n", type=int, default=None, help="Degree / index of the family member")
@click.option("--c", "c", type=float, default=None, help="Ruelle parameter c < -2")
@click.option("--a", "a", type=float, default=None, help="Hardy parameter 0 < a < 1")
@click.option("--K", "K", type=int, default=None, help="Truncation index for entire functions")
@click.option("--auto-K", "auto_K", is_flag=True, default=False, help="Choose K from the truncation radius and margin")
@click.option("--rule", type=click.Choice(sorted(RULES)), default=None, help="Coefficient rule for custom-rule")
@click.option("--coeffs", default=None, help="Explicit comma-separated coefficients a_0,a_1,... for custom-rule")
@click.option("--V", "V", type=float, default=None, help="Normalization for explicit coefficients")
@click.pass_context
def generate(ctx, family, n, c, a, K, auto_K, rule, coeffs, V):
    """Generate one family member and write it as coeffseq.json."""
    run: RunContext = ctx.obj
    trunc = run.settings.truncation
    params = {k: v for k, v in dict(n=n, c=c, a=a, K=K, rule=rule, coeffs=coeffs, V=V).items() if v is not None}
    outputs = [COEFFSEQ_NAME]

    with _reporting_errors():
        if family in ("ruelle", "hardy") and K is None and not auto_K:
            raise click.UsageError(f"{family} needs --K or --auto-K")

        if family == "geometric-partial-sum":
            f = geometric_partial_sum(_require(n, "--n", family))
        elif family == "custom-rule":
            if coeffs is not None:
                f = explicit_coeffs(_parse_coeffs(coeffs), label="custom", V=V)
            else:
                f = rule_partial_sum(_require(rule, "--rule or --coeffs", family), _require(n, "--n", family))
        elif family == "tutte":
            n = _require(n, "--n", family)
            poly = tutte_connected(n)
            f = tutte_coeffseq(poly, n)
            write_json(run.out / "tutte_poly.json", {
                "n": n,
                "coeffs": poly.to_json(),
                "coeffs_about_1": poly.taylor_shift(1).to_json(),
            })
            outputs.append("tutte_poly.json")
        elif family == "ruelle":
            c = _require(c, "--c", family)
            if K is None:
                K = ruelle_truncation(c, trunc.radius, trunc.margin)
                params["K"] = K
            f = ruelle_zeta(c, K)
        elif family == "hardy":
            a = _require(a, "--a", family)
            if K is None:
                K = hardy_truncation(a, trunc.radius, trunc.margin)
                params["K"] = K
            f = hardy(a, K)
        else:
            params["seed"] = run.seed
            f = random_roots_disk(_require(n, "--n", family), run.seed)

        write_json(run.out / COEFFSEQ_NAME, f.to_json())

    console.print(coeffseq_panel(f))
    _finish(ctx, outputs, family={"name": family, **params})


# =============================================================================
# Analyses
# =============================================================================


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False, resolve_path=True, path_type=Path))
@click.option("--radius", type=float, default=None, help="Check this circle instead of the detected ones")
@click.pass_context
def analyze(ctx, file, radius):
    """Envelope, profile, detector and zeros of one CoeffSeq file."""
    run: RunContext = ctx.obj
    s = run.settings
    outputs = ["theorem1.json", "uniformity.json", "roots.csv"]

    with _reporting_errors():
        f = load_coeffseq(file)
        t = _grid_for(run, f)
        t1 = theorem1_check(f, t)
        write_json(run.out / "theorem1.json", t1.to_json())
        report = uniformity_report(
            f,
            radius_guess=radius,
            t_grid=t,
            delta=s.metrics.annulus_delta,
            gap_factor=s.detector.gap_factor,
            min_piece_intervals=s.detector.min_piece_intervals,
            min_tol=s.detector.min_tol,
            max_slope_tol=s.detector.max_slope_tol,
            opts=run.solver_options(),
        )
        write_json(run.out / "uniformity.json", report.to_json())
        write_text(run.out / "roots.csv", report.roots.to_csv())

        if s.plots.enabled:
            size, dpi = s.plots.size_px, s.plots.dpi
            profile_svg(t1.profile, run.out / "profile.svg", report.segmentation, f.label, size, dpi)
            envelope_svg(t1.psi, t1.legendre_psi, t, run.out / "envelope.svg", f.label, size, dpi)
            radii = [c.radius for c in report.circles]
            roots_svg(report.roots, run.out / "roots.svg", radii, f.label, size, dpi)
            outputs += ["profile.svg", "envelope.svg", "roots.svg"]

    console.print(theorem1_table(t1))
    console.print(uniformity_table(report))
    _finish(ctx, outputs, inputs=[file], family={"label": f.label}, grid=_grid_json(t))


@main.command(name="compare-derivative")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, resolve_path=True, path_type=Path))
@click.option("--exclusion-radius", "exclusion_radius", type=float, default=None,
              help="Skip sample points this close to a zero (default: factor x median modulus)")
@click.pass_context
def compare_derivative(ctx, file, exclusion_radius):
    """Zeros of f against zeros of f' (transport distance and potential gap)."""
    run: RunContext = ctx.obj
    s = run.settings
    outputs = ["derivative.json"]

    with _reporting_errors():
        f = load_coeffseq(file)
        report = derivative_comparison(
            f,
            exclusion_radius=exclusion_radius,
            tol=s.detector.min_tol,
            exclusion_factor=s.metrics.exclusion_factor,
            opts=run.solver_options(),
        )
        write_json(run.out / "derivative.json", report.to_json())
        if s.plots.enabled:
            overlay_svg(report.zeros, report.critical, run.out / "overlay.svg", f.label, s.plots.size_px, s.plots.dpi)
            outputs.append("overlay.svg")

    console.print(derivative_table(report))
    _finish(ctx, outputs, inputs=[file], family={"label": f.label})


@main.command(name="jentzsch-check")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, resolve_path=True, path_type=Path))
@click.option("--eps", "eps", type=float, multiple=True, required=True, help="Boundary window fraction in (0, 1/2); repeatable")
@click.pass_context
def jentzsch_check(ctx, file, eps):
    """Coefficient criterion: max ln|a_k| is attained within eps*n of a boundary window."""
    with _reporting_errors():
        f = load_coeffseq(file)
        rows = []
        for e in eps:
            difference, bound = jentzsch_statistic(f, e)
            rows.append({"eps": e, "difference": difference, "bound": bound, "holds": difference <= bound})
        write_json(ctx.obj.out / "jentzsch.json", {"label": f.label, "n": f.degree, "checks": rows})

    table = Table(title=f"Coefficient criterion: {f.label}", header_style="bold magenta")
    table.add_column("eps", justify="right")
    table.add_column("max - window max", justify="right")
    table.add_column("eps n", justify="right")
    table.add_column("Holds")
    for row in rows:
        mark = "[green]yes[/green]" if row["holds"] else "[red]no[/red]"
        table.add_row(f"{row['eps']:g}", f"{row['difference']:.6g}", f"{row['bound']:.6g}", mark)
    console.print(table)
    _finish(ctx, ["jentzsch.json"], inputs=[file], family={"label": f.label})


# =============================================================================
# Reproducibility
# =============================================================================


@main.command(name="verify")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def verify_cmd(manifest):
    """Re-run a manifest and diff its outputs byte for byte."""
    with _reporting_errors():
        checks = verify(manifest, main)

    table = Table(title=f"Replay of {manifest}", header_style="bold magenta")
    table.add_column("File")
    table.add_column("Status")
    for check in checks:
        style = "green" if check.ok else "red"
        table.add_row(check.name, f"[{style}]{check.status}[/{style}]")
    console.print(table)

    if checks and all(check.ok for check in checks):
        console.print("[green]All outputs reproduced.[/green]")
    else:
        console.print("[red]Outputs differ from the recorded run.[/red]")
        sys.exit(1)


if __name__ == "__main__":
    main()
