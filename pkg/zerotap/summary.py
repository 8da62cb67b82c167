"""Rich terminal summaries of zerotap reports."""

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from zerotap.pipeline import DerivativeReport, Theorem1Report, UniformityReport
from zerotap.series import CoeffSeq


def _fmt(value, spec: str = ".6g") -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    return f"{value:{spec}}"


def coeffseq_panel(f: CoeffSeq) -> Panel:
    table = Table(show_header=False, box=None)
    table.add_column("Field", style="dim")
    table.add_column("Value")
    table.add_row("Degree", str(f.degree))
    table.add_row("n", str(f.n))
    table.add_row("V", _fmt(f.V) if f.normalized else f"{f.V:.6g} (working scale)")
    table.add_row("Truncated", _fmt(f.truncated))
    table.add_row("Nonzero coefficients", str(f.nonzero_count()))
    if f.factored:
        table.add_row("Stored roots", str(len(f.roots)))
    return Panel(table, title=f.label, border_style="cyan")


def theorem1_table(report: Theorem1Report) -> Table:
    table = Table(title=f"Envelope and profile: {report.label}", header_style="bold magenta")
    table.add_column("Quantity")
    table.add_column("Value", justify="right")
    table.add_row("V", _fmt(report.V) if report.normalized else f"{report.V:.6g} (working scale)")
    table.add_row("Envelope breakpoints", str(len(report.psi.breakpoints)))
    table.add_row("Duality residual", _fmt(report.duality_residual, ".3g"))
    table.add_row("Sandwich gap", _fmt(report.sandwich_gap, ".4g"))
    table.add_row("Grid", f"{report.profile.t_grid[0]:g} .. {report.profile.t_grid[-1]:g} ({len(report.profile.t_grid)})")
    return table


def uniformity_table(report: UniformityReport) -> Table:
    table = Table(title=f"Zeros near detected circles: {report.label}", header_style="bold magenta")
    table.add_column("Radius", justify="right")
    table.add_column("Predicted mass", justify="right")
    table.add_column("Measured mass", justify="right")
    table.add_column("Discrepancy", justify="right")
    for check in report.circles:
        table.add_row(
            _fmt(check.radius),
            _fmt(check.predicted_mass, ".4f"),
            _fmt(check.measured_mass, ".4f"),
            _fmt(check.discrepancy, ".4f"),
        )
    if not report.circles:
        table.add_row("-", "-", "-", "-")
    seg = report.segmentation
    if seg is not None:
        table.caption = f"{len(seg.pieces)} pieces, flat start {_fmt(seg.flat_start)}, tol {seg.tol:.3g}"
    elif report.detector_note:
        table.caption = report.detector_note
    return table


def derivative_table(report: DerivativeReport) -> Table:
    table = Table(title=f"Zeros against critical points: {report.label}", header_style="bold magenta")
    table.add_column("Quantity")
    table.add_column("Value", justify="right")
    table.add_row("W1(zeros, critical points)", _fmt(report.w1_zero_vs_crit))
    table.add_row("Pointwise gap", _fmt(report.pointwise_gap, ".4g"))
    table.add_row("Exclusion radius", _fmt(report.exclusion_radius, ".4g"))
    table.add_row("Samples", str(report.sample_count))
    constant = sum(1 for flag in report.constancy_flags if flag.constant)
    table.add_row("Negative-gap points", f"{len(report.constancy_flags)} ({constant} locally constant)")
    return table


def print_outputs(console: Console, paths) -> None:
    for path in paths:
        console.print(f"  [dim]{path}[/dim]")
