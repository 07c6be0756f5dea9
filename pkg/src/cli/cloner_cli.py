"""CLI for the orthogonal-pair cloning toolkit."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, List, NoReturn, Optional

import numpy as np
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape

from src.core.cloneropt import (
    EIGEN_CLUSTER_TOL,
    H_LABELS,
    build_A,
    build_isometry,
    choi_fidelity,
    choi_from_isometry,
    crossover as find_crossover,
    dual_certificate,
    fidelity_parallel,
    fidelity_perp,
    optimize_choi,
)
from src.core.exceptions import ClonerError, NonConvergenceError
from src.core.pdcsim import best_row, gain_scan, optimal_gain, optimal_gamma, pdc_fidelity
from src.core.settings import OptimizerSettings

from src.cli.emit import write_csv, write_json

app = typer.Typer(help="Optimal cloning of an orthogonal qubit pair")
err_console = Console(stderr=True)

logger = logging.getLogger(__name__)

MAX_SCAN_M = 10 ** 6
VERIFY_TOL = 1e-7


class OutputFormat(str, Enum):
    csv = "csv"
    json = "json"


def _fail(message: str, code: int = 2) -> NoReturn:
    err_console.print(f"[red]Error: {escape(message)}[/red]")
    raise typer.Exit(code)


def _emit_table(
    fmt: OutputFormat,
    rows: List[Dict[str, Any]],
    columns: List[str],
    header: Optional[Dict[str, Any]] = None,
) -> None:
    """CSV: header values as comment lines. JSON: header fields plus a ``rows`` list."""
    if fmt == OutputFormat.csv:
        write_csv(rows, columns, comments=header)
    else:
        write_json({**(header or {}), "rows": rows})


def _emit_report(fmt: OutputFormat, report: Dict[str, Any]) -> None:
    if fmt == OutputFormat.csv:
        write_csv([report], list(report))
    else:
        write_json(report)


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr")):
    """Optimal cloning of an orthogonal qubit pair."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


# ============================================================================
# FIDELITY SCAN
# ============================================================================

@dataclass(frozen=True)
class ScanRow:
    """advantage = f_perp - f_parallel; both empty below M=2."""

    M: int
    f_perp: float
    f_parallel: Optional[float]
    advantage: Optional[float]


def scan_row(M: int) -> ScanRow:
    f_perp = fidelity_perp(M)
    f_par = fidelity_parallel(2, M) if M >= 2 else None
    return ScanRow(M=M, f_perp=f_perp, f_parallel=f_par, advantage=None if f_par is None else f_perp - f_par)


@app.command()
def scan(
    m_min: int = typer.Option(1, "--m-min", help="Smallest clone count"),
    m_max: int = typer.Option(20, "--m-max", help="Largest clone count"),
    fmt: OutputFormat = typer.Option(OutputFormat.csv, "--format", help="Output format"),
):
    """Compare the orthogonal-pair cloner with the standard 2 -> M cloner."""
    if not (1 <= m_min <= m_max <= MAX_SCAN_M):
        _fail(f"Need 1 <= m-min <= m-max <= {MAX_SCAN_M}, got {m_min}..{m_max}")
    rows = [asdict(scan_row(M)) for M in range(m_min, m_max + 1)]
    _emit_table(fmt, rows, ["M", "f_perp", "f_parallel", "advantage"])


# ============================================================================
# OPTIMIZER
# ============================================================================

@app.command()
def optimize(
    m: int = typer.Option(..., "--m", help="Number of clones"),
    tol: float = typer.Option(1e-12, "--tol", help="Fidelity change threshold"),
    max_iter: int = typer.Option(10_000, "--max-iter", help="Iteration budget"),
    fmt: OutputFormat = typer.Option(OutputFormat.json, "--format", help="Output format"),
):
    """Run the Choi fixed-point optimizer for M clones."""
    try:
        settings = OptimizerSettings(tol=tol, max_iter=max_iter)
    except ValidationError as e:
        _fail(f"Invalid optimizer settings: {e.errors()[0]['msg']}")

    try:
        result = optimize_choi(m, settings=settings)
    except NonConvergenceError as e:
        _emit_report(fmt, {
            "M": m,
            "converged": False,
            "fidelity": e.fidelity,
            "iterations": e.iterations,
            "duality_gap": None,
            "extremal_residual": None,
            "f_perp": fidelity_perp(m),
        })
        err_console.print(f"[red]Error: {escape(str(e))}[/red]")
        raise typer.Exit(3)
    except ClonerError as e:
        _fail(str(e))

    _emit_report(fmt, {
        "M": m,
        "converged": True,
        "fidelity": result.fidelity,
        "iterations": result.iterations,
        "duality_gap": result.duality_gap,
        "extremal_residual": result.extremal_residual,
        "f_perp": fidelity_perp(m),
    })


# ============================================================================
# DUAL CERTIFICATE
# ============================================================================

def certificate_report(M: int) -> Dict[str, Any]:
    """
    Closed-form multiplier with its distinct gap eigenvalues.

    mu3 is the eigenvalue nearest zero; mu1 < mu2 are the positive ones.
    """
    cert = dual_certificate(M)
    mu3 = min(cert.mu, key=abs)
    positive = [mu for mu in cert.mu if mu > EIGEN_CLUSTER_TOL]
    report: Dict[str, Any] = {"M": M}
    for i, row in enumerate(H_LABELS):
        for j, col in enumerate(H_LABELS):
            report[f"lambda_{row}_{col}"] = float(cert.lam[i, j].real)
    report.update({
        "mu1": positive[0] if positive else None,
        "mu2": positive[-1] if positive else None,
        "mu3": mu3,
        "min_eigenvalue": cert.min_eigenvalue,
        "psd": cert.is_psd,
        "trace": cert.trace,
        "f_perp": fidelity_perp(M),
    })
    return report


@app.command()
def certificate(
    m: int = typer.Option(..., "--m", help="Number of clones"),
    fmt: OutputFormat = typer.Option(OutputFormat.json, "--format", help="Output format"),
):
    """Print the Lagrange multiplier and the eigenvalues of lambda (x) 1 - A."""
    try:
        report = certificate_report(m)
    except ClonerError as e:
        _fail(str(e))
    _emit_report(fmt, report)


# ============================================================================
# STIMULATED PDC
# ============================================================================

@app.command()
def pdc(
    m: int = typer.Option(..., "--m", help="Photons detected in the idler arm"),
    y_min: float = typer.Option(0.0, "--y-min", help="Smallest gain sinh^2(gamma)"),
    y_max: float = typer.Option(2.0, "--y-max", help="Largest gain"),
    steps: int = typer.Option(201, "--steps", help="Grid points, endpoints included"),
    fmt: OutputFormat = typer.Option(OutputFormat.csv, "--format", help="Output format"),
):
    """Fidelity and post-selection probability of the stimulated-PDC cloner over a gain grid."""
    if not (0.0 <= y_min < y_max):
        _fail(f"Need 0 <= y-min < y-max, got {y_min}..{y_max}")
    if steps < 2:
        _fail(f"steps must be at least 2, got {steps}")
    try:
        rows = gain_scan(m, np.linspace(y_min, y_max, steps))
        y_opt = optimal_gain(m)
        header = {
            "M": m,
            "y_opt": y_opt,
            "gamma_opt": optimal_gamma(m),
            "f_opt": pdc_fidelity(m, y_opt),
        }
    except ClonerError as e:
        _fail(str(e))
    best = best_row(rows)
    header.update({"best_y": best.y, "best_fidelity": best.fidelity})
    table = [{"y": r.y, "fidelity": r.fidelity, "success_prob": r.success_prob} for r in rows]
    _emit_table(fmt, table, ["y", "fidelity", "success_prob"], header)


# ============================================================================
# CROSSOVER
# ============================================================================

@app.command()
def crossover(
    n: int = typer.Option(1, "--n", help="Copies of psi accompanying one psi_perp"),
    m_max: int = typer.Option(1000, "--m-max", help="Largest clone count searched"),
    fmt: OutputFormat = typer.Option(OutputFormat.csv, "--format", help="Output format"),
):
    """Smallest M where N copies of psi plus one psi_perp beat N+1 copies of psi."""
    try:
        result = find_crossover(n, m_max)
    except ClonerError as e:
        _fail(str(e))
    header = {
        "N": n,
        "crossover": result.strict_m if result.found else "none",
        "equality": result.equality_m if result.equality_m is not None else "none",
    }
    rows = [
        {"M": M, "f_perp": f_perp, "f_parallel": f_par, "advantage": f_perp - f_par}
        for M, f_perp, f_par in result.rows
    ]
    _emit_table(fmt, rows, ["M", "f_perp", "f_parallel", "advantage"], header)


# ============================================================================
# CROSS-ROUTE VERIFICATION
# ============================================================================

def verify_row(M: int) -> Dict[str, Any]:
    """Fidelity of M clones by the closed form, the optimizer, the isometry and PDC at y_opt."""
    closed = fidelity_perp(M)
    optimized = optimize_choi(M).fidelity
    isometric = choi_fidelity(choi_from_isometry(build_isometry(M)), build_A(M))
    pdc_value = pdc_fidelity(M, optimal_gain(M))
    deviation = max(abs(v - closed) for v in (optimized, isometric, pdc_value))
    logger.debug(f"verify M={M}: max deviation {deviation:.2e}")
    return {
        "M": M,
        "closed_form": closed,
        "optimizer": optimized,
        "isometry": isometric,
        "pdc": pdc_value,
        "max_deviation": deviation,
    }


@app.command()
def verify(
    m_min: int = typer.Option(1, "--m-min", help="Smallest clone count"),
    m_max: int = typer.Option(6, "--m-max", help="Largest clone count"),
    workers: int = typer.Option(4, "--workers", help="Worker threads"),
    fmt: OutputFormat = typer.Option(OutputFormat.csv, "--format", help="Output format"),
):
    """Cross-check the four fidelity routes for each M."""
    if not (1 <= m_min <= m_max):
        _fail(f"Need 1 <= m-min <= m-max, got {m_min}..{m_max}")
    if workers < 1:
        _fail(f"workers must be at least 1, got {workers}")
    try:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(verify_row, range(m_min, m_max + 1)))
    except NonConvergenceError as e:
        _fail(str(e), code=3)
    except ClonerError as e:
        _fail(str(e))

    _emit_table(fmt, rows, ["M", "closed_form", "optimizer", "isometry", "pdc", "max_deviation"])
    failed = [row["M"] for row in rows if row["max_deviation"] > VERIFY_TOL]
    if failed:
        err_console.print(f"[red]Error: routes disagree for M={failed}[/red]")
        raise typer.Exit(1)
    err_console.print(f"[green]✓ All routes agree for M={m_min}..{m_max}[/green]")


if __name__ == "__main__":
    app()
