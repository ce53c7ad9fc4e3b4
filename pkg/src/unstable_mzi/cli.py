"""Command-line front end: simulate fringes, sweep cavity parameters,
audit the duality relation, run the solver oracle, and canonicalize
layout files.

Exit codes: 0 success, 1 physics-check failure, 2 input error,
3 regime refusal.  Output is deterministic: identical invocations on
identical inputs produce byte-identical text (floats use their shortest
round-trip representation).
"""

from __future__ import annotations

import math
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from . import dsl
from .dsl import LayoutDocument, SegmentElement, SweepSpec
from .errors import DomainError, RegimeError, UnstableMziError
from .interferometer import DUALITY_TOL, detection_probabilities, duality_audit
from .oracle import ORACLE_TOL, OracleSettings, verify_free_amplitude

__all__ = ["main"]


def _fmt(value) -> str:
    return repr(float(value))


def _load_document(path: str) -> LayoutDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        raise SystemExit(2)
    except UnicodeDecodeError:
        click.echo(f"error: {path} is not valid UTF-8", err=True)
        raise SystemExit(2)
    result = dsl.parse(text)
    if not result.ok:
        for d in result.diagnostics:
            click.echo(
                f"{path}:{d.line}:{d.column}: {d.code.value}: {d.message}"
                f" (hint: {d.hint})",
                err=True,
            )
        raise SystemExit(2)
    return result.document


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _parse_phase_grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise click.BadParameter("phase grid must be start:end:count")
    try:
        start, end = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError:
        raise click.BadParameter("phase grid must be start:end:count with numeric fields")
    if count < 1 or not (math.isfinite(start) and math.isfinite(end)):
        raise click.BadParameter("phase grid needs finite endpoints and count >= 1")
    return np.linspace(start, end, count)


@click.group()
def main() -> None:
    """Two-path matter-wave interference with unstable particles."""


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

@main.command()
@click.argument("layout_file")
@click.option("--phases", default="0:6.283185307179586:361", show_default=True,
              metavar="START:END:COUNT", help="Inclusive phase grid in radians.")
@click.option("--out", default=None, help="Write CSV here instead of stdout.")
def simulate(layout_file: str, phases: str, out: str | None) -> None:
    """Scan detector probabilities over a phase grid, CSV output."""
    grid = _parse_phase_grid(phases)
    document = _load_document(layout_file)
    layout = document.to_layout()
    lines = ["phi,p1,p2,survival"]
    saturated = False
    for phi in grid:
        probs = detection_probabilities(layout, document.particle, float(phi))
        saturated = saturated or probs.saturated
        lines.append(",".join(
            (_fmt(phi), _fmt(probs.p1), _fmt(probs.p2), _fmt(probs.survival))))
    _emit("\n".join(lines) + "\n", out)
    if saturated:
        click.echo("warning: cavity asymmetry is saturated; interference "
                   "contrast is numerically zero", err=True)


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _resolve_sweep(document: LayoutDocument, param, start, end, steps, scale) -> SweepSpec:
    if param is not None:
        missing = [name for name, value in
                   (("--start", start), ("--end", end), ("--steps", steps))
                   if value is None]
        if missing:
            click.echo(f"error: --param also requires {', '.join(missing)}", err=True)
            raise SystemExit(2)
        try:
            return SweepSpec(parameter=param, start=start, end=end,
                             steps=steps, scale=scale or "linear")
        except DomainError as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(2)
    if document.sweep is None:
        click.echo("error: no sweep section in the layout and no --param given",
                   err=True)
        raise SystemExit(2)
    return document.sweep


def _sweep_values(spec: SweepSpec) -> np.ndarray:
    if spec.scale == "log":
        return np.geomspace(spec.start, spec.end, spec.steps)
    return np.linspace(spec.start, spec.end, spec.steps)


def _single_upper_cavity(document: LayoutDocument) -> int:
    indices = [i for i, e in enumerate(document.upper)
               if isinstance(e, SegmentElement) and e.kind == "cavity"]
    if len(indices) != 1:
        click.echo(
            f"error: sweeping needs exactly one cavity in the upper path, "
            f"found {len(indices)}", err=True)
        raise SystemExit(2)
    return indices[0]


def _swept_document(document: LayoutDocument, spec: SweepSpec, value: float,
                    ) -> LayoutDocument:
    if spec.parameter == "phase":
        return document
    index = _single_upper_cavity(document)
    cavity = document.upper[index]
    if spec.parameter == "gamma_ratio":
        if value < 0.0:
            click.echo("error: gamma_ratio sweep values must be >= 0", err=True)
            raise SystemExit(2)
        new_cavity = replace(cavity, gamma_ratio=float(value))
    else:  # cavity_length_over_ell
        if not math.isfinite(document.particle.ell):
            click.echo("error: cavity_length_over_ell sweep needs a finite "
                       "decay length", err=True)
            raise SystemExit(2)
        if value < 0.0:
            click.echo("error: cavity length sweep values must be >= 0", err=True)
            raise SystemExit(2)
        new_cavity = replace(cavity, length=float(value) * document.particle.ell)
    upper = document.upper[:index] + (new_cavity,) + document.upper[index + 1:]
    return replace(document, upper=upper)


@main.command()
@click.argument("layout_file")
@click.option("--param", type=click.Choice(["gamma_ratio", "cavity_length_over_ell",
                                            "phase"]), default=None,
              help="Override the layout's sweep section.")
@click.option("--start", type=float, default=None)
@click.option("--end", type=float, default=None)
@click.option("--steps", type=int, default=None)
@click.option("--scale", type=click.Choice(["linear", "log"]), default=None)
@click.option("--out", default=None, help="Write CSV here instead of stdout.")
def sweep(layout_file, param, start, end, steps, scale, out) -> None:
    """Sweep one parameter, reporting visibility, predictability, and
    the duality sum per grid point, CSV output."""
    document = _load_document(layout_file)
    spec = _resolve_sweep(document, param, start, end, steps, scale)
    if spec.parameter != "phase":
        _single_upper_cavity(document)   # validate before running
    lines = ["param,visibility,predictability,duality_sum"]
    for value in _sweep_values(spec):
        swept = _swept_document(document, spec, float(value))
        report = duality_audit(swept.to_layout(), swept.particle)
        lines.append(",".join((_fmt(value), _fmt(report.visibility),
                               _fmt(report.predictability),
                               _fmt(report.duality_sum))))
    _emit("\n".join(lines) + "\n", out)


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------

@main.command()
@click.argument("layout_file")
@click.option("--duality-tol", type=float, default=DUALITY_TOL, show_default=True,
              help="Allowed |V^2 + P^2 - 1|.")
def duality(layout_file: str, duality_tol: float) -> None:
    """Print V, P, V^2+P^2, and theta_cav for the layout."""
    document = _load_document(layout_file)
    report = duality_audit(document.to_layout(), document.particle)
    line = (f"V={_fmt(report.visibility)} P={_fmt(report.predictability)} "
            f"duality_sum={_fmt(report.duality_sum)} "
            f"theta_cav={_fmt(report.theta_cav)}")
    if report.saturated:
        line += " saturated=true"
    click.echo(line)
    if report.saturated:
        click.echo("note: cavity asymmetry beyond the saturation cap; "
                   "reporting the limiting values V=0, P=1", err=True)
    if abs(report.duality_sum - 1.0) > duality_tol:
        click.echo(f"duality check failed: |V^2+P^2-1| = "
                   f"{abs(report.duality_sum - 1.0):.3e} > {duality_tol:.3e}",
                   err=True)
        raise SystemExit(1)


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def _oracle_settings(document: LayoutDocument, oracle_tol, packet_width,
                     points_per_wavelength, richardson: bool) -> OracleSettings:
    overrides = document.oracle
    width = packet_width
    if width is None and overrides is not None:
        width = overrides.packet_width
    ppw = points_per_wavelength
    if ppw is None and overrides is not None:
        ppw = overrides.points_per_wavelength
    tol = oracle_tol
    if tol is None and overrides is not None:
        tol = overrides.oracle_tol
    try:
        return OracleSettings(
            packet_width=width,
            points_per_wavelength=ppw if ppw is not None else 4.0,
            oracle_tol=tol if tol is not None else ORACLE_TOL,
            richardson=richardson,
        )
    except UnstableMziError as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(2)


@main.command()
@click.argument("layout_file")
@click.option("--oracle-tol", type=float, default=None,
              help=f"Relative agreement tolerance (default {ORACLE_TOL:g}).")
@click.option("--packet-width", type=float, default=None,
              help="Wavepacket width in length units (default 100/k).")
@click.option("--points-per-wavelength", type=float, default=None,
              help="Spatial resolution of the solver grid (default 4).")
@click.option("--richardson/--no-richardson", default=True,
              help="Extrapolate the time step.")
def oracle(layout_file, oracle_tol, packet_width, points_per_wavelength,
           richardson) -> None:
    """Check each upper-arm leg against the time-dependent solver.

    Every finite-length leg is propagated as a wavepacket through a
    uniform medium with its decay-rate ratio, and the measured norm decay
    and carrier phase advance are compared with the analytic amplitude.
    """
    document = _load_document(layout_file)
    settings = _oracle_settings(document, oracle_tol, packet_width,
                                points_per_wavelength, richardson)
    legs = [e for e in document.upper
            if isinstance(e, SegmentElement) and e.length > 0.0]
    if not legs:
        click.echo("error: the upper path has no finite-length legs to verify",
                   err=True)
        raise SystemExit(2)
    all_passed = True
    lines: list[str] = []
    for i, leg in enumerate(legs):
        try:
            report = verify_free_amplitude(document.particle, leg.length,
                                           leg.gamma_ratio, settings)
        except RegimeError as exc:
            click.echo(f"refused: {exc}", err=True)
            raise SystemExit(3)
        except UnstableMziError as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(2)
        prefix = f"leg{i}"
        lines.extend([
            f"{prefix}.kind={leg.kind}",
            f"{prefix}.distance={_fmt(report.distance)}",
            f"{prefix}.gamma_ratio={_fmt(report.gamma_ratio)}",
            f"{prefix}.wavenumber={_fmt(report.wavenumber)}",
            f"{prefix}.measured_norm_decay={_fmt(report.measured_norm_decay)}",
            f"{prefix}.predicted_norm_decay={_fmt(report.predicted_norm_decay)}",
            f"{prefix}.phase_advance_measured={_fmt(report.phase_advance_measured)}",
            f"{prefix}.phase_advance_predicted={_fmt(report.phase_advance_predicted)}",
            f"{prefix}.grid_spacing={_fmt(report.grid_spacing)}",
            f"{prefix}.time_step={_fmt(report.time_step)}",
            f"{prefix}.relative_error={_fmt(report.relative_error)}",
            f"{prefix}.passed={'true' if report.passed else 'false'}",
        ])
        all_passed = all_passed and report.passed
    click.echo("\n".join(lines))
    if not all_passed:
        click.echo("oracle check failed: at least one leg exceeded the "
                   "tolerance", err=True)
        raise SystemExit(1)


# ---------------------------------------------------------------------------
# fmt
# ---------------------------------------------------------------------------

@main.command()
@click.argument("layout_file")
@click.option("--out", default=None, help="Write here instead of stdout.")
def fmt(layout_file: str, out: str | None) -> None:
    """Canonicalize a layout file."""
    document = _load_document(layout_file)
    _emit(dsl.serialize(document), out)


if __name__ == "__main__":
    main()
